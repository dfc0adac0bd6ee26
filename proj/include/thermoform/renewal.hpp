#ifndef THERMOFORM_RENEWAL_HPP
#define THERMOFORM_RENEWAL_HPP

#include <vector>

#include "thermoform/perron.hpp"
#include "thermoform/potential.hpp"

namespace thermoform {

/// Pressure of deep distance potentials by renewal at the marks.
///
/// Applies on a full shift to dist-sunny (background symbol 0) and to
/// dist-orbit around a fixed point z. A mark is any symbol other than the
/// background. The value at a site depends only on the distances to its
/// nearest marks, capped at r+1, so the sum of the potential over the sites
/// from one mark up to the next is a function F(g_prev, g, g_next) of three
/// consecutive gaps (the outer two capped at r+1), and linear in g beyond
/// 2r+2. Pressure is the root s of log rho(K(s)) = 0 for the operator
///   K(s)[(c, g) -> (g', g'')] = (|A|-1) exp(t F(c, g, g'') - s g),
/// where the last gap class sums the geometric tail in closed form.
///
/// Everything is solved relative to the far value v (the table maximum on
/// the background): s' = P - t v > 0, which keeps tiny gaps free of
/// cancellation.
struct RenewalResult {
  double pressure = 0.0;
  double excess = 0.0;  // pressure - t * far_value, computed directly
  double log_excess = 0.0;  // log(excess); finite even when excess underflows
  double integral = 0.0;
  double entropy = 0.0;
  double numeric_error = 0.0;
};

class RenewalModel {
 public:
  explicit RenewalModel(const LocallyConstantPotential& pot);

  static bool applicable(const LocallyConstantPotential& pot);

  RenewalResult solve(double t, const PerronOptions& options = {}) const;

  /// Table maximum (the value far from every mark).
  double far_value() const { return far_; }
  /// Entropy of the configurations on which the table equals far_value():
  /// the ground-state entropy of the truncated potential.
  double ground_entropy() const;
  int states() const { return static_cast<int>(state_cap_.size()); }

 private:
  struct Edge {
    int from, to;
    double excess_sum;  // F - g * far over the block
    int gap;            // g, or the first gap of the tail class
    bool tail;
  };

  double log_multiplicity_;
  double far_;
  int radius_;
  std::vector<int> state_cap_;
  std::vector<Edge> edges_;
};

}  // namespace thermoform

#endif  // THERMOFORM_RENEWAL_HPP
