#ifndef THERMOFORM_PRESSURE_HPP
#define THERMOFORM_PRESSURE_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thermoform/perron.hpp"
#include "thermoform/potential.hpp"
#include "thermoform/renewal.hpp"
#include "thermoform/sft.hpp"

namespace thermoform {

inline constexpr std::size_t kTransferStateBudget = 10'000;

/// Graph whose states are the admissible words of length depth() and whose
/// edges are the admissible words of length depth()+1. value[u] is the
/// potential table on state u.
struct WordGraph {
  int depth = 1;
  std::vector<Word> states;  // lexicographic
  std::vector<std::vector<int>> succ;
  std::vector<double> value;

  int size() const { return static_cast<int>(states.size()); }
  std::size_t edges() const;
};

WordGraph build_word_graph(const LocallyConstantPotential& pot, std::size_t max_states = kTransferStateBudget);

/// Transfer matrix at parameter t: entry (u, v) = exp(t * value[u]).
LogMatrix transfer_matrix(const WordGraph& g, double t);

enum class PressureEngine { Auto, Transfer, Renewal };

struct PressureOptions {
  PressureEngine engine = PressureEngine::Auto;
  std::size_t max_states = kTransferStateBudget;
  PerronOptions perron;
};

struct PressureResult {
  double t = 0.0;
  double value = 0.0;
  /// Certified half-width: |t| * truncation_error plus the numerical
  /// eigenvalue bracket.
  double enclosure_halfwidth = 0.0;
  double numeric_error = 0.0;
  PressureEngine engine = PressureEngine::Transfer;
};

PressureResult pressure(const LocallyConstantPotential& pot, double t, const PressureOptions& options = {});

/// Order-k stationary Markov chain whose states are k-words. Only states of
/// positive measure are stored; out[u] lists the successors reached by
/// appending one symbol.
struct MarkovMeasure {
  struct Transition {
    int to;
    double prob;
    double log_prob;
  };

  explicit MarkovMeasure(Sft s) : sft(std::move(s)) {}

  Sft sft;
  int order = 1;
  std::vector<Word> states;  // lexicographic
  std::vector<std::vector<Transition>> out;
  std::vector<double> stationary;
  std::string provenance;

  std::optional<int> find(std::span<const int> state) const;
  /// mu([w]) for any word (marginalising when |w| < order).
  double cylinder(std::span<const int> w) const;
  double log_cylinder(std::span<const int> w) const;
};

MarkovMeasure equilibrium_state(const LocallyConstantPotential& pot, double t, const PressureOptions& options = {});
/// Product measure on a full shift.
MarkovMeasure bernoulli_measure(const Sft& sft, std::span<const double> probabilities);
/// Invariant probability on the orbit of a cyclically admissible word.
MarkovMeasure periodic_measure(const Sft& sft, std::span<const int> p, int order = 1);
/// Same process viewed as an order-k chain, k >= m.order.
MarkovMeasure refine(const MarkovMeasure& m, int order);

struct EntropyIntegral {
  double entropy = 0.0;
  double integral = 0.0;
};

EntropyIntegral entropy_and_integral(const MarkovMeasure& m, const LocallyConstantPotential& pot);

/// H_mu(P_n) = -sum over n-words of mu[w] log mu[w], exact via the chain rule
/// for order-k Markov chains. n <= 20.
double block_entropy(const MarkovMeasure& m, int n);

struct GibbsPoint {
  double t = 0.0;
  double pressure = 0.0;
  double c_lo = 1.0;  // min over words of mu[w] / exp(S_n(t phi)(w) - n p)
  double c_hi = 1.0;  // max of the same ratio
  double log_c = 0.0;  // log max(c_hi, 1/c_lo), the two-sided Gibbs constant
  double entropy = 0.0;
  std::vector<double> block_entropy_defect;  // |H(P_n) - n h| for n = 1..max_word_length
};

struct GibbsReport {
  int max_word_length = 0;
  std::vector<GibbsPoint> points;
  double fit_a = 0.0;  // log C(t) ~ a + b|t|
  double fit_b = 0.0;
  double fit_residual = 0.0;  // RMS
};

GibbsReport gibbs_report(const LocallyConstantPotential& pot, std::span<const double> t_grid, int max_word_length);

struct CurveRow {
  double t = 0.0;
  double pressure = 0.0;
  double enclosure_halfwidth = 0.0;
  double entropy = 0.0;
  double integral = 0.0;
};

/// Pressure with entropy and integral of the equilibrium state at t.
CurveRow pressure_point(const LocallyConstantPotential& pot, double t, const PressureOptions& options = {});

/// Evaluates pressure_point over the grid on `threads` workers; rows come
/// back in grid order.
std::vector<CurveRow> pressure_curve(const LocallyConstantPotential& pot, std::span<const double> ts,
                                     int threads = 1, const PressureOptions& options = {});

/// Prepared engine for repeated evaluation at many t: the word graph for
/// the transfer engine, or the renewal model for deep distance potentials.
/// All methods are const and safe to call concurrently.
class PressureSolver {
 public:
  explicit PressureSolver(const LocallyConstantPotential& pot, const PressureOptions& options = {});

  PressureEngine engine() const { return engine_; }
  const LocallyConstantPotential& potential() const { return pot_; }
  const WordGraph* graph() const { return graph_ ? &*graph_ : nullptr; }
  const RenewalModel* renewal() const { return model_ ? &*model_ : nullptr; }

  PressureResult pressure(double t) const;
  CurveRow point(double t) const;
  /// Requires the transfer engine.
  MarkovMeasure equilibrium(double t) const;
  /// Pressure minus t times the table maximum, without cancellation in the
  /// renewal engine.
  double excess(double t) const;

 private:
  LocallyConstantPotential pot_;
  PressureOptions options_;
  PressureEngine engine_;
  std::optional<WordGraph> graph_;
  std::optional<RenewalModel> model_;
};

/// t_min, t_min + step, ..., t_max with `steps` points.
std::vector<double> uniform_grid(double t_min, double t_max, int steps);

}  // namespace thermoform

#endif  // THERMOFORM_PRESSURE_HPP
