#ifndef THERMOFORM_ERGOPT_HPP
#define THERMOFORM_ERGOPT_HPP

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "thermoform/potential.hpp"
#include "thermoform/pressure.hpp"

namespace thermoform {

/// Directed graph with weighted edges, for cycle-mean computations.
struct WeightedDigraph {
  struct Edge {
    int from, to;
    double weight;
  };
  int n = 0;
  std::vector<Edge> edges;
};

/// Maximum mean weight over all cycles (Karp), or nullopt when the graph is
/// acyclic. Uses O(n) memory by recomputing the walk table in a second pass.
std::optional<double> max_cycle_mean(const WeightedDigraph& g);

/// The word graph of pot with weight value[u] on every edge leaving u.
WeightedDigraph potential_digraph(const WordGraph& g);

/// B(phi) and A(phi) on the word graph of the potential's table.
double max_cycle_mean(const LocallyConstantPotential& pot);
double min_cycle_mean(const LocallyConstantPotential& pot);

struct AsymptoteData {
  double beta = 0.0;   // B(phi)
  double a_min = 0.0;  // A(phi)
  double gamma = 0.0;  // B - A
  double b = 0.0;      // ground-state entropy
  /// Value function U on word-graph states: the corrected potential on the
  /// edge u -> v is value[u] + U[u] - U[v].
  std::vector<double> value_function;
  double corrected_min = 0.0;
  double corrected_max = 0.0;
  /// True when U also keeps the corrected potential above A(phi).
  bool bilateral = false;
  /// Tight edges (corrected value within 1e-9 of beta), pruned to the
  /// strongly connected components that carry a cycle.
  std::vector<std::vector<int>> tight;
  std::vector<std::vector<int>> components;
  std::vector<double> component_entropy;
  int best_component = -1;
  /// "table" for the materialised table, "renewal" for the truncated table
  /// of a deep distance potential, "intended" for the untruncated distance
  /// potential.
  std::string source = "table";
};

AsymptoteData maxplus_normalize(const LocallyConstantPotential& pot);

enum class AsymptoteMode { Table, Intended };

struct GapPoint {
  double t = 0.0;
  double gap = 0.0;
  double log_gap = 0.0;  // log(gap), finite even when gap underflows
  double enclosure = 0.0;
};

/// g_inf(t) = p(t) - (b + beta t).
///
/// Table mode uses the asymptote of the table itself. On the transfer
/// engine the gap is computed without cancellation: with the normalised
/// matrix M = exp(t(phi~ - beta)), tight edges equal to 1 exactly, right
/// Perron vector x of M and left Perron vector l of the tight component T
/// of maximal entropy (root rho0 = e^b),
///   lambda - rho0 = sum_{u in T} l_u sum_{non-tight or leaving} M_uv x_v / sum_{u in T} l_u x_u,
/// a sum of positive terms. Intended mode compares a distance potential's
/// pressure with the asymptote of the untruncated potential (beta = 0,
/// b = h_top(S)) and carries the truncation enclosure.
class GapSolver {
 public:
  explicit GapSolver(const LocallyConstantPotential& pot, AsymptoteMode mode = AsymptoteMode::Table,
                     const PressureOptions& options = {});

  const AsymptoteData& asymptote() const { return asym_; }
  const PressureSolver& pressure_solver() const { return solver_; }
  AsymptoteMode mode() const { return mode_; }
  GapPoint gap(double t) const;
  /// p(t) - (b + beta t) by direct subtraction, for cross-checks.
  double gap_direct(double t) const;

 private:
  LocallyConstantPotential pot_;
  AsymptoteMode mode_;
  PressureSolver solver_;
  AsymptoteData asym_;
  std::vector<std::vector<double>> corrected_;  // per edge, aligned with graph succ
};

GapPoint gap_infinity(const LocallyConstantPotential& pot, double t, AsymptoteMode mode = AsymptoteMode::Table);

/// g_t(s) = p(s) - (h(mu_t) + s * integral of phi against mu_t).
struct TangentGap {
  double t = 0.0, s = 0.0;
  double gap = 0.0;
  double enclosure = 0.0;
};
TangentGap tangent_gap(const LocallyConstantPotential& pot, double t, double s);

struct ConvexityPoint {
  double t = 0.0, h = 0.0;
  double gap = 0.0;
  double enclosure = 0.0;
  std::string method;  // "direct", "gap", "reflected-gap", "cohomologous-to-constant"
};

/// (p(t+h) + p(t-h))/2 - p(t). The linear part of p cancels exactly when the
/// second difference is taken on g_inf instead of p; for t < 0 the same is
/// done for -phi at -t. The representation with the smallest error estimate
/// is used; a potential cohomologous to a constant gives exactly 0.
class ConvexitySolver {
 public:
  explicit ConvexitySolver(const LocallyConstantPotential& pot, const PressureOptions& options = {});
  ConvexityPoint gap(double t, double h) const;
  bool cohomologous_to_constant() const { return constant_; }
  const AsymptoteData& asymptote() const { return plus_->asymptote(); }

 private:
  std::unique_ptr<GapSolver> plus_;
  std::unique_ptr<GapSolver> minus_;
  bool constant_ = false;
};

ConvexityPoint convexity_gap(const LocallyConstantPotential& pot, double t, double h);

struct DecayFit {
  std::vector<GapPoint> grid;
  int usable = 0;
  double rate = 0.0;       // C in gap ~ prefactor * exp(-C t)
  double prefactor = 0.0;
  double residual = 0.0;   // RMS of the log-linear fit over usable points
  std::string verdict = "indeterminate";  // exponential, sub-exponential, indeterminate
};

/// Least-squares fit of -log(gap) against t over points with gap above 10x
/// their enclosure, restricted to the upper half of their t-range.
/// "exponential" when the RMS residual is below 0.05, C > 0 and the fit
/// decays by at least one e-fold across that window; otherwise "sub-exponential" when -log(gap)/t decreases
/// monotonically across the top half of the usable grid; otherwise
/// "indeterminate" (also with fewer than 8 usable points).
DecayFit fit_decay(std::span<const GapPoint> grid);

struct ConvexityFit {
  double c1 = 0.0, c2 = 0.0;  // gap ~ c1 exp(-c2 |t| / h)
  double residual = 0.0;
  int used = 0;
};
ConvexityFit fit_convexity(std::span<const ConvexityPoint> points);

struct HeavyLight {
  std::vector<Word> heavy;
  std::vector<Word> light;
  double heavy_threshold = 0.0;  // per-symbol average
  double light_threshold = 0.0;
};

/// Words whose corrected Birkhoff average exceeds B - gamma/4 on the whole
/// cylinder (heavy), or stays below A + gamma/4 (light).
HeavyLight heavy_light_words(const LocallyConstantPotential& pot, int length);

/// Entropy of the subshift S behind a distance potential (0 for dist-orbit
/// and dist-sunny, h_top of the block subshift for dist-subshift).
double intended_ground_entropy(const LocallyConstantPotential& pot);

}  // namespace thermoform

#endif  // THERMOFORM_ERGOPT_HPP
