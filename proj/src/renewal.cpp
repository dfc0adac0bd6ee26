#include "thermoform/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "thermoform/error.hpp"
#include "thermoform/graph.hpp"

namespace thermoform {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

int background_symbol(const LocallyConstantPotential& pot) {
  return pot.spec().variant == PotentialVariant::DistOrbit ? pot.spec().orbit.front() : 0;
}

// Weighted averages l^T (K o X) r / l^T K r for the two edge functionals the
// root finder needs.
struct Moments {
  double mean_gap = 0.0;     // E[s * effective gap]
  double mean_excess = 0.0;  // E[block excess]
};

}  // namespace

bool RenewalModel::applicable(const LocallyConstantPotential& pot) {
  const auto& spec = pot.spec();
  if (!pot.sft().is_full_shift() || pot.sft().alphabet_size() < 2) return false;
  if (spec.variant == PotentialVariant::DistSunny) return true;
  return spec.variant == PotentialVariant::DistOrbit && spec.orbit.size() == 1;
}

RenewalModel::RenewalModel(const LocallyConstantPotential& pot) {
  if (!applicable(pot)) {
    throw Error(ErrorCode::InvalidArgument, "renewal engine needs dist-sunny or dist-orbit around a fixed point on a full shift");
  }
  const int k = pot.sft().alphabet_size();
  const int depth = pot.depth();
  const int r = (depth - 1) / 2;
  radius_ = r;
  log_multiplicity_ = std::log(static_cast<double>(k - 1));
  const int z = background_symbol(pot);
  const int mark = z == 0 ? 1 : 0;
  const int cap = r + 1;
  const int gcap = 2 * r + 2;

  Word window(static_cast<std::size_t>(depth), z);
  far_ = pot.value(window);

  // F(c, g, c') minus g * far, for marks at -c, 0, g, g + c'.
  auto block_excess = [&](int c, int g, int cn) {
    double s = 0.0;
    for (int j = 0; j < g; ++j) {
      for (int o = -r; o <= r; ++o) {
        const int x = j + o;
        window[static_cast<std::size_t>(o + r)] = (x == -c || x == 0 || x == g || x == g + cn) ? mark : z;
      }
      s += pot.value(window) - far_;
    }
    return s;
  };

  // State (c, g): c = capped previous gap in 1..cap, g = current gap class in
  // 1..gcap (gcap stands for every gap >= gcap).
  auto state = [&](int c, int g) { return (c - 1) * gcap + (g - 1); };
  state_cap_.resize(static_cast<std::size_t>(cap * gcap));
  for (int c = 1; c <= cap; ++c)
    for (int g = 1; g <= gcap; ++g) state_cap_[static_cast<std::size_t>(state(c, g))] = c;

  std::vector<double> excess(static_cast<std::size_t>(cap * gcap * cap));
  for (int c = 1; c <= cap; ++c)
    for (int g = 1; g <= gcap; ++g)
      for (int cn = 1; cn <= cap; ++cn)
        excess[static_cast<std::size_t>(((c - 1) * gcap + (g - 1)) * cap + (cn - 1))] = block_excess(c, g, cn);

  for (int c = 1; c <= cap; ++c)
    for (int g = 1; g <= gcap; ++g) {
      const int next_c = std::min(g, cap);
      for (int g2 = 1; g2 <= gcap; ++g2) {
        const int cn = std::min(g2, cap);
        edges_.push_back({state(c, g), state(next_c, g2),
                          excess[static_cast<std::size_t>(((c - 1) * gcap + (g - 1)) * cap + (cn - 1))], g, g == gcap});
      }
    }
}

namespace {

struct RootResult {
  double log_root = 0.0;  // u = log s
  double error = 0.0;     // absolute error in s
  Moments moments;        // mean_gap holds E[s * effective gap]
};

// -log(1 - e^{-s}) with s = e^u, valid when s underflows.
double tail_term(double u) { return u < -30 ? -u + 0.5 * std::exp(u) : -std::log(-std::expm1(-std::exp(u))); }

// s / (e^s - 1), the tail's contribution to s * effective gap beyond the first.
double tail_scaled_gap(double u) { return u < -30 ? 1.0 - 0.5 * std::exp(u) : std::exp(u) / std::expm1(std::exp(u)); }

// Solves log rho(K(s)) = 0 for s > 0, where edge e carries
//   log w_e(s) = lm + t * excess_e - s * gap_e - [tail_e] log(1 - e^-s).
// Works in u = log s so that exponentially small roots keep full relative
// precision.
template <class EdgeRange>
RootResult renewal_root(const EdgeRange& edges, int n, double lm, double t, const PerronOptions& opts) {
  auto build = [&](double u) {
    LogMatrix m(n);
    const double s = std::exp(u);
    const double tail = tail_term(u);
    for (const auto& e : edges) m.add(e.from, e.to, lm + t * e.excess_sum - s * e.gap + (e.tail ? tail : 0.0));
    return m;
  };
  std::vector<double> warm;
  auto lambda = [&](double u) {
    PerronOptions o = opts;
    o.start = warm;
    auto r = perron(build(u), o);
    warm = std::move(r.log_vector);
    return r.log_root;
  };

  // Bracket; Lambda decreases in u.
  double u_lo, u_hi;
  if (lambda(0.0) > 0) {
    u_lo = 0.0;
    u_hi = 1.0;
    while (lambda(u_hi) > 0) {
      u_lo = u_hi;
      u_hi += 1.0;
      if (u_hi > 30) throw Error(ErrorCode::NotConverged, "renewal root bracket diverged upwards");
    }
  } else {
    u_hi = 0.0;
    u_lo = -1.0;
    while (lambda(u_lo) <= 0) {
      u_hi = u_lo;
      u_lo *= 2;
      if (u_lo < -1e6) throw Error(ErrorCode::NotConverged, "renewal root bracket diverged towards 0");
    }
  }

  RootResult res;
  double u = 0.5 * (u_lo + u_hi);
  std::vector<double> right_start = warm, left_start;
  for (int it = 0; it < 300; ++it) {
    const double s = std::exp(u);
    LogMatrix m = build(u);
    PerronOptions ro = opts, lo = opts;
    ro.start = right_start;
    lo.start = left_start;
    PerronResult right = perron(m, ro);
    PerronResult left = perron_left(m, lo);
    right_start = right.log_vector;
    left_start = left.log_vector;
    const double f = right.log_root;
    if (f > 0) u_lo = u;
    else u_hi = u;

    // Moments of the edge functionals under l^T (K o .) r.
    double top = kNegInf;
    std::vector<double> lw;
    lw.reserve(edges.size());
    const double tail = tail_term(u);
    const double tail_gap = tail_scaled_gap(u);
    for (const auto& e : edges) {
      const double w = left.log_vector[static_cast<std::size_t>(e.from)] + lm + t * e.excess_sum - s * e.gap +
                       (e.tail ? tail : 0.0) + right.log_vector[static_cast<std::size_t>(e.to)];
      lw.push_back(w);
      top = std::max(top, w);
    }
    double z = 0.0, zg = 0.0, zf = 0.0;
    std::size_t i = 0;
    for (const auto& e : edges) {
      const double w = std::exp(lw[i++] - top);
      z += w;
      zg += w * (s * e.gap + (e.tail ? tail_gap : 0.0));
      zf += w * e.excess_sum;
    }
    res.moments.mean_gap = zg / z;
    res.moments.mean_excess = zf / z;
    res.log_root = u;
    const double slope = -res.moments.mean_gap;  // dLambda/du
    const double noise = 0.5 * (right.log_upper - right.log_lower);
    double next = u - f / slope;
    const bool newton_ok = next > u_lo && next < u_hi;
    if (!newton_ok) next = 0.5 * (u_lo + u_hi);
    const double step = std::abs(next - u);
    const double scale = std::max(1.0, std::abs(u));
    if (std::abs(f) <= noise || step <= 1e-15 * scale || (newton_ok && step <= 1e-14 * scale)) {
      if (newton_ok) res.log_root = next;
      // Error in u from the eigenvalue bracket, converted to s.
      res.error = std::exp(res.log_root) * (noise / res.moments.mean_gap + step);
      return res;
    }
    u = next;
  }
  throw Error(ErrorCode::NotConverged, "renewal root iteration did not converge");
}

}  // namespace

RenewalResult RenewalModel::solve(double t, const PerronOptions& options) const {
  auto root = renewal_root(edges_, states(), log_multiplicity_, t, options);
  RenewalResult r;
  r.log_excess = root.log_root;
  r.excess = std::exp(root.log_root);
  r.pressure = r.excess + t * far_;
  r.integral = far_ + r.excess * root.moments.mean_excess / root.moments.mean_gap;
  r.entropy = r.pressure - t * r.integral;
  r.numeric_error = root.error;
  return r;
}

double RenewalModel::ground_entropy() const {
  // Edges whose block never leaves the far value.
  std::vector<Edge> tight;
  for (const auto& e : edges_)
    if (e.excess_sum == 0.0) tight.push_back(e);
  if (tight.empty()) return 0.0;
  std::vector<std::vector<int>> succ(static_cast<std::size_t>(states()));
  for (const auto& e : tight) succ[static_cast<std::size_t>(e.from)].push_back(e.to);
  std::vector<int> comp;
  const int nc = strongly_connected_components(succ, comp);
  double best = 0.0;
  for (int c = 0; c < nc; ++c) {
    if (!component_has_cycle(succ, comp, c)) continue;
    std::vector<int> relabel(static_cast<std::size_t>(states()), -1);
    int n = 0;
    for (int v = 0; v < states(); ++v)
      if (comp[static_cast<std::size_t>(v)] == c) relabel[static_cast<std::size_t>(v)] = n++;
    std::vector<Edge> inside;
    for (const auto& e : tight) {
      const int a = relabel[static_cast<std::size_t>(e.from)], b = relabel[static_cast<std::size_t>(e.to)];
      if (a >= 0 && b >= 0) inside.push_back({a, b, 0.0, e.gap, e.tail});
    }
    best = std::max(best, std::exp(renewal_root(inside, n, log_multiplicity_, 0.0, PerronOptions{}).log_root));
  }
  return best;
}

}  // namespace thermoform
