#include "thermoform/ergopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thermoform/error.hpp"
#include "thermoform/graph.hpp"

namespace thermoform {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTolerance = 1e-9;
// Relative accuracy assumed for cancellation-free gaps.
constexpr double kGapRelativeError = 1e-10;

int find_state(const std::vector<Word>& states, std::span<const int> w) {
  auto it = std::lower_bound(states.begin(), states.end(), w, [](const Word& a, std::span<const int> b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  });
  if (it == states.end() || !std::equal(it->begin(), it->end(), w.begin(), w.end())) return -1;
  return static_cast<int>(it - states.begin());
}

void walk_step(const WeightedDigraph& g, const std::vector<double>& d, std::vector<double>& next) {
  std::fill(next.begin(), next.end(), kNegInf);
  for (const auto& e : g.edges) {
    const double src = d[static_cast<std::size_t>(e.from)];
    if (src == kNegInf) continue;
    double& dst = next[static_cast<std::size_t>(e.to)];
    dst = std::max(dst, src + e.weight);
  }
}

double log_perron_adjacency(const std::vector<std::vector<int>>& succ, const std::vector<int>& members) {
  std::vector<int> relabel(succ.size(), -1);
  for (std::size_t i = 0; i < members.size(); ++i) relabel[static_cast<std::size_t>(members[i])] = static_cast<int>(i);
  LogMatrix m(static_cast<int>(members.size()));
  for (std::size_t i = 0; i < members.size(); ++i)
    for (int v : succ[static_cast<std::size_t>(members[i])])
      if (relabel[static_cast<std::size_t>(v)] >= 0) m.add(static_cast<int>(i), relabel[static_cast<std::size_t>(v)], 0.0);
  return perron(m).log_root;
}

double log1p_exp_log(double y) {
  // log(log(1 + e^y)) without underflow for very negative y.
  if (y < -30) return y - 0.5 * std::exp(y);
  return std::log(std::log1p(std::exp(y)));
}

}  // namespace

std::optional<double> max_cycle_mean(const WeightedDigraph& g) {
  const int n = g.n;
  if (n == 0) return std::nullopt;
  const auto un = static_cast<std::size_t>(n);
  // D_k(v): best weight of a walk with exactly k edges ending at v, any start.
  std::vector<double> d(un, 0.0), next(un);
  for (int k = 0; k < n; ++k) {
    walk_step(g, d, next);
    d.swap(next);
  }
  const std::vector<double> dn = d;
  if (std::all_of(dn.begin(), dn.end(), [](double v) { return v == kNegInf; })) return std::nullopt;

  std::vector<double> worst(un, kInf);
  std::fill(d.begin(), d.end(), 0.0);
  for (int k = 0; k < n; ++k) {
    for (std::size_t v = 0; v < un; ++v) {
      if (dn[v] == kNegInf || d[v] == kNegInf) continue;
      worst[v] = std::min(worst[v], (dn[v] - d[v]) / (n - k));
    }
    walk_step(g, d, next);
    d.swap(next);
  }
  double best = kNegInf;
  for (std::size_t v = 0; v < un; ++v)
    if (dn[v] != kNegInf) best = std::max(best, worst[v]);
  return best;
}

WeightedDigraph potential_digraph(const WordGraph& g) {
  WeightedDigraph d;
  d.n = g.size();
  for (int u = 0; u < g.size(); ++u)
    for (int v : g.succ[static_cast<std::size_t>(u)]) d.edges.push_back({u, v, g.value[static_cast<std::size_t>(u)]});
  return d;
}

double max_cycle_mean(const LocallyConstantPotential& pot) {
  return *max_cycle_mean(potential_digraph(build_word_graph(pot)));
}

double min_cycle_mean(const LocallyConstantPotential& pot) {
  WeightedDigraph d = potential_digraph(build_word_graph(pot));
  for (auto& e : d.edges) e.weight = -e.weight;
  return -*max_cycle_mean(d);
}

AsymptoteData maxplus_normalize(const LocallyConstantPotential& pot) {
  const WordGraph g = build_word_graph(pot);
  WeightedDigraph dg = potential_digraph(g);
  AsymptoteData a;
  a.beta = *max_cycle_mean(dg);
  for (auto& e : dg.edges) e.weight = -e.weight;
  a.a_min = -*max_cycle_mean(dg);
  a.gamma = a.beta - a.a_min;

  const auto n = static_cast<std::size_t>(g.size());
  const double scale = std::max({1.0, std::abs(a.beta), std::abs(a.a_min)});
  const double tol = 1e-12 * scale;

  // Difference constraints, each as (from, to, cost): U[to] <= U[from] + cost.
  struct Constraint {
    int from, to;
    double cost;
  };
  auto solve = [&](const std::vector<Constraint>& cs, std::vector<double>& u) {
    u.assign(n, 0.0);
    for (std::size_t sweep = 0; sweep <= n + 1; ++sweep) {
      bool changed = false;
      for (const auto& c : cs) {
        const double cand = u[static_cast<std::size_t>(c.from)] + c.cost;
        if (cand < u[static_cast<std::size_t>(c.to)] - tol) {
          u[static_cast<std::size_t>(c.to)] = cand;
          changed = true;
        }
      }
      if (!changed) return true;
    }
    return false;
  };
  std::vector<Constraint> upper, both;
  for (int u = 0; u < g.size(); ++u)
    for (int v : g.succ[static_cast<std::size_t>(u)]) {
      const double w = g.value[static_cast<std::size_t>(u)];
      // w + U[u] - U[v] <= beta  <=>  U[u] <= U[v] + (beta - w)
      upper.push_back({v, u, a.beta - w});
      both.push_back({v, u, a.beta - w});
      // w + U[u] - U[v] >= A  <=>  U[v] <= U[u] + (w - A)
      both.push_back({u, v, w - a.a_min});
    }
  a.bilateral = solve(both, a.value_function);
  if (!a.bilateral && !solve(upper, a.value_function)) {
    throw Error(ErrorCode::NotConverged, "max-plus normalisation did not converge");
  }

  a.corrected_min = kInf;
  a.corrected_max = kNegInf;
  std::vector<std::vector<int>> tight_all(n);
  for (int u = 0; u < g.size(); ++u)
    for (int v : g.succ[static_cast<std::size_t>(u)]) {
      const double c = g.value[static_cast<std::size_t>(u)] + a.value_function[static_cast<std::size_t>(u)] -
                       a.value_function[static_cast<std::size_t>(v)];
      a.corrected_min = std::min(a.corrected_min, c);
      a.corrected_max = std::max(a.corrected_max, c);
      if (c >= a.beta - kTieTolerance) tight_all[static_cast<std::size_t>(u)].push_back(v);
    }

  std::vector<int> comp;
  const int nc = strongly_connected_components(tight_all, comp);
  a.tight.assign(n, {});
  a.b = kNegInf;
  for (int c = 0; c < nc; ++c) {
    if (!component_has_cycle(tight_all, comp, c)) continue;
    std::vector<int> members;
    for (std::size_t v = 0; v < n; ++v)
      if (comp[v] == c) members.push_back(static_cast<int>(v));
    for (int u : members)
      for (int v : tight_all[static_cast<std::size_t>(u)])
        if (comp[static_cast<std::size_t>(v)] == c) a.tight[static_cast<std::size_t>(u)].push_back(v);
    const double h = log_perron_adjacency(a.tight, members);
    a.components.push_back(std::move(members));
    a.component_entropy.push_back(h);
    if (h > a.b) {
      a.b = h;
      a.best_component = static_cast<int>(a.components.size()) - 1;
    }
  }
  if (a.components.empty()) throw Error(ErrorCode::NotConverged, "max-plus normalisation found no tight cycle");
  a.b = std::max(a.b, 0.0);
  return a;
}

double intended_ground_entropy(const LocallyConstantPotential& pot) {
  const auto& spec = pot.spec();
  if (spec.variant != PotentialVariant::DistSubshift) return 0.0;
  const std::vector<Word> blocks = trimmed_blocks(spec.blocks);
  std::vector<Word> states;
  for (const Word& b : blocks) {
    states.emplace_back(b.begin(), b.end() - 1);
    states.emplace_back(b.begin() + 1, b.end());
  }
  std::sort(states.begin(), states.end());
  states.erase(std::unique(states.begin(), states.end()), states.end());
  std::vector<std::vector<int>> succ(states.size());
  for (const Word& b : blocks) {
    const int u = find_state(states, std::span<const int>(b).subspan(0, b.size() - 1));
    const int v = find_state(states, std::span<const int>(b).subspan(1));
    succ[static_cast<std::size_t>(u)].push_back(v);
  }
  std::vector<int> comp;
  const int nc = strongly_connected_components(succ, comp);
  double best = 0.0;
  for (int c = 0; c < nc; ++c) {
    if (!component_has_cycle(succ, comp, c)) continue;
    std::vector<int> members;
    for (std::size_t v = 0; v < states.size(); ++v)
      if (comp[v] == c) members.push_back(static_cast<int>(v));
    best = std::max(best, log_perron_adjacency(succ, members));
  }
  return best;
}

GapSolver::GapSolver(const LocallyConstantPotential& pot, AsymptoteMode mode, const PressureOptions& options)
    : pot_(pot), mode_(mode), solver_(pot, options) {
  if (mode_ == AsymptoteMode::Intended) {
    if (!pot_.spec().is_distance()) {
      throw Error(ErrorCode::InvalidArgument, "intended asymptote is defined for distance potentials only");
    }
    asym_.source = "intended";
    asym_.beta = 0.0;
    asym_.b = intended_ground_entropy(pot_);
    asym_.a_min = solver_.graph() ? min_cycle_mean(pot_) : pot_.min_value();
    asym_.gamma = asym_.beta - asym_.a_min;
    return;
  }
  if (const RenewalModel* model = solver_.renewal()) {
    asym_.source = "renewal";
    asym_.beta = model->far_value();
    asym_.b = model->ground_entropy();
    asym_.a_min = pot_.min_value();
    asym_.gamma = asym_.beta - asym_.a_min;
    return;
  }
  asym_ = maxplus_normalize(pot_);
  const WordGraph& g = *solver_.graph();
  corrected_.resize(static_cast<std::size_t>(g.size()));
  for (int u = 0; u < g.size(); ++u)
    for (int v : g.succ[static_cast<std::size_t>(u)])
      corrected_[static_cast<std::size_t>(u)].push_back(g.value[static_cast<std::size_t>(u)] +
                                                         asym_.value_function[static_cast<std::size_t>(u)] -
                                                         asym_.value_function[static_cast<std::size_t>(v)]);
}

double GapSolver::gap_direct(double t) const {
  return solver_.pressure(t).value - (asym_.b + asym_.beta * t);
}

GapPoint GapSolver::gap(double t) const {
  GapPoint p;
  p.t = t;
  if (mode_ == AsymptoteMode::Intended) {
    auto r = solver_.pressure(t);
    p.gap = r.value - (asym_.b + asym_.beta * t);
    p.log_gap = p.gap > 0 ? std::log(p.gap) : kNegInf;
    p.enclosure = r.enclosure_halfwidth;
    return p;
  }
  if (const RenewalModel* model = solver_.renewal()) {
    auto r = model->solve(t, PerronOptions{});
    if (asym_.b == 0.0) {
      p.gap = r.excess;
      p.log_gap = r.log_excess;
    } else {
      p.gap = r.excess - asym_.b;
      p.log_gap = p.gap > 0 ? std::log(p.gap) : kNegInf;
    }
    p.enclosure = r.numeric_error;
    return p;
  }

  const WordGraph& g = *solver_.graph();
  const auto n = static_cast<std::size_t>(g.size());
  const auto& members = asym_.components[static_cast<std::size_t>(asym_.best_component)];
  std::vector<char> in_t(n, 0);
  for (int u : members) in_t[static_cast<std::size_t>(u)] = 1;
  auto is_tight = [&](int u, int v) {
    const auto& row = asym_.tight[static_cast<std::size_t>(u)];
    return std::find(row.begin(), row.end(), v) != row.end();
  };

  LogMatrix m(g.size());
  for (int u = 0; u < g.size(); ++u) {
    const auto& succ = g.succ[static_cast<std::size_t>(u)];
    for (std::size_t i = 0; i < succ.size(); ++i) {
      const double lw = is_tight(u, succ[i]) ? 0.0 : t * (corrected_[static_cast<std::size_t>(u)][i] - asym_.beta);
      m.add(u, succ[i], lw);
    }
  }
  const PerronResult x = perron(m);

  // Left Perron vector of the tight adjacency restricted to T.
  std::vector<int> relabel(n, -1);
  for (std::size_t i = 0; i < members.size(); ++i) relabel[static_cast<std::size_t>(members[i])] = static_cast<int>(i);
  LogMatrix bt(static_cast<int>(members.size()));
  for (std::size_t i = 0; i < members.size(); ++i)
    for (int v : asym_.tight[static_cast<std::size_t>(members[i])])
      if (relabel[static_cast<std::size_t>(v)] >= 0) bt.add(static_cast<int>(i), relabel[static_cast<std::size_t>(v)], 0.0);
  const PerronResult l = perron_left(bt);
  const double log_rho0 = l.log_root;

  std::vector<double> num, den;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const int u = members[i];
    const double lu = l.log_vector[i];
    den.push_back(lu + x.log_vector[static_cast<std::size_t>(u)]);
    const auto& succ = g.succ[static_cast<std::size_t>(u)];
    for (std::size_t j = 0; j < succ.size(); ++j) {
      const int v = succ[j];
      if (in_t[static_cast<std::size_t>(v)] && is_tight(u, v)) continue;
      num.push_back(lu + t * (corrected_[static_cast<std::size_t>(u)][j] - asym_.beta) + x.log_vector[static_cast<std::size_t>(v)]);
    }
  }
  if (num.empty()) {
    p.gap = 0.0;
    p.log_gap = kNegInf;
    p.enclosure = 0.0;
    return p;
  }
  // y = log((lambda - rho0) / rho0); the tight component's own rounding in
  // b is absorbed by using its computed root.
  const double y = log_sum_exp(num) - log_sum_exp(den) - log_rho0;
  p.gap = std::log1p(std::exp(y)) + (log_rho0 - asym_.b);
  p.log_gap = log1p_exp_log(y);
  p.enclosure = kGapRelativeError * std::abs(p.gap) + std::abs(log_rho0 - asym_.b);
  return p;
}

GapPoint gap_infinity(const LocallyConstantPotential& pot, double t, AsymptoteMode mode) {
  return GapSolver(pot, mode).gap(t);
}

TangentGap tangent_gap(const LocallyConstantPotential& pot, double t, double s) {
  PressureSolver solver(pot);
  const CurveRow row = solver.point(t);
  const PressureResult ps = solver.pressure(s);
  TangentGap g;
  g.t = t;
  g.s = s;
  g.gap = ps.value - (row.entropy + s * row.integral);
  // Entropy and integral inherit the eigenvector accuracy.
  g.enclosure = ps.enclosure_halfwidth + row.enclosure_halfwidth + 1e-12 * (1 + std::abs(s)) +
                2 * std::abs(s - t) * pot.truncation_error();
  return g;
}

ConvexitySolver::ConvexitySolver(const LocallyConstantPotential& pot, const PressureOptions& options) {
  plus_ = std::make_unique<GapSolver>(pot, AsymptoteMode::Table, options);
  if (plus_->pressure_solver().graph() && pot.materialized()) {
    minus_ = std::make_unique<GapSolver>(pot.affine(-1.0, 0.0), AsymptoteMode::Table, options);
  }
  const auto& a = plus_->asymptote();
  constant_ = a.gamma <= 1e-12 * std::max(1.0, std::abs(a.beta));
}

ConvexityPoint ConvexitySolver::gap(double t, double h) const {
  if (!(h > 0)) throw Error(ErrorCode::InvalidArgument, "convexity_gap needs h > 0");
  ConvexityPoint best;
  best.t = t;
  best.h = h;
  const double trunc = plus_->pressure_solver().potential().truncation_error();
  const double trunc_slack = 2 * (std::abs(t) + h) * trunc;
  if (constant_) {
    best.gap = 0.0;
    best.enclosure = trunc_slack;
    best.method = "cohomologous-to-constant";
    return best;
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double best_err = kInf;
  auto consider = [&](double value, double err, const char* method) {
    if (err < best_err) {
      best_err = err;
      best.gap = value;
      best.method = method;
    }
  };

  {
    const auto& ps = plus_->pressure_solver();
    const auto a = ps.pressure(t + h), b = ps.pressure(t - h), c = ps.pressure(t);
    const double err = 0.5 * (a.numeric_error + b.numeric_error) + c.numeric_error +
                       4 * eps * (std::abs(a.value) + std::abs(b.value) + 2 * std::abs(c.value));
    consider(0.5 * (a.value + b.value) - c.value, err, "direct");
  }
  auto from_gaps = [&](const GapSolver& gs, double tt, const char* method) {
    const GapPoint a = gs.gap(tt + h), b = gs.gap(tt - h), c = gs.gap(tt);
    const double err = a.enclosure + b.enclosure + c.enclosure +
                       4 * eps * (std::abs(a.gap) + std::abs(b.gap) + 2 * std::abs(c.gap));
    consider(0.5 * (a.gap + b.gap) - c.gap, err, method);
  };
  if (t - h >= 0) from_gaps(*plus_, t, "gap");
  if (minus_ && t + h <= 0) from_gaps(*minus_, -t, "reflected-gap");
  best.enclosure = best_err + trunc_slack;
  return best;
}

ConvexityPoint convexity_gap(const LocallyConstantPotential& pot, double t, double h) {
  return ConvexitySolver(pot).gap(t, h);
}

DecayFit fit_decay(std::span<const GapPoint> grid) {
  DecayFit fit;
  fit.grid.assign(grid.begin(), grid.end());
  std::vector<const GapPoint*> use;
  for (const auto& p : grid)
    if (p.gap > 0 && p.gap > 10 * p.enclosure && std::isfinite(p.log_gap)) use.push_back(&p);
  std::sort(use.begin(), use.end(), [](const GapPoint* a, const GapPoint* b) { return a->t < b->t; });
  fit.usable = static_cast<int>(use.size());
  if (use.size() < 2) return fit;

  // The log-linear fit runs over the upper half of the usable t-range, where
  // the asymptotic regime applies.
  const double t_mid = 0.5 * (use.front()->t + use.back()->t);
  std::vector<const GapPoint*> tail;
  for (const auto* p : use)
    if (p->t >= t_mid) tail.push_back(p);
  if (tail.size() < 4) tail = use;

  const auto m = static_cast<double>(tail.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto* p : tail) {
    const double y = -p->log_gap;
    sx += p->t;
    sy += y;
    sxx += p->t * p->t;
    sxy += p->t * y;
  }
  const double det = m * sxx - sx * sx;
  if (det <= 0) return fit;
  fit.rate = (m * sxy - sx * sy) / det;
  const double intercept = (sy - fit.rate * sx) / m;
  fit.prefactor = std::exp(-intercept);
  double ss = 0.0;
  for (const auto* p : tail) {
    const double e = -p->log_gap - (fit.rate * p->t + intercept);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / m);
  if (use.size() < 8) return fit;

  // A nearly flat curve fits a line too; exponential decay must show at
  // least one e-fold across the window.
  const double span = tail.back()->t - tail.front()->t;
  if (fit.residual < 0.05 && fit.rate > 0 && fit.rate * span >= 1.0) {
    fit.verdict = "exponential";
    return fit;
  }
  // -log(gap)/t over the top half of the usable grid.
  const std::size_t half = use.size() / 2;
  bool decreasing = true;
  double prev = kInf, first = 0.0, last = 0.0;
  for (std::size_t i = half; i < use.size(); ++i) {
    if (use[i]->t <= 0) {
      decreasing = false;
      break;
    }
    const double q = -use[i]->log_gap / use[i]->t;
    if (i == half) first = q;
    if (q > prev) decreasing = false;
    prev = q;
    last = q;
  }
  if (decreasing && last < first) fit.verdict = "sub-exponential";
  return fit;
}

ConvexityFit fit_convexity(std::span<const ConvexityPoint> points) {
  ConvexityFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& p : points) {
    if (!(p.gap > 0 && p.gap > 10 * p.enclosure)) continue;
    const double x = std::abs(p.t) / p.h, y = std::log(p.gap);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  fit.used = m;
  const double det = m * sxx - sx * sx;
  if (m < 2 || det <= 0) return fit;
  const double slope = (m * sxy - sx * sy) / det;
  const double intercept = (sy - slope * sx) / m;
  fit.c2 = -slope;
  fit.c1 = std::exp(intercept);
  double ss = 0;
  for (const auto& p : points) {
    if (!(p.gap > 0 && p.gap > 10 * p.enclosure)) continue;
    const double e = std::log(p.gap) - (intercept + slope * std::abs(p.t) / p.h);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / m);
  return fit;
}

HeavyLight heavy_light_words(const LocallyConstantPotential& pot, int length) {
  if (length < 1) throw Error(ErrorCode::InvalidArgument, "heavy_light_words: length must be positive");
  const AsymptoteData a = maxplus_normalize(pot);
  if (a.gamma <= 1e-9) {
    throw Error(ErrorCode::HypothesisViolated,
                "potential is cohomologous to a constant (gamma = 0): heavy and light words are undefined");
  }
  const WordGraph g = build_word_graph(pot);
  const Sft& sft = pot.sft();
  const int k = pot.depth();
  HeavyLight out;
  out.heavy_threshold = a.beta - a.gamma / 4;
  out.light_threshold = a.a_min + a.gamma / 4;

  auto corrected_sum = [&](const Word& x, int m) {
    // S_m of phi + U o state - U o next state over x[0, m + k).
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += pot.value(std::span<const int>(x).subspan(static_cast<std::size_t>(i), static_cast<std::size_t>(k)));
    const int first = find_state(g.states, std::span<const int>(x).subspan(0, static_cast<std::size_t>(k)));
    const int last = find_state(g.states, std::span<const int>(x).subspan(static_cast<std::size_t>(m), static_cast<std::size_t>(k)));
    return s + a.value_function[static_cast<std::size_t>(first)] - a.value_function[static_cast<std::size_t>(last)];
  };

  for (const Word& w : enumerate_words(sft, length)) {
    double lo = kInf, hi = kNegInf;
    // Enumerate admissible continuations of length k.
    Word x = w;
    x.resize(static_cast<std::size_t>(length + k));
    std::vector<int> pos(static_cast<std::size_t>(k), -1);
    int d = 0;
    while (d >= 0) {
      int& s = pos[static_cast<std::size_t>(d)];
      ++s;
      const int prev = x[static_cast<std::size_t>(length + d - 1)];
      while (s < sft.alphabet_size() && !sft.allowed(prev, s)) ++s;
      if (s >= sft.alphabet_size()) {
        s = -1;
        --d;
        continue;
      }
      x[static_cast<std::size_t>(length + d)] = s;
      if (d == k - 1) {
        const double v = corrected_sum(x, length);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      } else {
        ++d;
      }
    }
    if (lo > length * out.heavy_threshold) out.heavy.push_back(w);
    if (hi < length * out.light_threshold) out.light.push_back(w);
  }
  if (out.heavy.empty() || out.light.empty()) {
    throw Error(ErrorCode::EmptyResult, "no " + std::string(out.heavy.empty() ? "heavy" : "light") +
                                            " words of length " + std::to_string(length) + "; try a longer length");
  }
  return out;
}

}  // namespace thermoform
