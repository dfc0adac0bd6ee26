#include "thermoform/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "thermoform/error.hpp"
#include "thermoform/parallel.hpp"

namespace thermoform {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

int find_state(const std::vector<Word>& states, std::span<const int> w) {
  auto it = std::lower_bound(states.begin(), states.end(), w,
                             [](const Word& a, std::span<const int> b) {
                               return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
                             });
  if (it == states.end() || !std::equal(it->begin(), it->end(), w.begin(), w.end())) return -1;
  return static_cast<int>(it - states.begin());
}

struct TransferSolution {
  PerronResult right;
  PerronResult left;
};

TransferSolution solve_transfer(const WordGraph& g, double t, const PerronOptions& opts, bool need_left) {
  LogMatrix m = transfer_matrix(g, t);
  TransferSolution s;
  s.right = perron(m, opts);
  if (need_left) s.left = perron_left(m, opts);
  return s;
}

MarkovMeasure measure_from_solution(const Sft& sft, const WordGraph& g, double t, const TransferSolution& s) {
  MarkovMeasure m(sft);
  m.order = g.depth;
  m.states = g.states;
  m.out.resize(g.states.size());
  const double lambda = s.right.log_root;
  const auto& r = s.right.log_vector;
  const auto& l = s.left.log_vector;
  std::vector<double> logs;
  for (int u = 0; u < g.size(); ++u) {
    logs.clear();
    for (int v : g.succ[static_cast<std::size_t>(u)])
      logs.push_back(t * g.value[static_cast<std::size_t>(u)] + r[static_cast<std::size_t>(v)] -
                     r[static_cast<std::size_t>(u)] - lambda);
    // Renormalise each row exactly; the eigenpair is only accurate to the
    // iteration tolerance.
    const double norm = log_sum_exp(logs);
    auto& row = m.out[static_cast<std::size_t>(u)];
    for (std::size_t i = 0; i < logs.size(); ++i) {
      const double lp = logs[i] - norm;
      row.push_back({g.succ[static_cast<std::size_t>(u)][i], std::exp(lp), lp});
    }
  }
  std::vector<double> logpi(g.states.size());
  for (std::size_t u = 0; u < logpi.size(); ++u) logpi[u] = l[u] + r[u];
  const double norm = log_sum_exp(logpi);
  m.stationary.resize(logpi.size());
  for (std::size_t u = 0; u < logpi.size(); ++u) m.stationary[u] = std::exp(logpi[u] - norm);
  std::ostringstream prov;
  prov.precision(17);
  prov << "equilibrium state at t=" << t;
  m.provenance = prov.str();
  return m;
}

double row_entropy(const std::vector<MarkovMeasure::Transition>& row) {
  double h = 0.0;
  for (const auto& tr : row)
    if (tr.prob > 0.0) h -= tr.prob * tr.log_prob;
  return h;
}

double entropy_rate(const MarkovMeasure& m) {
  double h = 0.0;
  for (std::size_t u = 0; u < m.states.size(); ++u) h += m.stationary[u] * row_entropy(m.out[u]);
  return h;
}

}  // namespace

std::size_t WordGraph::edges() const {
  std::size_t e = 0;
  for (const auto& s : succ) e += s.size();
  return e;
}

WordGraph build_word_graph(const LocallyConstantPotential& pot, std::size_t max_states) {
  const Sft& sft = pot.sft();
  WordGraph g;
  g.depth = pot.depth();
  const double count = word_count(sft, g.depth);
  if (count > static_cast<double>(max_states)) {
    std::ostringstream msg;
    msg << "too large: transfer matrix would have " << count << " states (budget " << max_states << ")";
    throw Error(ErrorCode::TooLarge, msg.str());
  }
  g.states = enumerate_words(sft, g.depth, max_states);
  g.succ.resize(g.states.size());
  g.value.resize(g.states.size());
  Word next(static_cast<std::size_t>(g.depth));
  for (std::size_t u = 0; u < g.states.size(); ++u) {
    const Word& w = g.states[u];
    g.value[u] = pot.value(w);
    std::copy(w.begin() + 1, w.end(), next.begin());
    for (int a = 0; a < sft.alphabet_size(); ++a) {
      if (!sft.allowed(w.back(), a)) continue;
      next.back() = a;
      const int v = find_state(g.states, next);
      if (v >= 0) g.succ[u].push_back(v);
    }
  }
  return g;
}

LogMatrix transfer_matrix(const WordGraph& g, double t) {
  LogMatrix m(g.size());
  for (int u = 0; u < g.size(); ++u)
    for (int v : g.succ[static_cast<std::size_t>(u)]) m.add(u, v, t * g.value[static_cast<std::size_t>(u)]);
  return m;
}

PressureSolver::PressureSolver(const LocallyConstantPotential& pot, const PressureOptions& options)
    : pot_(pot), options_(options), engine_(options.engine) {
  const bool fits = pot_.materialized() && word_count(pot_.sft(), pot_.depth()) <= static_cast<double>(options_.max_states);
  if (engine_ == PressureEngine::Auto) {
    if (fits) engine_ = PressureEngine::Transfer;
    else if (RenewalModel::applicable(pot_)) engine_ = PressureEngine::Renewal;
    else {
      std::ostringstream msg;
      msg << "too large: depth " << pot_.depth() << " needs " << word_count(pot_.sft(), pot_.depth())
          << " transfer states (budget " << options_.max_states << ") and no renewal structure applies";
      throw Error(ErrorCode::TooLarge, msg.str());
    }
  }
  if (engine_ == PressureEngine::Transfer) {
    graph_ = build_word_graph(pot_, options_.max_states);
  } else {
    if (!RenewalModel::applicable(pot_)) {
      throw Error(ErrorCode::InvalidArgument, "renewal engine needs dist-sunny or dist-orbit around a fixed point on a full shift");
    }
    model_.emplace(pot_);
  }
}

PressureResult PressureSolver::pressure(double t) const {
  PressureResult res;
  res.t = t;
  res.engine = engine_;
  if (graph_) {
    auto s = solve_transfer(*graph_, t, options_.perron, false);
    res.value = s.right.log_root;
    res.numeric_error = 0.5 * (s.right.log_upper - s.right.log_lower);
  } else {
    auto r = model_->solve(t, options_.perron);
    res.value = r.pressure;
    res.numeric_error = r.numeric_error;
  }
  res.enclosure_halfwidth = std::abs(t) * pot_.truncation_error() + res.numeric_error;
  return res;
}

double PressureSolver::excess(double t) const {
  if (model_) return model_->solve(t, options_.perron).excess;
  return pressure(t).value - t * pot_.max_value();
}

CurveRow PressureSolver::point(double t) const {
  CurveRow row;
  row.t = t;
  if (graph_) {
    auto s = solve_transfer(*graph_, t, options_.perron, true);
    MarkovMeasure m = measure_from_solution(pot_.sft(), *graph_, t, s);
    auto ei = entropy_and_integral(m, pot_);
    row.pressure = s.right.log_root;
    row.entropy = ei.entropy;
    row.integral = ei.integral;
    row.enclosure_halfwidth = std::abs(t) * pot_.truncation_error() + 0.5 * (s.right.log_upper - s.right.log_lower);
  } else {
    auto r = model_->solve(t, options_.perron);
    row.pressure = r.pressure;
    row.entropy = r.entropy;
    row.integral = r.integral;
    row.enclosure_halfwidth = std::abs(t) * pot_.truncation_error() + r.numeric_error;
  }
  return row;
}

MarkovMeasure PressureSolver::equilibrium(double t) const {
  if (!graph_) {
    throw Error(ErrorCode::TooLarge, "equilibrium state needs the transfer engine (state budget exceeded)");
  }
  auto s = solve_transfer(*graph_, t, options_.perron, true);
  return measure_from_solution(pot_.sft(), *graph_, t, s);
}

PressureResult pressure(const LocallyConstantPotential& pot, double t, const PressureOptions& options) {
  return PressureSolver(pot, options).pressure(t);
}

MarkovMeasure equilibrium_state(const LocallyConstantPotential& pot, double t, const PressureOptions& options) {
  PressureOptions o = options;
  o.engine = PressureEngine::Transfer;
  return PressureSolver(pot, o).equilibrium(t);
}

CurveRow pressure_point(const LocallyConstantPotential& pot, double t, const PressureOptions& options) {
  return PressureSolver(pot, options).point(t);
}

std::vector<CurveRow> pressure_curve(const LocallyConstantPotential& pot, std::span<const double> ts, int threads,
                                     const PressureOptions& options) {
  PressureSolver solver(pot, options);
  return parallel_map<CurveRow>(ts.size(), threads, [&](std::size_t i) { return solver.point(ts[i]); });
}

std::vector<double> uniform_grid(double t_min, double t_max, int steps) {
  if (!(t_min < t_max) || steps < 2) {
    throw Error(ErrorCode::InvalidArgument, "t-grid needs t_min < t_max and at least 2 steps");
  }
  std::vector<double> ts(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    ts[static_cast<std::size_t>(i)] = i == steps - 1 ? t_max : t_min + (t_max - t_min) * i / (steps - 1);
  }
  return ts;
}

std::optional<int> MarkovMeasure::find(std::span<const int> state) const {
  const int i = find_state(states, state);
  if (i < 0) return std::nullopt;
  return i;
}

double MarkovMeasure::log_cylinder(std::span<const int> w) const {
  const auto n = static_cast<int>(w.size());
  if (n == 0) return 0.0;
  if (n < order) {
    auto lo = std::lower_bound(states.begin(), states.end(), w, [](const Word& a, std::span<const int> b) {
      return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    });
    double s = 0.0;
    for (auto it = lo; it != states.end() && std::equal(w.begin(), w.end(), it->begin()); ++it)
      s += stationary[static_cast<std::size_t>(it - states.begin())];
    return s > 0.0 ? std::log(s) : kNegInf;
  }
  int cur = find_state(states, w.subspan(0, static_cast<std::size_t>(order)));
  if (cur < 0 || stationary[static_cast<std::size_t>(cur)] <= 0.0) return kNegInf;
  double lp = std::log(stationary[static_cast<std::size_t>(cur)]);
  for (int i = 1; i + order <= n; ++i) {
    const int sym = w[static_cast<std::size_t>(i + order - 1)];
    const auto& row = out[static_cast<std::size_t>(cur)];
    auto it = std::find_if(row.begin(), row.end(),
                           [&](const Transition& tr) { return states[static_cast<std::size_t>(tr.to)].back() == sym; });
    if (it == row.end() || it->prob <= 0.0) return kNegInf;
    lp += it->log_prob;
    cur = it->to;
  }
  return lp;
}

double MarkovMeasure::cylinder(std::span<const int> w) const { return std::exp(log_cylinder(w)); }

MarkovMeasure bernoulli_measure(const Sft& sft, std::span<const double> probabilities) {
  const int k = sft.alphabet_size();
  if (!sft.is_full_shift()) throw Error(ErrorCode::InvalidArgument, "bernoulli_measure needs a full shift");
  if (static_cast<int>(probabilities.size()) != k) {
    throw Error(ErrorCode::InvalidArgument, "bernoulli_measure needs one probability per symbol");
  }
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0)) throw Error(ErrorCode::InvalidArgument, "probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorCode::InvalidArgument, "probabilities must sum to 1");
  MarkovMeasure m(sft);
  m.order = 1;
  for (int a = 0; a < k; ++a) {
    if (probabilities[static_cast<std::size_t>(a)] > 0.0) m.states.push_back({a});
  }
  m.out.resize(m.states.size());
  for (std::size_t u = 0; u < m.states.size(); ++u) {
    m.stationary.push_back(probabilities[static_cast<std::size_t>(m.states[u][0])]);
    for (std::size_t v = 0; v < m.states.size(); ++v) {
      const double p = probabilities[static_cast<std::size_t>(m.states[v][0])];
      m.out[u].push_back({static_cast<int>(v), p, std::log(p)});
    }
  }
  m.provenance = "bernoulli";
  return m;
}

MarkovMeasure periodic_measure(const Sft& sft, std::span<const int> p, int order) {
  if (p.empty() || !sft.cyclically_admissible(p)) {
    throw Error(ErrorCode::InvalidArgument, "periodic_measure needs a cyclically admissible word");
  }
  const int k = static_cast<int>(p.size());
  for (int d = 1; d < k; ++d) {
    if (k % d != 0) continue;
    bool power = true;
    for (int i = 0; i < k && power; ++i) power = p[static_cast<std::size_t>(i)] == p[static_cast<std::size_t>(i % d)];
    if (power) throw Error(ErrorCode::InvalidArgument, "periodic_measure needs a primitive word");
  }
  // Order-words read along a primitive orbit are distinct once order >= period.
  const int ord = std::max(order, k);
  std::vector<Word> seq(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < ord; ++j) seq[static_cast<std::size_t>(i)].push_back(p[static_cast<std::size_t>((i + j) % k)]);
  MarkovMeasure m(sft);
  m.order = ord;
  m.states = seq;
  std::sort(m.states.begin(), m.states.end());
  m.out.resize(m.states.size());
  m.stationary.assign(m.states.size(), 1.0 / k);
  for (int i = 0; i < k; ++i) {
    const int from = find_state(m.states, seq[static_cast<std::size_t>(i)]);
    const int to = find_state(m.states, seq[static_cast<std::size_t>((i + 1) % k)]);
    m.out[static_cast<std::size_t>(from)].push_back({to, 1.0, 0.0});
  }
  m.provenance = "periodic orbit " + word_to_string(p);
  return m;
}

MarkovMeasure refine(const MarkovMeasure& m, int order) {
  if (order < m.order) throw Error(ErrorCode::InvalidArgument, "refine: measures are refined, never coarsened");
  if (order == m.order) return m;
  const int extra = order - m.order;
  // Grow every state by `extra` steps along its transitions.
  std::vector<std::pair<Word, double>> grown;
  struct Frame {
    Word w;
    int state;
    double log_p;
  };
  std::vector<Frame> stack;
  for (std::size_t u = 0; u < m.states.size(); ++u) {
    if (m.stationary[u] <= 0.0) continue;
    stack.push_back({m.states[u], static_cast<int>(u), std::log(m.stationary[u])});
  }
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (static_cast<int>(f.w.size()) == order) {
      grown.emplace_back(std::move(f.w), f.log_p);
      continue;
    }
    for (const auto& tr : m.out[static_cast<std::size_t>(f.state)]) {
      if (tr.prob <= 0.0) continue;
      Word w = f.w;
      w.push_back(m.states[static_cast<std::size_t>(tr.to)].back());
      stack.push_back({std::move(w), tr.to, f.log_p + tr.log_prob});
    }
  }
  std::sort(grown.begin(), grown.end());
  MarkovMeasure r(m.sft);
  r.order = order;
  r.provenance = m.provenance;
  for (auto& [w, lp] : grown) {
    r.states.push_back(w);
    r.stationary.push_back(std::exp(lp));
  }
  r.out.resize(r.states.size());
  Word next(static_cast<std::size_t>(order));
  for (std::size_t u = 0; u < r.states.size(); ++u) {
    const Word& w = r.states[u];
    const int base = find_state(m.states, std::span<const int>(w).subspan(static_cast<std::size_t>(extra)));
    std::copy(w.begin() + 1, w.end(), next.begin());
    for (const auto& tr : m.out[static_cast<std::size_t>(base)]) {
      next.back() = m.states[static_cast<std::size_t>(tr.to)].back();
      const int v = find_state(r.states, next);
      if (v >= 0) r.out[u].push_back({v, tr.prob, tr.log_prob});
    }
  }
  return r;
}

EntropyIntegral entropy_and_integral(const MarkovMeasure& m, const LocallyConstantPotential& pot) {
  if (pot.depth() > m.order) return entropy_and_integral(refine(m, pot.depth()), pot);
  EntropyIntegral ei;
  ei.entropy = entropy_rate(m);
  const auto d = static_cast<std::size_t>(pot.depth());
  for (std::size_t u = 0; u < m.states.size(); ++u) {
    if (m.stationary[u] <= 0.0) continue;
    ei.integral += m.stationary[u] * pot.value(std::span<const int>(m.states[u]).subspan(0, d));
  }
  return ei;
}

double block_entropy(const MarkovMeasure& m, int n) {
  if (n < 1 || n > 20) throw Error(ErrorCode::TooLarge, "block_entropy: n must be in [1, 20]");
  auto plogp = [](double p) { return p > 0.0 ? -p * std::log(p) : 0.0; };
  if (n >= m.order) {
    double h0 = 0.0;
    for (double p : m.stationary) h0 += plogp(p);
    return h0 + (n - m.order) * entropy_rate(m);
  }
  // Marginal on n-prefixes; states are sorted, so equal prefixes are adjacent.
  double h = 0.0, acc = 0.0;
  for (std::size_t u = 0; u < m.states.size(); ++u) {
    acc += m.stationary[u];
    const bool last = u + 1 == m.states.size() ||
                      !std::equal(m.states[u].begin(), m.states[u].begin() + n, m.states[u + 1].begin());
    if (last) {
      h += plogp(acc);
      acc = 0.0;
    }
  }
  return h;
}

GibbsReport gibbs_report(const LocallyConstantPotential& pot, std::span<const double> t_grid, int max_word_length) {
  if (max_word_length < 1) throw Error(ErrorCode::InvalidArgument, "gibbs_report: max_word_length must be positive");
  const Sft& sft = pot.sft();
  constexpr std::size_t kWordBudget = 2'000'000;
  double total = 0.0;
  for (int n = 1; n <= max_word_length; ++n) total += word_count(sft, n);
  if (total > static_cast<double>(kWordBudget)) {
    throw Error(ErrorCode::TooLarge, "gibbs_report: too many words up to the requested length");
  }
  std::vector<std::vector<Word>> words;
  std::vector<std::vector<double>> inf_sum, sup_sum;
  for (int n = 1; n <= max_word_length; ++n) {
    words.push_back(enumerate_words(sft, n, kWordBudget));
    inf_sum.emplace_back();
    sup_sum.emplace_back();
    for (const Word& w : words.back()) {
      inf_sum.back().push_back(cylinder_birkhoff_inf(pot, w));
      sup_sum.back().push_back(cylinder_birkhoff_sup(pot, w));
    }
  }

  GibbsReport rep;
  rep.max_word_length = max_word_length;
  PressureOptions po;
  po.engine = PressureEngine::Transfer;
  PressureSolver solver(pot, po);
  for (double t : t_grid) {
    GibbsPoint gp;
    gp.t = t;
    MarkovMeasure mu = solver.equilibrium(t);
    gp.pressure = solver.pressure(t).value;
    gp.entropy = entropy_and_integral(mu, pot).entropy;
    double lo = std::numeric_limits<double>::infinity(), hi = kNegInf;
    for (int n = 1; n <= max_word_length; ++n) {
      const auto& ws = words[static_cast<std::size_t>(n - 1)];
      for (std::size_t i = 0; i < ws.size(); ++i) {
        // Birkhoff sum of t*phi, infimum over the cylinder.
        const double s = t >= 0 ? t * inf_sum[static_cast<std::size_t>(n - 1)][i] : t * sup_sum[static_cast<std::size_t>(n - 1)][i];
        const double lr = mu.log_cylinder(ws[i]) - (s - n * gp.pressure);
        lo = std::min(lo, lr);
        hi = std::max(hi, lr);
      }
      if (n <= 20) gp.block_entropy_defect.push_back(std::abs(block_entropy(mu, n) - n * gp.entropy));
    }
    gp.c_lo = std::exp(lo);
    gp.c_hi = std::exp(hi);
    gp.log_c = std::max(hi, -lo);
    rep.points.push_back(std::move(gp));
  }

  // Least squares log C = a + b|t|.
  const auto m = static_cast<double>(rep.points.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : rep.points) {
    const double x = std::abs(p.t);
    sx += x;
    sy += p.log_c;
    sxx += x * x;
    sxy += x * p.log_c;
  }
  const double det = m * sxx - sx * sx;
  if (rep.points.size() >= 2 && det > 0) {
    rep.fit_b = (m * sxy - sx * sy) / det;
    rep.fit_a = (sy - rep.fit_b * sx) / m;
  } else if (!rep.points.empty()) {
    rep.fit_a = sy / m;
  }
  double ss = 0.0;
  for (const auto& p : rep.points) {
    const double e = p.log_c - (rep.fit_a + rep.fit_b * std::abs(p.t));
    ss += e * e;
  }
  rep.fit_residual = rep.points.empty() ? 0.0 : std::sqrt(ss / m);
  if (!std::isfinite(rep.fit_b)) throw Error(ErrorCode::NotConverged, "gibbs_report: fitted growth is not finite");
  return rep;
}

}  // namespace thermoform
