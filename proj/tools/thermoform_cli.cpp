#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "thermoform/constructions.hpp"
#include "thermoform/ergopt.hpp"
#include "thermoform/error.hpp"
#include "thermoform/parallel.hpp"
#include "thermoform/potential.hpp"
#include "thermoform/pressure.hpp"
#include "thermoform/report.hpp"
#include "thermoform/splice.hpp"

using namespace thermoform;
using nlohmann::ordered_json;

namespace {

struct Options {
  std::string sft = "full2";
  std::string potential = "neg-x0";
  double t_min = 0.0;
  double t_max = 20.0;
  int t_steps = 81;
  bool log_grid = false;
  int depth = 0;
  std::uint64_t seed = 0;
  std::size_t len = 1'000'000;
  std::string out;
  std::string format = "csv";
  std::string mode = "auto";

  // Subcommand parameters.
  double at = 1.0;
  std::string h_list = "0.5,1,2,4";
  int max_len = 10;
  std::string word;
  double eta = 0.1;
  int max_block = 12;
  std::string n_seq = "1,2,3";
  int level = 0;
  std::string digits;
  double beta = 0.0;
  int max_n = 30;
  double b = 0.5;
  std::string u = "0";
  std::string values = "1,0.5,0";
  int n_max = 40;
  std::string example;
};

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !(is >> std::ws).eof()) {
      throw Error(ErrorCode::ParseError, std::string(what) + ": cannot read \"" + item + "\"");
    }
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorCode::ParseError, std::string(what) + ": empty list");
  return out;
}

Sft resolve_sft(const std::string& name) {
  if (std::filesystem::exists(name)) return load_sft(name);
  if (name == "golden-mean") return Sft::golden_mean();
  if (name.rfind("full", 0) == 0 && name.size() > 4) {
    const int k = parse_list<int>(name.substr(4), "sft")[0];
    return Sft::full_shift(k);
  }
  throw Error(ErrorCode::IoError, "sft \"" + name + "\" is neither a file nor a builtin (fullK, golden-mean)");
}

// Builtin potentials and their default depths.
std::pair<PotentialSpec, int> resolve_spec(const std::string& name, const Sft& sft) {
  if (std::filesystem::exists(name)) return load_potential_spec(name);
  if (name == "neg-x0" || name == "ex6.1") {
    std::vector<double> c(static_cast<std::size_t>(sft.alphabet_size()));
    for (std::size_t a = 0; a < c.size(); ++a) c[a] = -static_cast<double>(a);
    return {PotentialSpec::coordinate_values(c), 1};
  }
  if (name == "zero") {
    return {PotentialSpec::coordinate_values(std::vector<double>(static_cast<std::size_t>(sft.alphabet_size()), 0.0)), 1};
  }
  if (name == "dist-sunny" || name == "ex6.2") return {PotentialSpec::dist_sunny(), 41};
  if (name == "dist-orbit-0" || name == "generic-upper") return {PotentialSpec::dist_orbit(Word{0}), 21};
  throw Error(ErrorCode::IoError, "potential \"" + name +
                                      "\" is neither a file nor a builtin (neg-x0, zero, dist-sunny, dist-orbit-0, "
                                      "ex6.1, ex6.2, generic-upper)");
}

LocallyConstantPotential resolve_potential(const Options& o, const Sft& sft) {
  auto [spec, depth] = resolve_spec(o.potential, sft);
  if (o.depth > 0) depth = o.depth;
  if (depth <= 0) depth = default_depth(spec);
  return build_potential(sft, spec, depth);
}

std::vector<double> grid(const Options& o) {
  if (!(o.t_min < o.t_max)) throw Error(ErrorCode::InvalidArgument, "t-grid needs t-min < t-max");
  if (o.t_steps < 2) throw Error(ErrorCode::InvalidArgument, "t-grid needs at least 2 steps");
  if (!o.log_grid) return uniform_grid(o.t_min, o.t_max, o.t_steps);
  if (o.t_min <= 0) throw Error(ErrorCode::InvalidArgument, "log grid needs t-min > 0");
  auto g = uniform_grid(std::log(o.t_min), std::log(o.t_max), o.t_steps);
  for (double& t : g) t = std::exp(t);
  g.front() = o.t_min;
  g.back() = o.t_max;
  return g;
}

AsymptoteMode asymptote_mode(const Options& o, const LocallyConstantPotential& pot) {
  if (o.mode == "table") return AsymptoteMode::Table;
  if (o.mode == "intended") return AsymptoteMode::Intended;
  if (o.mode != "auto") throw Error(ErrorCode::InvalidArgument, "mode must be auto, table or intended");
  return pot.spec().is_distance() && pot.truncation_error() > 0 ? AsymptoteMode::Intended : AsymptoteMode::Table;
}

void put_potential(Report& r, const LocallyConstantPotential& pot) {
  r.summary["variant"] = variant_name(pot.spec().variant);
  r.summary["depth"] = pot.depth();
  r.summary["holder_c"] = pot.holder_c();
  r.summary["holder_alpha"] = pot.holder_alpha();
  r.summary["truncation_error"] = pot.truncation_error();
}

void put_asymptote(Report& r, const AsymptoteData& a) {
  r.summary["beta"] = a.beta;
  r.summary["a_min"] = a.a_min;
  r.summary["gamma"] = a.gamma;
  r.summary["b"] = a.b;
  r.summary["asymptote_source"] = a.source;
}

void put_fit(Report& r, const DecayFit& f) {
  r.summary["fit_rate"] = f.rate;
  r.summary["fit_prefactor"] = f.prefactor;
  r.summary["fit_residual"] = f.residual;
  r.summary["fit_usable"] = f.usable;
  r.summary["verdict"] = f.verdict;
}

Report gap_report(const GapSolver& solver, const std::vector<double>& ts) {
  auto pts = parallel_map<GapPoint>(ts.size(), default_threads(), [&](std::size_t i) { return solver.gap(ts[i]); });
  std::sort(pts.begin(), pts.end(), [](const GapPoint& a, const GapPoint& b) { return a.t < b.t; });
  Report r;
  r.columns = {"t", "gap", "log_gap", "enclosure"};
  for (const auto& p : pts) r.add_row({p.t, p.gap, p.log_gap, p.enclosure});
  put_asymptote(r, solver.asymptote());
  r.summary["asymptote_mode"] = solver.mode() == AsymptoteMode::Table ? "table" : "intended";
  put_fit(r, fit_decay(pts));
  return r;
}

Report cmd_entropy(const Options& o) {
  const Sft sft = resolve_sft(o.sft);
  Report r;
  r.columns = {"alphabet", "mixing_length", "entropy"};
  r.add_row({static_cast<long long>(sft.alphabet_size()), static_cast<long long>(sft.mixing_length()),
             topological_entropy(sft)});
  return r;
}

Report cmd_pressure_curve(const Options& o) {
  const Sft sft = resolve_sft(o.sft);
  const auto pot = resolve_potential(o, sft);
  const auto ts = grid(o);
  auto rows = pressure_curve(pot, ts, default_threads());
  std::sort(rows.begin(), rows.end(), [](const CurveRow& a, const CurveRow& b) { return a.t < b.t; });
  Report r;
  r.columns = {"t", "pressure", "enclosure_halfwidth", "entropy", "integral"};
  for (const auto& c : rows) r.add_row({c.t, c.pressure, c.enclosure_halfwidth, c.entropy, c.integral});
  put_potential(r, pot);
  return r;
}

Report cmd_asymptote(const Options& o) {
  const Sft sft = resolve_sft(o.sft);
  const auto pot = resolve_potential(o, sft);
  GapSolver solver(pot, asymptote_mode(o, pot));
  const auto& a = solver.asymptote();
  Report r;
  r.columns = {"component", "states", "entropy"};
  for (std::size_t c = 0; c < a.components.size(); ++c) {
    r.add_row({static_cast<long long>(c), static_cast<long long>(a.components[c].size()),
               c < a.component_entropy.size() ? a.component_entropy[c] : std::nan("")});
  }
  put_potential(r, pot);
  put_asymptote(r, a);
  r.summary["bilateral"] = a.bilateral;
  r.summary["best_component"] = a.best_component;
  return r;
}

Report cmd_gap_curve(const Options& o) {
  const Sft sft = resolve_sft(o.sft);
  const auto pot = resolve_potential(o, sft);
  GapSolver solver(pot, asymptote_mode(o, pot));
  Report r = gap_report(solver, grid(o));
  put_potential(r, pot);
  return r;
}

Report cmd_tangent_gap(const Options& o) {
  const Sft sft = resolve_sft(o.sft);
  const auto pot = resolve_potential(o, sft);
  const auto ss = grid(o);
  auto pts = parallel_map<TangentGap>(ss.size(), default_threads(), [&](std::size_t i) { return tangent_gap(pot, o.at, ss[i]); });
  Report r;
  r.columns = {"t", "s", "gap", "enclosure"};
  for (const auto& p : pts) r.add_row({p.t, p.s, p.gap, p.enclosure});
  put_potential(r, pot);
  return r;
}

Report cmd_convexity(const Options& o) {
  const Sft sft = resolve_sft(o.sft);
  const auto pot = resolve_potential(o, sft);
  const ConvexitySolver solver(pot);
  const auto ts = grid(o);
  const auto hs = parse_list<double>(o.h_list, "h");
  for (double h : hs)
    if (!(h > 0)) throw Error(ErrorCode::InvalidArgument, "h values must be positive");
  auto pts = parallel_map<ConvexityPoint>(ts.size() * hs.size(), default_threads(),
                                          [&](std::size_t i) { return solver.gap(ts[i / hs.size()], hs[i % hs.size()]); });
  Report r;
  r.columns = {"t", "h", "gap", "enclosure", "method"};
  bool positive = true;
  for (const auto& p : pts) {
    r.add_row({p.t, p.h, p.gap, p.enclosure, p.method});
    positive = positive && p.gap > 0;
  }
  put_potential(r, pot);
  const auto fit = fit_convexity(pts);
  r.summary["fit_c1"] = fit.c1;
  r.summary["fit_c2"] = fit.c2;
  r.summary["fit_residual"] = fit.residual;
  r.summary["fit_used"] = fit.used;
  r.summary["verdict"] = solver.cohomologous_to_constant() ? "cohomologous-to-constant" : positive ? "positive" : "not-positive";
  return r;
}

Report cmd_gibbs(const Options& o) {
  const Sft sft = resolve_sft(o.sft);
  const auto pot = resolve_potential(o, sft);
  const auto ts = grid(o);
  const auto g = gibbs_report(pot, ts, o.max_len);
  Report r;
  r.columns = {"t", "pressure", "c_lo", "c_hi", "log_c", "entropy", "max_block_entropy_defect"};
  for (const auto& p : g.points) {
    double defect = 0.0;
    for (double d : p.block_entropy_defect) defect = std::max(defect, d);
    r.add_row({p.t, p.pressure, p.c_lo, p.c_hi, p.log_c, p.entropy, defect});
  }
  put_potential(r, pot);
  r.summary["max_word_length"] = g.max_word_length;
  r.summary["fit_a"] = g.fit_a;
  r.summary["fit_b"] = g.fit_b;
  r.summary["fit_residual"] = g.fit_residual;
  return r;
}

Report cmd_splice(const Options& o) {
  const Sft sft = resolve_sft(o.sft);
  const auto pot = resolve_potential(o, sft);
  SpliceConfig cfg{equilibrium_state(pot, o.at), o.word.empty() ? find_no_overlap_word(sft, std::max(6, 3 * sft.mixing_length()))
                                                                 : word_from_string(o.word)};
  cfg.eta = o.eta;
  cfg.length = o.len;
  cfg.seed = o.seed;
  cfg.max_block = o.max_block;
  const auto s = splice_experiment(cfg, pot);
  Report r;
  r.columns = {"n", "block_entropy_rate"};
  for (std::size_t n = 0; n < s.block_entropy_rate.size(); ++n)
    r.add_row({static_cast<long long>(n + 1), s.block_entropy_rate[n]});
  put_potential(r, pot);
  r.summary["w"] = word_to_string(cfg.w);
  r.summary["L"] = s.L;
  r.summary["m"] = s.m;
  r.summary["eta"] = s.nu.eta;
  r.summary["M"] = s.nu.M;
  r.summary["delta"] = s.nu.delta;
  r.summary["nu_entropy"] = s.nu.nu_entropy;
  r.summary["mu_w"] = s.mu_w;
  r.summary["mu_entropy"] = s.mu_entropy;
  r.summary["mu_integral"] = s.mu_integral;
  r.summary["block_entropy"] = s.block_entropy;
  r.summary["word_sum"] = s.word_sum;
  r.summary["entropy_rhs"] = s.entropy_rhs;
  r.summary["integral_rhs_holder"] = s.integral_rhs_holder;
  r.summary["integral_rhs_table"] = s.integral_rhs_table;
  r.summary["edits"] = s.edits;
  r.summary["birkhoff_average"] = s.birkhoff_average;
  r.summary["birkhoff_sigma"] = s.birkhoff_sigma;
  r.summary["base_average"] = s.base_average;
  r.summary["integral_check"] = s.integral_pass ? "pass" : "fail";
  r.summary["entropy_check"] = s.entropy_pass ? "pass" : "fail";
  return r;
}

Report cmd_rothstein(const Options& o) {
  const auto n_seq = parse_list<int>(o.n_seq, "n-seq");
  const int top = o.level > 0 ? o.level : static_cast<int>(n_seq.size());
  Report r;
  r.columns = {"j", "word_length", "word_count", "entropy", "explicit"};
  for (int j = 0; j <= top; ++j) {
    const auto lv = rothstein_level(n_seq, j);
    r.add_row({static_cast<long long>(j), lv.word_length.str(), lv.word_count.str(), lv.entropy(),
               static_cast<long long>(lv.explicit_words)});
  }
  r.summary["n_seq"] = n_seq;
  return r;
}

Report cmd_beta_shift(const Options& o) {
  std::vector<int> digits;
  if (!o.digits.empty()) digits = parse_list<int>(o.digits, "digits");
  else if (o.beta > 1) digits = approximate_beta_digits(o.beta);
  else throw Error(ErrorCode::InvalidArgument, "beta-shift needs --digits or --beta > 1");
  const auto b = beta_shift_from_digits(digits);
  Report r;
  r.columns = {"n", "word_count"};
  for (int n = 1; n <= o.max_n; ++n) r.add_row({static_cast<long long>(n), beta_word_count(b, n)});
  r.summary["digits"] = digits;
  r.summary["beta"] = b.beta;
  r.summary["log_beta"] = std::log(b.beta);
  r.summary["entropy"] = b.entropy();
  r.summary["parry_admissible"] = parry_admissible(digits);
  r.summary["edge_symbols"] = b.labels.size();
  return r;
}

Report cmd_build_y(const Options& o) {
  const Sft sft = resolve_sft(o.sft);
  std::optional<std::vector<int>> digits;
  if (!o.digits.empty()) digits = parse_list<int>(o.digits, "digits");
  const auto y = build_Y(sft, o.b, word_from_string(o.u), digits);
  Report r;
  r.columns = {"i", "word"};
  for (std::size_t i = 0; i < y.alphabet.size(); ++i) r.add_row({static_cast<long long>(i), word_to_string(y.alphabet[i])});
  r.summary["b"] = y.b;
  r.summary["n"] = y.n;
  r.summary["L"] = y.L;
  r.summary["ell"] = y.ell;
  r.summary["N"] = y.N;
  r.summary["target_log_beta"] = y.target_log_beta;
  if (y.beta) {
    r.summary["digits"] = y.beta->digits;
    r.summary["beta"] = y.beta->beta;
  }
  r.summary["entropy_per_symbol"] = y.entropy_per_symbol();
  return r;
}

Report cmd_example(Options o, const CLI::App& sub) {
  const auto given = [&](const char* flag) { return sub.count(flag) > 0; };
  if (o.example == "ex4.2") {
    const auto c = parse_list<double>(o.values, "values");
    const auto pot = build_potential(Sft::full_shift(static_cast<int>(c.size())), PotentialSpec::coordinate_values(c), 1);
    if (!given("--t-min")) o.t_min = -20;
    Report r;
    r.columns = {"t", "pressure", "closed_form", "abs_error"};
    const PressureSolver solver(pot);
    for (double t : grid(o)) {
      std::vector<double> e;
      for (double ci : c) e.push_back(ci * t);
      const double exact = log_sum_exp(e);
      const double p = solver.pressure(t).value;
      r.add_row({t, p, exact, std::abs(p - exact)});
    }
    r.summary["values"] = c;
    return r;
  }
  if (o.example == "ex6.1") {
    const auto pot = build_potential(Sft::full_shift(2), PotentialSpec::coordinate_values({0.0, -1.0}), 1);
    if (!given("--t-max")) o.t_max = 30;
    GapSolver solver(pot);
    Report r = gap_report(solver, grid(o));
    r.columns.push_back("closed_form");
    for (auto& row : r.rows) row.push_back(std::log1p(std::exp(-std::get<double>(row[0]))));
    return r;
  }
  if (o.example == "ex6.2") {
    const auto pot = build_potential(Sft::full_shift(2), PotentialSpec::dist_sunny(), o.depth > 0 ? o.depth : 41);
    if (!given("--t-min")) o.t_min = 1;
    if (!given("--t-max")) o.t_max = 1000;
    if (!given("--t-steps")) o.t_steps = 60;
    o.log_grid = true;
    GapSolver solver(pot, AsymptoteMode::Intended);
    Report r = gap_report(solver, grid(o));
    r.columns.push_back("sunny_lower_bound");
    bool above = true;
    for (auto& row : r.rows) {
      const double t = std::get<double>(row[0]);
      const double lb = sunny_lower_bound(t, o.n_max).value;
      above = above && std::get<double>(row[1]) + std::get<double>(row[3]) >= lb;
      row.push_back(lb);
    }
    put_potential(r, pot);
    r.summary["lower_bound_check"] = above ? "pass" : "fail";
    return r;
  }
  if (o.example == "generic-upper") {
    const auto pot = build_potential(Sft::full_shift(2), PotentialSpec::dist_orbit(Word{0}), o.depth > 0 ? o.depth : 21);
    GapSolver solver(pot, AsymptoteMode::Table);
    if (!given("--t-max")) o.t_max = 40;
    Report r = gap_report(solver, grid(o));
    r.columns.push_back("upper_bound");
    bool below = true;
    for (auto& row : r.rows) {
      const double t = std::get<double>(row[0]);
      const double ub = generic_upper_curve(2, 1.0, 1, t);
      below = below && std::get<double>(row[1]) <= ub + std::abs(t) * pot.truncation_error() + 1e-12;
      row.push_back(ub);
    }
    put_potential(r, pot);
    r.summary["upper_bound_check"] = below ? "pass" : "fail";
    return r;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown example \"" + o.example + "\" (ex4.2, ex6.1, ex6.2, generic-upper)");
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

ordered_json inputs_json(const CLI::App& sub) {
  ordered_json j;
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_name() == "--help") continue;
    j[opt->get_name()] = opt->count() > 0 ? opt->as<std::string>() : opt->get_default_str();
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thermoform: pressure curves, gaps and constructions for subshifts of finite type"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  Options o;

  struct Command {
    const char* name;
    const char* help;
  };
  const std::vector<Command> commands = {
      {"entropy", "topological entropy and mixing length"},
      {"pressure-curve", "pressure, entropy and integral over a t-grid"},
      {"asymptote", "max-plus normalisation and ground-state entropy"},
      {"gap-curve", "gap to the slant asymptote with a decay fit"},
      {"tangent-gap", "gap to the tangent line at --at"},
      {"convexity", "coarse convexity gaps over t x h"},
      {"gibbs", "Gibbs constants and block-entropy defects"},
      {"splice", "coupling-and-splicing experiment"},
      {"rothstein", "Rothstein level counts"},
      {"beta-shift", "beta-shift from digits and its word counts"},
      {"build-y", "subshift Y built from a beta-shift"},
      {"example", "named presets: ex4.2, ex6.1, ex6.2, generic-upper"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : commands) {
    CLI::App* s = app.add_subcommand(c.name, c.help);
    s->add_option("--sft", o.sft, "SFT file or builtin (fullK, golden-mean)");
    s->add_option("--potential", o.potential, "potential file or builtin name");
    s->add_option("--t-min", o.t_min);
    s->add_option("--t-max", o.t_max);
    s->add_option("--t-steps", o.t_steps);
    s->add_flag("--log-grid", o.log_grid, "geometric t-grid");
    s->add_option("--depth", o.depth, "truncation depth");
    s->add_option("--seed", o.seed);
    s->add_option("--len", o.len, "sample length");
    s->add_option("--out", o.out, "output file (stdout when absent)");
    s->add_option("--format", o.format)->check(CLI::IsMember({"csv", "json"}));
    s->add_option("--mode", o.mode, "asymptote mode: auto, table, intended");
    subs.push_back(s);
  }
  subs[4]->add_option("--at", o.at, "tangency point t");
  subs[5]->add_option("--h-values", o.h_list, "comma-separated h values");
  subs[6]->add_option("--max-len", o.max_len, "longest word for Gibbs ratios");
  subs[7]->add_option("--at", o.at, "equilibrium parameter of the base measure");
  subs[7]->add_option("--word", o.word, "inserted word");
  subs[7]->add_option("--eta", o.eta);
  subs[7]->add_option("--max-block", o.max_block);
  subs[8]->add_option("--n-seq", o.n_seq, "comma-separated n_1, n_2, ...");
  subs[8]->add_option("--level", o.level);
  subs[9]->add_option("--digits", o.digits, "comma-separated expansion of 1");
  subs[9]->add_option("--beta", o.beta);
  subs[9]->add_option("--max-n", o.max_n);
  subs[10]->add_option("--b", o.b, "target entropy");
  subs[10]->add_option("--u", o.u, "marker word");
  subs[10]->add_option("--digits", o.digits);
  subs[11]->add_option("name", o.example)->required();
  subs[11]->add_option("--values", o.values, "ex4.2 coordinate values");
  subs[11]->add_option("--n-max", o.n_max, "ex6.2 lower-bound range");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << error_code_name(ErrorCode::InvalidArgument) << ": " << one_line(e.what()) << "\n";
    return 2;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    Report r;
    if (name == "entropy") r = cmd_entropy(o);
    else if (name == "pressure-curve") r = cmd_pressure_curve(o);
    else if (name == "asymptote") r = cmd_asymptote(o);
    else if (name == "gap-curve") r = cmd_gap_curve(o);
    else if (name == "tangent-gap") r = cmd_tangent_gap(o);
    else if (name == "convexity") r = cmd_convexity(o);
    else if (name == "gibbs") r = cmd_gibbs(o);
    else if (name == "splice") r = cmd_splice(o);
    else if (name == "rothstein") r = cmd_rothstein(o);
    else if (name == "beta-shift") r = cmd_beta_shift(o);
    else if (name == "build-y") r = cmd_build_y(o);
    else r = cmd_example(o, *sub);
    r.command = name;

    Manifest m;
    m.command = name == "example" ? "example " + o.example : name;
    m.inputs = inputs_json(*sub);
    m.seed = o.seed;
    m.timestamp = utc_timestamp();
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::string text = o.format == "json" ? to_json(r, m) : to_csv(r, m);
    if (o.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(o.out, std::ios::binary);
      if (!f) throw Error(ErrorCode::IoError, "cannot open " + o.out + " for writing");
      f << text;
      if (!f) throw Error(ErrorCode::IoError, "write to " + o.out + " failed");
    }
  } catch (const Error& e) {
    std::cerr << "error: " << error_code_name(e.code()) << ": " << one_line(e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}
