#include "thermoform/splice.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

#include "thermoform/error.hpp"

namespace thermoform {

namespace {

// Number of batches for the batch-means standard error.
constexpr int kBatches = 100;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

// Geometric on {0, 1, ...} with P(n) = (1 - e^-eta) e^{-n eta}.
std::uint64_t draw_geometric(std::mt19937_64& rng, double eta) {
  std::exponential_distribution<double> e(1.0);
  return static_cast<std::uint64_t>(std::floor(e(rng) / eta));
}

struct MeanSigma {
  double mean = 0.0;
  double sigma = 0.0;
};

MeanSigma birkhoff_batches(const LocallyConstantPotential& pot, std::span<const int> z) {
  const auto d = static_cast<std::size_t>(pot.depth());
  if (z.size() < d + kBatches) throw Error(ErrorCode::InvalidArgument, "sample too short for a Birkhoff average");
  const std::size_t sites = z.size() - d + 1;
  const std::size_t per = sites / kBatches;
  std::vector<double> means;
  double total = 0.0;
  for (int b = 0; b < kBatches; ++b) {
    double s = 0.0;
    for (std::size_t j = static_cast<std::size_t>(b) * per; j < static_cast<std::size_t>(b + 1) * per; ++j)
      s += pot.value(z.subspan(j, d));
    means.push_back(s / static_cast<double>(per));
    total += s;
  }
  MeanSigma r;
  r.mean = total / static_cast<double>(per * kBatches);
  double ss = 0.0;
  for (double m : means) ss += (m - r.mean) * (m - r.mean);
  r.sigma = std::sqrt(ss / (kBatches - 1) / kBatches);
  return r;
}

}  // namespace

GapMeasureParams nu_closed_form(double eta, int M) {
  if (!(eta > 0) || M < 1) throw Error(ErrorCode::InvalidArgument, "nu needs eta > 0 and M >= 1");
  GapMeasureParams p;
  p.eta = eta;
  p.M = M;
  // e^-eta / (1 - e^-eta) = 1 / expm1(eta)
  const double ratio = 1.0 / std::expm1(eta);
  p.delta = 1.0 / (M + ratio);
  p.nu_entropy = (-std::log1p(-std::exp(-eta)) + eta * ratio) * p.delta;
  return p;
}

double nu_frequency_sigma(const GapMeasureParams& p, double n) {
  const double ratio = 1.0 / std::expm1(p.eta);
  const double var_gap = ratio * (1.0 + ratio);  // q / (1 - q)^2
  return std::sqrt(var_gap * p.delta * p.delta * p.delta / n);
}

BinarySequence sample_nu(const GapMeasureParams& p, std::size_t length, std::uint64_t seed) {
  if (length > 100'000'000) throw Error(ErrorCode::TooLarge, "sample_nu: length above 10^8");
  BinarySequence y(length, 0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Forward recurrence time R: P(R = j) = delta for j < M, delta e^{-(i+1) eta}
  // for j = M + i.
  std::uint64_t pos;
  const double u = unit(rng);
  if (u < p.M * p.delta) {
    pos = std::min<std::uint64_t>(static_cast<std::uint64_t>(u / p.delta), static_cast<std::uint64_t>(p.M - 1));
  } else {
    pos = static_cast<std::uint64_t>(p.M) + draw_geometric(rng, p.eta);
  }
  while (pos < length) {
    y[pos] = 1;
    pos += static_cast<std::uint64_t>(p.M) + draw_geometric(rng, p.eta);
  }
  return y;
}

double nu_plugin_entropy(const BinarySequence& y) {
  std::map<std::size_t, std::size_t> gaps;
  std::size_t ones = 0, last = 0, count = 0;
  bool seen = false;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!y[i]) continue;
    ++ones;
    if (seen) {
      ++gaps[i - last];
      ++count;
    }
    last = i;
    seen = true;
  }
  if (count == 0) return 0.0;
  double h = 0.0;
  for (const auto& [g, c] : gaps) {
    const double q = static_cast<double>(c) / static_cast<double>(count);
    h -= q * std::log(q);
  }
  return h * static_cast<double>(ones) / static_cast<double>(y.size());
}

Word sample_markov(const MarkovMeasure& mu, std::size_t length, std::uint64_t seed) {
  const auto order = static_cast<std::size_t>(mu.order);
  if (length < order) throw Error(ErrorCode::InvalidArgument, "sample_markov: length below the chain order");
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> start(mu.stationary.begin(), mu.stationary.end());
  std::vector<std::discrete_distribution<int>> step;
  step.reserve(mu.out.size());
  for (const auto& row : mu.out) {
    std::vector<double> w;
    for (const auto& tr : row) w.push_back(tr.prob);
    step.emplace_back(w.begin(), w.end());
  }
  Word x;
  x.reserve(length);
  int s = start(rng);
  x.insert(x.end(), mu.states[static_cast<std::size_t>(s)].begin(), mu.states[static_cast<std::size_t>(s)].end());
  while (x.size() < length) {
    const auto& row = mu.out[static_cast<std::size_t>(s)];
    s = row[static_cast<std::size_t>(step[static_cast<std::size_t>(s)](rng))].to;
    x.push_back(mu.states[static_cast<std::size_t>(s)].back());
  }
  return x;
}

Connectors connector_words(const Sft& sft, std::span<const int> w) {
  if (w.empty()) throw Error(ErrorCode::InvalidArgument, "connector_words: empty word");
  Connectors c;
  c.L = sft.mixing_length();
  for (int a = 0; a < sft.alphabet_size(); ++a) {
    auto pre = connecting_word(sft, a, w.front(), c.L);
    auto suf = connecting_word(sft, w.back(), a, c.L);
    if (!pre || !suf) throw Error(ErrorCode::NotMixing, "no connector of the mixing length exists");
    c.prefix.push_back(*pre);
    c.suffix.push_back(*suf);
  }
  return c;
}

Word splice_map(const Connectors& c, std::span<const int> w, std::span<const int> x, const BinarySequence& y) {
  if (x.size() != y.size()) throw Error(ErrorCode::InvalidArgument, "splice_map: x and y differ in length");
  const std::size_t L = static_cast<std::size_t>(c.L), m = w.size();
  const std::size_t span = 2 * L + m;
  Word z(x.begin(), x.end());
  std::size_t prev = 0;
  bool have_prev = false;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (!y[k]) continue;
    if (have_prev && k - prev < span + 1) {
      throw Error(ErrorCode::InvalidArgument, "splice_map: 1s of y at " + std::to_string(prev) + " and " +
                                                  std::to_string(k) + " are closer than " + std::to_string(span + 1));
    }
    prev = k;
    have_prev = true;
    if (k == 0 || k + span >= x.size()) continue;
    const Word& pre = c.prefix[static_cast<std::size_t>(x[k - 1])];
    const Word& suf = c.suffix[static_cast<std::size_t>(x[k + span])];
    std::copy(pre.begin(), pre.end(), z.begin() + static_cast<std::ptrdiff_t>(k));
    std::copy(w.begin(), w.end(), z.begin() + static_cast<std::ptrdiff_t>(k + L));
    std::copy(suf.begin(), suf.end(), z.begin() + static_cast<std::ptrdiff_t>(k + L + m));
  }
  return z;
}

double empirical_block_entropy(std::span<const int> seq, int n, int alphabet_size) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "empirical_block_entropy: n must be positive");
  const double words = std::pow(static_cast<double>(alphabet_size), n);
  if (static_cast<double>(seq.size()) < 100.0 * words || words > 1e8) {
    throw Error(ErrorCode::InvalidArgument, "empirical_block_entropy: need at least 100 |A|^n = " +
                                                std::to_string(static_cast<long long>(100.0 * words)) + " symbols");
  }
  const auto size = static_cast<std::size_t>(words);
  std::vector<std::uint32_t> counts(size, 0);
  std::size_t code = 0;
  for (int i = 0; i < n; ++i) code = code * static_cast<std::size_t>(alphabet_size) + static_cast<std::size_t>(seq[static_cast<std::size_t>(i)]);
  const std::size_t top = size / static_cast<std::size_t>(alphabet_size);
  ++counts[code];
  for (std::size_t i = static_cast<std::size_t>(n); i < seq.size(); ++i) {
    code = (code % top) * static_cast<std::size_t>(alphabet_size) + static_cast<std::size_t>(seq[i]);
    ++counts[code];
  }
  const double total = static_cast<double>(seq.size() - static_cast<std::size_t>(n) + 1);
  double h = 0.0;
  for (std::uint32_t c : counts)
    if (c) {
      const double q = c / total;
      h -= q * std::log(q);
    }
  return h / n;
}

double tuned_eta(double c1, double c2, double t) { return std::exp(-1.0 - c2 - c1 * std::abs(t)); }

SpliceReport splice_experiment(const SpliceConfig& config, const LocallyConstantPotential& pot) {
  const MarkovMeasure& mu = config.mu;
  const Sft& sft = mu.sft;
  const Word& w = config.w;
  SpliceReport r;
  r.seed = config.seed;
  r.L = sft.mixing_length();
  r.m = static_cast<int>(w.size());
  if (!sft.admissible(w)) throw Error(ErrorCode::InvalidArgument, "splice word is not admissible");
  if (r.m < 3 * r.L) {
    throw Error(ErrorCode::HypothesisViolated, "splice word must have length at least 3L = " + std::to_string(3 * r.L));
  }
  if (!has_no_long_overlaps(w)) throw Error(ErrorCode::HypothesisViolated, "splice word has long overlaps");
  r.nu = nu_closed_form(config.eta, r.m + 2 * r.L + 1);
  r.mu_w = mu.cylinder(w);
  if (config.edits && !(r.nu.delta > std::exp(-1.0) * r.mu_w)) {
    std::ostringstream msg;
    msg << "hypothesis delta > e^-1 mu([w]) fails: delta = " << r.nu.delta << ", mu([w]) = " << r.mu_w;
    throw Error(ErrorCode::HypothesisViolated, msg.str());
  }

  const EntropyIntegral ei = entropy_and_integral(mu, pot);
  r.mu_entropy = ei.entropy;
  r.mu_integral = ei.integral;
  r.block_entropy = block_entropy(mu, 2 * r.L + r.m);
  r.word_sum = cylinder_birkhoff_inf(pot, w);
  const double delta = r.nu.delta;
  r.entropy_rhs = r.mu_entropy + r.nu.nu_entropy - delta * r.block_entropy - 6 * delta * std::log(2.0);
  const double gain = r.mu_integral + delta * (r.word_sum - r.m * r.mu_integral);
  r.integral_rhs_holder = gain - 2 * delta * pot.holder_c() * (r.L + 1.0 / (1.0 - pot.holder_alpha()));
  r.integral_rhs_table = gain - delta * (2 * r.L + pot.depth() - 1) * (pot.max_value() - pot.min_value());

  const Word x = sample_markov(mu, config.length, derive_seed(config.seed, 1));
  BinarySequence y = config.edits ? sample_nu(r.nu, config.length, derive_seed(config.seed, 2))
                                  : BinarySequence(config.length, 0);
  r.edits = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  const Word z = splice_map(connector_words(sft, w), w, x, y);
  if (!sft.admissible(z)) throw Error(ErrorCode::HypothesisViolated, "spliced sequence is not admissible");

  const MeanSigma base = birkhoff_batches(pot, x);
  const MeanSigma spliced = birkhoff_batches(pot, z);
  r.base_average = base.mean;
  r.base_sigma = base.sigma;
  r.birkhoff_average = spliced.mean;
  r.birkhoff_sigma = spliced.sigma;
  r.integral_pass = r.birkhoff_average >= r.integral_rhs_table - 4 * r.birkhoff_sigma;

  r.entropy_pass = true;
  for (int n = 1; n <= config.max_block; ++n) {
    if (static_cast<double>(z.size()) < 100.0 * std::pow(static_cast<double>(sft.alphabet_size()), n)) break;
    const double h = empirical_block_entropy(z, n, sft.alphabet_size());
    r.block_entropy_rate.push_back(h);
    if (h < r.entropy_rhs - r.entropy_tolerance) r.entropy_pass = false;
  }
  return r;
}

std::string format_splice_report(const SpliceReport& r) {
  std::ostringstream o;
  o << std::setprecision(17);
  o << "seed: " << r.seed << "\n"
    << "mixing_length: " << r.L << "\n"
    << "word_length: " << r.m << "\n"
    << "eta: " << r.nu.eta << "\n"
    << "M: " << r.nu.M << "\n"
    << "delta: " << r.nu.delta << "\n"
    << "nu_entropy: " << r.nu.nu_entropy << "\n"
    << "mu_word: " << r.mu_w << "\n"
    << "mu_entropy: " << r.mu_entropy << "\n"
    << "mu_integral: " << r.mu_integral << "\n"
    << "block_entropy_2L_plus_m: " << r.block_entropy << "\n"
    << "word_birkhoff_inf: " << r.word_sum << "\n"
    << "entropy_lower_bound: " << r.entropy_rhs << "\n"
    << "integral_lower_bound_holder: " << r.integral_rhs_holder << "\n"
    << "integral_lower_bound_table: " << r.integral_rhs_table << "\n"
    << "edits: " << r.edits << "\n"
    << "base_birkhoff_average: " << r.base_average << "\n"
    << "base_birkhoff_sigma: " << r.base_sigma << "\n"
    << "birkhoff_average: " << r.birkhoff_average << "\n"
    << "birkhoff_sigma: " << r.birkhoff_sigma << "\n"
    << "block_entropy_rates:";
  for (double h : r.block_entropy_rate) o << " " << h;
  o << "\n"
    << "entropy_tolerance: " << r.entropy_tolerance << "\n"
    << "integral_check: " << (r.integral_pass ? "pass" : "fail") << "\n"
    << "entropy_check: " << (r.entropy_pass ? "pass" : "fail")
    << " (consistency only: plug-in rates bound the entropy from above)\n";
  return o.str();
}

}  // namespace thermoform
