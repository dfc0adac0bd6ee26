#ifndef THERMOFORM_SPLICE_HPP
#define THERMOFORM_SPLICE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "thermoform/potential.hpp"
#include "thermoform/pressure.hpp"
#include "thermoform/sft.hpp"

namespace thermoform {

/// The stationary 0/1 process whose 1s are separated by M + G with G
/// geometric, P(G = n) = (1 - e^-eta) e^{-n eta}.
struct GapMeasureParams {
  double eta = 0.0;
  int M = 1;
  double delta = 0.0;       // frequency of 1s
  double nu_entropy = 0.0;  // nats per symbol
};

GapMeasureParams nu_closed_form(double eta, int M);

/// Standard deviation of the empirical frequency of 1s over n symbols
/// (renewal central limit theorem).
double nu_frequency_sigma(const GapMeasureParams& p, double n);

using BinarySequence = std::vector<std::uint8_t>;

/// Stationary sample: the first 1 is placed by the forward-recurrence
/// distribution, later gaps are drawn independently.
BinarySequence sample_nu(const GapMeasureParams& p, std::size_t length, std::uint64_t seed);

/// Entropy estimate of a sample of nu: the plug-in entropy of the observed
/// gaps times the observed frequency of 1s.
double nu_plugin_entropy(const BinarySequence& y);

/// Stationary sample path of a Markov measure.
Word sample_markov(const MarkovMeasure& mu, std::size_t length, std::uint64_t seed);

struct Connectors {
  int L = 0;
  std::vector<Word> prefix;  // u'(a): a u'(a) w_0 admissible
  std::vector<Word> suffix;  // u''(a): w_{m-1} u''(a) a admissible
};

/// Lexicographically least connectors of length L = mixing_length(sft).
Connectors connector_words(const Sft& sft, std::span<const int> w);

/// For every k with y_k = 1, overwrites x[k, k+2L+m) with u'(x_{k-1}) w
/// u''(x_{k+2L+m}). Edits that would need a symbol outside x are skipped.
/// Throws InvalidArgument when two 1s of y are closer than 2L+m+1.
Word splice_map(const Connectors& c, std::span<const int> w, std::span<const int> x, const BinarySequence& y);

/// H_n / n in nats from the empirical n-word frequencies. Needs at least
/// 100 |A|^n symbols.
double empirical_block_entropy(std::span<const int> seq, int n, int alphabet_size);

/// eta = exp(-1 - c2 - c1 |t|).
double tuned_eta(double c1, double c2, double t);

struct SpliceConfig {
  MarkovMeasure mu;
  Word w;
  double eta = 0.05;
  std::size_t length = 10'000'000;
  std::uint64_t seed = 1;
  bool edits = true;  // false keeps y = 0
  int max_block = 16;
};

struct SpliceReport {
  int L = 0;
  int m = 0;
  GapMeasureParams nu;
  double mu_w = 0.0;  // mu([w])
  double mu_entropy = 0.0;
  double mu_integral = 0.0;
  double block_entropy = 0.0;  // H_mu(P_{2L+m})
  double word_sum = 0.0;       // inf over [w] of S_m phi
  double entropy_rhs = 0.0;    // h(mu) + h(nu) - delta H - 6 delta log 2
  /// Integral bound with the Holder constant c and alpha of the potential.
  double integral_rhs_holder = 0.0;
  /// Same bound with the boundary loss counted site by site for a depth-k
  /// table: (2L + k - 1)(max - min) per edit.
  double integral_rhs_table = 0.0;
  std::size_t edits = 0;
  double birkhoff_average = 0.0;  // of phi along z
  double birkhoff_sigma = 0.0;    // batch-means standard error
  double base_average = 0.0;      // of phi along x
  double base_sigma = 0.0;
  std::vector<double> block_entropy_rate;  // H_n/n of z for n = 1..
  double entropy_tolerance = 0.01;
  bool integral_pass = false;  // average >= integral_rhs_table - 4 sigma
  bool entropy_pass = false;   // every H_n/n >= entropy_rhs - tolerance
  std::uint64_t seed = 0;
};

SpliceReport splice_experiment(const SpliceConfig& config, const LocallyConstantPotential& pot);

/// One "key: value" line per field.
std::string format_splice_report(const SpliceReport& r);

}  // namespace thermoform

#endif  // THERMOFORM_SPLICE_HPP
