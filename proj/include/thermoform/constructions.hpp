#ifndef THERMOFORM_CONSTRUCTIONS_HPP
#define THERMOFORM_CONSTRUCTIONS_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thermoform/sft.hpp"

namespace thermoform {

using BigInt = boost::multiprecision::cpp_int;

/// Level j of the Rothstein construction: W_0 = {0, 1} and
/// W_{j+1} = { ww : w a concatenation of n_{j+1} words of W_j }.
struct RothsteinLevel {
  std::vector<int> n_seq;
  int j = 0;
  BigInt product;      // n_1 ... n_j
  BigInt word_length;  // l_j = 2^j n_1 ... n_j
  BigInt word_count;   // 2^(n_1 ... n_j)
  bool explicit_words = false;
  std::vector<Word> words;  // lexicographic, when explicit

  /// Entropy log(count) / l_j as a multiple of log 2, reduced: numerator
  /// and denominator.
  std::pair<BigInt, BigInt> entropy_over_log2() const;
  double entropy() const;
};

inline constexpr std::size_t kRothsteinWordBudget = 100'000;

/// Words are listed only while there are at most `budget` of them and their
/// total length stays below 5 * 10^7 symbols; otherwise counts only.
RothsteinLevel rothstein_level(std::span<const int> n_seq, int j, std::size_t budget = kRothsteinWordBudget);

/// Membership in W_j through the doubled-concatenation structure.
bool rothstein_member(std::span<const int> n_seq, int j, std::span<const int> word);

/// A point z of Z_j near the origin, given as the 2 n_{j+1} blocks
/// w_{-n_{j+1}}, ..., w_{n_{j+1}-1} of W_j whose concatenation C contains the
/// window z_{-n} ... z_{n-1}, n = (l_{j+1} - l_j) / 2, at C[start, start + 2n).
struct RothsteinWindow {
  std::vector<Word> blocks;
  std::size_t start = 0;
};

struct RothsteinWitness {
  Word word;             // uuvv, a concatenation of two W_{j+1} words
  std::size_t center = 0;  // index of coordinate 0 of the window inside word
  long long radius = 0;    // verified: word agrees with z on |i| < radius
  long long formula_radius = 0;  // 2^{j-1} n_1 ... n_j (2 n_{j+1} - 1)
};

RothsteinWindow rothstein_window(std::span<const int> n_seq, int j, const std::vector<Word>& blocks, std::size_t start);
RothsteinWitness rothstein_distance_witness(std::span<const int> n_seq, int j, const RothsteinWindow& window);

/// The beta-shift whose expansion of 1 is finite, d_1 ... d_m.
struct BetaShiftSpec {
  std::vector<int> digits;
  double beta = 0.0;
  /// Edge shift of the follower graph: state i means the last i symbols
  /// match d*_1 ... d*_i, d* = (d_1 ... d_{m-1} (d_m - 1))^inf. Present
  /// while the edge count fits an Sft alphabet (36 symbols).
  std::optional<Sft> sft;
  std::vector<int> labels;  // digit carried by each edge symbol
  std::vector<int> from;    // source state of each edge symbol
  std::vector<int> to;      // target state of each edge symbol
  int alphabet_size() const;  // number of digits, ceil(beta)
  /// log of the Perron root of the follower graph.
  double entropy() const;
};

BetaShiftSpec beta_shift_from_digits(std::span<const int> digits);

/// Root beta > 1 of sum_i d_i beta^-i = 1.
double beta_from_digits(std::span<const int> digits);

/// True when every shift of d (followed by zeros) is lexicographically below d.
bool parry_admissible(std::span<const int> digits);

/// Number of beta-shift words of length n (paths from the initial state).
double beta_word_count(const BetaShiftSpec& b, int n);

/// Finite truncation of the greedy expansion of 1 in base beta whose root
/// is within tol of beta in log scale.
std::vector<int> approximate_beta_digits(double beta, double log_tol = 1e-3, int max_digits = 64);

struct YConstruction {
  int n = 0;
  int L = 0;
  int ell = 0;
  long long N = 0;
  double b = 0.0;
  double target_log_beta = 0.0;  // b * ell
  std::optional<BetaShiftSpec> beta;  // absent when N = 1
  std::vector<Word> alphabet;         // w_i = u p_i v_i q_i
  double entropy_per_symbol() const;  // log beta / ell
};

inline constexpr long long kYAlphabetBudget = 100'000;

/// Subshift of X of entropy ~ b whose points are concatenations of
/// ell-words that all begin with u. When digits are not given the greedy
/// expansion of e^{b ell} is truncated until its root is within 1e-3 in log.
YConstruction build_Y(const Sft& sft, double b, std::span<const int> u,
                      std::optional<std::vector<int>> digits = std::nullopt);

/// max over 1 <= n <= n_max of log(n+1) / (2.5 n) - t 2^-n.
struct SunnyBound {
  double value = 0.0;
  int n = 0;
};
SunnyBound sunny_lower_bound(double t, int n_max);

/// log(1 + (|A| - 1) e^{-a t / 2^k}).
double generic_upper_curve(int alphabet_size, double a, int k, double t);

std::string format_rothstein(const RothsteinLevel& level);
std::string format_beta_shift(const BetaShiftSpec& b);
std::string format_y(const YConstruction& y);

}  // namespace thermoform

#endif  // THERMOFORM_CONSTRUCTIONS_HPP
