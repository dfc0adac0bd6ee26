#ifndef THERMOFORM_SFT_HPP
#define THERMOFORM_SFT_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace thermoform {

using Word = std::vector<int>;

/// Words print one character per symbol: 0-9 then a-z.
std::string word_to_string(std::span<const int> w);
Word word_from_string(std::string_view s);

/// A mixing two-sided subshift of finite type given by forbidden blocks of
/// length 2. Immutable after construction; construction rejects matrices
/// that are not primitive.
class Sft {
 public:
  /// rows[a][b] != 0 iff the transition a -> b is allowed.
  static Sft from_matrix(const std::vector<std::vector<int>>& rows);
  static Sft from_allowed(int alphabet_size, const std::vector<std::pair<int, int>>& allowed);
  static Sft full_shift(int alphabet_size);
  static Sft golden_mean();

  int alphabet_size() const { return k_; }
  bool allowed(int a, int b) const {
    return transitions_[static_cast<std::size_t>(a * k_ + b)] != 0;
  }
  /// Smallest L >= 1 with every boolean power A^n, n >= L, entrywise positive.
  int mixing_length() const { return mixing_length_; }
  bool is_full_shift() const;

  bool admissible(std::span<const int> w) const;
  bool cyclically_admissible(std::span<const int> w) const;

  std::vector<std::vector<int>> matrix() const;

 private:
  Sft(int k, std::vector<std::uint8_t> transitions);

  int k_ = 0;
  std::vector<std::uint8_t> transitions_;
  int mixing_length_ = 0;
};

struct PeriodicOrbit {
  Word word;  // lexicographically least rotation, primitive
  int period() const { return static_cast<int>(word.size()); }
};

/// Parses the SFT spec format: a JSON object with "alphabet" and exactly one
/// of "matrix", "allowed" or "forbidden" (pairs of 0-indexed symbols).
Sft parse_sft(std::string_view text);
Sft load_sft(const std::string& path);
std::string sft_to_json(const Sft& sft);

int mixing_length(const Sft& sft);

/// Number of admissible words of length n (sum of entries of A^(n-1)).
/// Returned as a double; exact while below 2^53.
double word_count(const Sft& sft, int n);

inline constexpr std::size_t kDefaultEnumerationBudget = 10'000'000;

/// All admissible words of length n in lexicographic order.
/// Throws Error(TooLarge) when the count exceeds the budget.
std::vector<Word> enumerate_words(const Sft& sft, int n,
                                  std::size_t budget = kDefaultEnumerationBudget);

/// log of the Perron root of the transition matrix, in nats.
double topological_entropy(const Sft& sft);

/// True if no j with 1 <= j < 2|w|/3 has w_0..w_{m-1-j} == w_j..w_{m-1}.
bool has_no_long_overlaps(std::span<const int> w);

/// Lexicographically least admissible word with no long overlaps among
/// lengths min_len, min_len+1, ..., max_len (default 4*min_len).
/// Throws Error(SearchExhausted) if none is found.
Word find_no_overlap_word(const Sft& sft, int min_len, int max_len = 0);

/// Lexicographically least word c of length n with a c b admissible.
std::optional<Word> connecting_word(const Sft& sft, int a, int b, int n);

/// Primitive cyclically admissible words up to rotation, periods 1..max_period.
std::vector<PeriodicOrbit> periodic_orbits(const Sft& sft, int max_period);

}  // namespace thermoform

#endif  // THERMOFORM_SFT_HPP
