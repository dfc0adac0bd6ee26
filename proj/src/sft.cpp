#include "thermoform/sft.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "thermoform/error.hpp"
#include "thermoform/perron.hpp"

namespace thermoform {

namespace {

using BoolMatrix = std::vector<std::uint8_t>;

BoolMatrix bool_multiply(const BoolMatrix& a, const BoolMatrix& b, int k) {
  BoolMatrix c(a.size(), 0);
  for (int i = 0; i < k; ++i)
    for (int l = 0; l < k; ++l) {
      if (!a[static_cast<std::size_t>(i * k + l)]) continue;
      for (int j = 0; j < k; ++j)
        if (b[static_cast<std::size_t>(l * k + j)]) c[static_cast<std::size_t>(i * k + j)] = 1;
    }
  return c;
}

bool all_positive(const BoolMatrix& m) {
  return std::all_of(m.begin(), m.end(), [](std::uint8_t v) { return v != 0; });
}

// Primitivity index: smallest n with A^n > 0, or 0 if none within the
// Wielandt bound (k-1)^2 + 1.
int primitivity_index(const BoolMatrix& a, int k) {
  const int bound = (k - 1) * (k - 1) + 1;
  BoolMatrix power = a;
  for (int n = 1; n <= bound; ++n) {
    if (all_positive(power)) return n;
    power = bool_multiply(power, a, k);
  }
  return 0;
}

char symbol_char(int s) {
  if (s >= 0 && s < 10) return static_cast<char>('0' + s);
  if (s >= 10 && s < 36) return static_cast<char>('a' + (s - 10));
  throw Error(ErrorCode::InvalidArgument, "symbol out of printable range: " + std::to_string(s));
}

}  // namespace

std::string word_to_string(std::span<const int> w) {
  std::string s;
  s.reserve(w.size());
  for (int c : w) s.push_back(symbol_char(c));
  return s;
}

Word word_from_string(std::string_view s) {
  Word w;
  w.reserve(s.size());
  for (char c : s) {
    if (c >= '0' && c <= '9') w.push_back(c - '0');
    else if (c >= 'a' && c <= 'z') w.push_back(10 + (c - 'a'));
    else throw Error(ErrorCode::ParseError, "invalid symbol character '" + std::string(1, c) + "' in word \"" + std::string(s) + "\"");
  }
  return w;
}

Sft::Sft(int k, std::vector<std::uint8_t> transitions)
    : k_(k), transitions_(std::move(transitions)) {
  if (k_ < 1 || k_ > 36) {
    throw Error(ErrorCode::InvalidArgument, "alphabet size must be in [1, 36], got " + std::to_string(k_));
  }
  for (int a = 0; a < k_; ++a) {
    bool row = false, col = false;
    for (int b = 0; b < k_; ++b) {
      row = row || allowed(a, b);
      col = col || allowed(b, a);
    }
    if (!row || !col) {
      throw Error(ErrorCode::NotMixing, "not mixing: symbol " + std::to_string(a) + " has an empty row or column");
    }
  }
  mixing_length_ = primitivity_index(transitions_, k_);
  if (mixing_length_ == 0) {
    throw Error(ErrorCode::NotMixing, "not mixing: transition matrix is not primitive");
  }
}

Sft Sft::from_matrix(const std::vector<std::vector<int>>& rows) {
  const int k = static_cast<int>(rows.size());
  std::vector<std::uint8_t> t(static_cast<std::size_t>(k * k), 0);
  for (int a = 0; a < k; ++a) {
    if (static_cast<int>(rows[static_cast<std::size_t>(a)].size()) != k) {
      throw Error(ErrorCode::InvalidArgument, "transition matrix is not square (row " + std::to_string(a) + ")");
    }
    for (int b = 0; b < k; ++b) {
      const int v = rows[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      if (v != 0 && v != 1) {
        throw Error(ErrorCode::InvalidArgument, "transition matrix entries must be 0 or 1");
      }
      t[static_cast<std::size_t>(a * k + b)] = static_cast<std::uint8_t>(v);
    }
  }
  return Sft(k, std::move(t));
}

Sft Sft::from_allowed(int alphabet_size, const std::vector<std::pair<int, int>>& allowed) {
  if (alphabet_size < 1) throw Error(ErrorCode::InvalidArgument, "alphabet size must be positive");
  std::vector<std::uint8_t> t(static_cast<std::size_t>(alphabet_size * alphabet_size), 0);
  for (auto [a, b] : allowed) {
    if (a < 0 || b < 0 || a >= alphabet_size || b >= alphabet_size) {
      throw Error(ErrorCode::InvalidArgument, "allowed pair out of range");
    }
    t[static_cast<std::size_t>(a * alphabet_size + b)] = 1;
  }
  return Sft(alphabet_size, std::move(t));
}

Sft Sft::full_shift(int alphabet_size) {
  return Sft(alphabet_size, std::vector<std::uint8_t>(static_cast<std::size_t>(alphabet_size * alphabet_size), 1));
}

Sft Sft::golden_mean() { return from_matrix({{1, 1}, {1, 0}}); }

bool Sft::is_full_shift() const {
  return std::all_of(transitions_.begin(), transitions_.end(), [](std::uint8_t v) { return v != 0; });
}

bool Sft::admissible(std::span<const int> w) const {
  for (int s : w)
    if (s < 0 || s >= k_) return false;
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    if (!allowed(w[i], w[i + 1])) return false;
  return true;
}

bool Sft::cyclically_admissible(std::span<const int> w) const {
  return !w.empty() && admissible(w) && allowed(w.back(), w.front());
}

std::vector<std::vector<int>> Sft::matrix() const {
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(k_), std::vector<int>(static_cast<std::size_t>(k_)));
  for (int a = 0; a < k_; ++a)
    for (int b = 0; b < k_; ++b) rows[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = allowed(a, b) ? 1 : 0;
  return rows;
}

Sft parse_sft(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, "sft spec: malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  auto fail = [](const std::string& where, const std::string& what) -> Error {
    return Error(ErrorCode::ParseError, "sft spec: at " + where + ": " + what);
  };
  if (!doc.is_object()) throw fail("/", "expected an object");
  if (!doc.contains("alphabet") || !doc["alphabet"].is_number_integer()) {
    throw fail("/alphabet", "missing or non-integer alphabet size");
  }
  const int k = doc["alphabet"].get<int>();
  if (k < 1 || k > 36) throw fail("/alphabet", "alphabet size must be in [1, 36]");

  const int forms = static_cast<int>(doc.contains("matrix")) + static_cast<int>(doc.contains("allowed")) +
                    static_cast<int>(doc.contains("forbidden"));
  if (forms != 1) throw fail("/", "exactly one of \"matrix\", \"allowed\" or \"forbidden\" is required");

  auto read_pairs = [&](const char* key) {
    const json& list = doc[key];
    if (!list.is_array()) throw fail(std::string("/") + key, "expected a list of [i, j] pairs");
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const json& p = list[i];
      const std::string where = std::string("/") + key + "/" + std::to_string(i);
      if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer()) {
        throw fail(where, "expected a pair of integers");
      }
      const int a = p[0].get<int>(), b = p[1].get<int>();
      if (a < 0 || b < 0 || a >= k || b >= k) throw fail(where, "symbol out of range");
      pairs.emplace_back(a, b);
    }
    return pairs;
  };

  if (doc.contains("matrix")) {
    const json& m = doc["matrix"];
    if (!m.is_array() || static_cast<int>(m.size()) != k) throw fail("/matrix", "expected " + std::to_string(k) + " rows");
    std::vector<std::vector<int>> rows;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const json& row = m[i];
      if (!row.is_array() || static_cast<int>(row.size()) != k) {
        throw fail("/matrix/" + std::to_string(i), "expected " + std::to_string(k) + " entries");
      }
      std::vector<int> r;
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (!row[j].is_number_integer() || (row[j].get<int>() != 0 && row[j].get<int>() != 1)) {
          throw fail("/matrix/" + std::to_string(i) + "/" + std::to_string(j), "entries must be 0 or 1");
        }
        r.push_back(row[j].get<int>());
      }
      rows.push_back(std::move(r));
    }
    return Sft::from_matrix(rows);
  }
  if (doc.contains("allowed")) return Sft::from_allowed(k, read_pairs("allowed"));

  std::vector<std::vector<int>> rows(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(k), 1));
  for (auto [a, b] : read_pairs("forbidden")) rows[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = 0;
  return Sft::from_matrix(rows);
}

Sft load_sft(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open sft spec: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_sft(buf.str());
}

std::string sft_to_json(const Sft& sft) {
  nlohmann::json doc;
  doc["alphabet"] = sft.alphabet_size();
  doc["matrix"] = sft.matrix();
  return doc.dump();
}

int mixing_length(const Sft& sft) { return sft.mixing_length(); }

double word_count(const Sft& sft, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "word length must be positive");
  const int k = sft.alphabet_size();
  std::vector<double> ends(static_cast<std::size_t>(k), 1.0), next(static_cast<std::size_t>(k));
  for (int step = 1; step < n; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        if (sft.allowed(a, b)) next[static_cast<std::size_t>(b)] += ends[static_cast<std::size_t>(a)];
    ends.swap(next);
  }
  double total = 0.0;
  for (double v : ends) total += v;
  return total;
}

std::vector<Word> enumerate_words(const Sft& sft, int n, std::size_t budget) {
  const double count = word_count(sft, n);
  if (count > static_cast<double>(budget)) {
    std::ostringstream msg;
    msg << "too large: " << count << " words of length " << n << " exceed the enumeration budget " << budget;
    throw Error(ErrorCode::TooLarge, msg.str());
  }
  const int k = sft.alphabet_size();
  std::vector<Word> out;
  out.reserve(static_cast<std::size_t>(count));
  Word w(static_cast<std::size_t>(n), 0);
  // Iterative lexicographic DFS; depth i holds the symbol being tried.
  int depth = 0;
  w[0] = -1;
  while (depth >= 0) {
    int& s = w[static_cast<std::size_t>(depth)];
    ++s;
    while (s < k && depth > 0 && !sft.allowed(w[static_cast<std::size_t>(depth - 1)], s)) ++s;
    if (s >= k) {
      --depth;
      continue;
    }
    if (depth == n - 1) {
      out.push_back(w);
    } else {
      ++depth;
      w[static_cast<std::size_t>(depth)] = -1;
    }
  }
  return out;
}

double topological_entropy(const Sft& sft) {
  const int k = sft.alphabet_size();
  LogMatrix m(k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      if (sft.allowed(a, b)) m.add(a, b, 0.0);
  return perron(m).log_root;
}

bool has_no_long_overlaps(std::span<const int> w) {
  const std::size_t m = w.size();
  for (std::size_t j = 1; 3 * j < 2 * m; ++j) {
    if (std::equal(w.begin(), w.end() - static_cast<std::ptrdiff_t>(j), w.begin() + static_cast<std::ptrdiff_t>(j))) {
      return false;
    }
  }
  return true;
}

Word find_no_overlap_word(const Sft& sft, int min_len, int max_len) {
  if (min_len < 3 * sft.mixing_length()) {
    throw Error(ErrorCode::InvalidArgument, "find_no_overlap_word: min_len must be at least 3 * mixing_length = " +
                                                std::to_string(3 * sft.mixing_length()));
  }
  if (max_len == 0) max_len = 4 * min_len;
  const int k = sft.alphabet_size();
  constexpr long kNodeBudget = 50'000'000;
  long nodes = 0;
  for (int n = min_len; n <= max_len; ++n) {
    Word w(static_cast<std::size_t>(n), 0);
    int depth = 0;
    w[0] = -1;
    while (depth >= 0) {
      if (++nodes > kNodeBudget) {
        throw Error(ErrorCode::SearchExhausted, "no-overlap word search exceeded its node budget");
      }
      int& s = w[static_cast<std::size_t>(depth)];
      ++s;
      while (s < k && depth > 0 && !sft.allowed(w[static_cast<std::size_t>(depth - 1)], s)) ++s;
      if (s >= k) {
        --depth;
        continue;
      }
      if (depth == n - 1) {
        if (has_no_long_overlaps(w)) return w;
      } else {
        ++depth;
        w[static_cast<std::size_t>(depth)] = -1;
      }
    }
  }
  throw Error(ErrorCode::SearchExhausted, "no word without long overlaps found with length in [" +
                                              std::to_string(min_len) + ", " + std::to_string(max_len) + "]");
}

std::optional<Word> connecting_word(const Sft& sft, int a, int b, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "connecting word length must be positive");
  const int k = sft.alphabet_size();
  // reach[i][s]: from symbol s at position i (1-based inside the connector)
  // the target b is reachable exactly at position n+1.
  std::vector<std::vector<std::uint8_t>> reach(static_cast<std::size_t>(n + 1),
                                               std::vector<std::uint8_t>(static_cast<std::size_t>(k), 0));
  for (int s = 0; s < k; ++s) reach[static_cast<std::size_t>(n)][static_cast<std::size_t>(s)] = sft.allowed(s, b);
  for (int i = n - 1; i >= 1; --i)
    for (int s = 0; s < k; ++s)
      for (int t = 0; t < k; ++t)
        if (sft.allowed(s, t) && reach[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(t)]) {
          reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)] = 1;
          break;
        }
  Word c;
  int prev = a;
  for (int i = 1; i <= n; ++i) {
    int chosen = -1;
    for (int s = 0; s < k; ++s)
      if (sft.allowed(prev, s) && reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)]) {
        chosen = s;
        break;
      }
    if (chosen < 0) return std::nullopt;
    c.push_back(chosen);
    prev = chosen;
  }
  return c;
}

std::vector<PeriodicOrbit> periodic_orbits(const Sft& sft, int max_period) {
  if (max_period < 1 || max_period > 16) {
    throw Error(ErrorCode::InvalidArgument, "periodic_orbits: max_period must be in [1, 16]");
  }
  std::vector<PeriodicOrbit> out;
  for (int p = 1; p <= max_period; ++p) {
    for (const Word& w : enumerate_words(sft, p)) {
      if (!sft.allowed(w.back(), w.front())) continue;
      // Lyndon test: strictly smaller than every proper rotation.
      bool lyndon = true;
      for (int r = 1; r < p && lyndon; ++r) {
        Word rot(w.begin() + r, w.end());
        rot.insert(rot.end(), w.begin(), w.begin() + r);
        if (!(w < rot)) lyndon = false;
      }
      if (lyndon) out.push_back({w});
    }
  }
  return out;
}

}  // namespace thermoform
