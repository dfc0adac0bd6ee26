#include "thermoform/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "thermoform/error.hpp"
#include "thermoform/perron.hpp"

namespace thermoform {

namespace {

constexpr double kRothsteinSymbolBudget = 5e7;

void check_n_seq(std::span<const int> n_seq, int j) {
  if (j < 0 || j > static_cast<int>(n_seq.size())) {
    throw Error(ErrorCode::InvalidArgument, "Rothstein level " + std::to_string(j) + " needs n_1 ... n_j");
  }
  for (std::size_t i = 0; i < n_seq.size(); ++i) {
    if (n_seq[i] < 1) throw Error(ErrorCode::InvalidArgument, "Rothstein n_j must be positive");
    if (i > 0 && n_seq[i] <= n_seq[i - 1]) throw Error(ErrorCode::InvalidArgument, "Rothstein n_j must be increasing");
  }
}

BigInt level_length(std::span<const int> n_seq, int j) {
  BigInt l = 1;
  for (int i = 0; i < j; ++i) l *= 2 * n_seq[static_cast<std::size_t>(i)];
  return l;
}

// Lexicographically first `limit` admissible words of length n.
std::vector<Word> first_words(const Sft& sft, int n, std::size_t limit) {
  std::vector<Word> out;
  Word w(static_cast<std::size_t>(n), -1);
  int d = 0;
  while (d >= 0 && out.size() < limit) {
    int& s = w[static_cast<std::size_t>(d)];
    ++s;
    while (s < sft.alphabet_size() && d > 0 && !sft.allowed(w[static_cast<std::size_t>(d - 1)], s)) ++s;
    if (s >= sft.alphabet_size()) {
      s = -1;
      --d;
      continue;
    }
    if (d == n - 1) out.push_back(w);
    else ++d;
  }
  return out;
}

}  // namespace

std::pair<BigInt, BigInt> RothsteinLevel::entropy_over_log2() const {
  // log(2^E) / l_j = E / l_j
  const BigInt g = boost::multiprecision::gcd(product, word_length);
  return {product / g, word_length / g};
}

double RothsteinLevel::entropy() const {
  const auto [num, den] = entropy_over_log2();
  return num.convert_to<double>() / den.convert_to<double>() * std::log(2.0);
}

RothsteinLevel rothstein_level(std::span<const int> n_seq, int j, std::size_t budget) {
  check_n_seq(n_seq, j);
  RothsteinLevel level;
  level.n_seq.assign(n_seq.begin(), n_seq.begin() + j);
  level.j = j;
  level.product = 1;
  for (int i = 0; i < j; ++i) level.product *= n_seq[static_cast<std::size_t>(i)];
  level.word_length = level_length(n_seq, j);
  // 2^E with E = n_1 ... n_j; E is far below 2^32 for every level we can name.
  if (level.product > 100'000'000) throw Error(ErrorCode::TooLarge, "Rothstein level too large to count");
  level.word_count = BigInt(1) << level.product.convert_to<unsigned>();

  const bool fits = level.word_count <= budget &&
                    (level.word_count * level.word_length).convert_to<double>() <= kRothsteinSymbolBudget;
  if (!fits) return level;
  level.explicit_words = true;
  std::vector<Word> words{{0}, {1}};
  for (int i = 0; i < j; ++i) {
    const int n = n_seq[static_cast<std::size_t>(i)];
    std::vector<Word> next;
    std::vector<std::size_t> pick(static_cast<std::size_t>(n), 0);
    while (true) {
      Word half;
      for (std::size_t p : pick) half.insert(half.end(), words[p].begin(), words[p].end());
      Word doubled = half;
      doubled.insert(doubled.end(), half.begin(), half.end());
      next.push_back(std::move(doubled));
      int pos = n - 1;
      while (pos >= 0 && ++pick[static_cast<std::size_t>(pos)] == words.size()) pick[static_cast<std::size_t>(pos--)] = 0;
      if (pos < 0) break;
    }
    words.swap(next);
  }
  level.words = std::move(words);
  return level;
}

bool rothstein_member(std::span<const int> n_seq, int j, std::span<const int> word) {
  check_n_seq(n_seq, j);
  if (j == 0) return word.size() == 1 && (word[0] == 0 || word[0] == 1);
  const BigInt l = level_length(n_seq, j);
  if (BigInt(word.size()) != l) return false;
  const std::size_t half = word.size() / 2;
  if (!std::equal(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(half), word.begin() + static_cast<std::ptrdiff_t>(half)))
    return false;
  const int n = n_seq[static_cast<std::size_t>(j - 1)];
  const std::size_t block = half / static_cast<std::size_t>(n);
  for (int i = 0; i < n; ++i)
    if (!rothstein_member(n_seq, j - 1, word.subspan(static_cast<std::size_t>(i) * block, block))) return false;
  return true;
}

RothsteinWindow rothstein_window(std::span<const int> n_seq, int j, const std::vector<Word>& blocks, std::size_t start) {
  if (j < 1 || j + 1 > static_cast<int>(n_seq.size())) {
    throw Error(ErrorCode::InvalidArgument, "distance witness needs 1 <= j and n_{j+1}");
  }
  const int N = n_seq[static_cast<std::size_t>(j)];
  if (static_cast<int>(blocks.size()) != 2 * N) {
    throw Error(ErrorCode::InvalidArgument, "window must be covered by 2 n_{j+1} = " + std::to_string(2 * N) + " blocks of W_j");
  }
  for (std::size_t i = 0; i < blocks.size(); ++i)
    if (!rothstein_member(n_seq, j, blocks[i])) {
      throw Error(ErrorCode::InvalidArgument, "window not aligned to W_" + std::to_string(j) + ": block " + std::to_string(i) +
                                                  " is not a W_" + std::to_string(j) + " word");
    }
  if (start > blocks.front().size()) throw Error(ErrorCode::InvalidArgument, "window start lies beyond the first block");
  return {blocks, start};
}

RothsteinWitness rothstein_distance_witness(std::span<const int> n_seq, int j, const RothsteinWindow& window) {
  const RothsteinWindow w = rothstein_window(n_seq, j, window.blocks, window.start);
  const auto N = static_cast<std::size_t>(n_seq[static_cast<std::size_t>(j)]);
  const std::size_t lj = w.blocks.front().size();
  const std::size_t n = (2 * N - 1) * lj / 2;  // (l_{j+1} - l_j) / 2
  Word u, v;
  for (std::size_t i = 0; i < N; ++i) u.insert(u.end(), w.blocks[i].begin(), w.blocks[i].end());
  for (std::size_t i = N; i < 2 * N; ++i) v.insert(v.end(), w.blocks[i].begin(), w.blocks[i].end());
  RothsteinWitness out;
  out.word = u;
  out.word.insert(out.word.end(), u.begin(), u.end());
  out.word.insert(out.word.end(), v.begin(), v.end());
  out.word.insert(out.word.end(), v.begin(), v.end());

  // The window sits in uv = C at [start, start + 2n); uv starts at |u| in uuvv.
  Word c = u;
  c.insert(c.end(), v.begin(), v.end());
  const std::size_t offset = u.size() + w.start;
  out.center = offset + n;
  long long r = 0;
  while (static_cast<std::size_t>(r) < n && out.word[out.center + static_cast<std::size_t>(r)] == c[w.start + n + static_cast<std::size_t>(r)] &&
         out.word[out.center - 1 - static_cast<std::size_t>(r)] == c[w.start + n - 1 - static_cast<std::size_t>(r)])
    ++r;
  // Agreement on -r..r-1 covers |i| < r.
  out.radius = r;
  long long formula = 1;
  for (int i = 0; i < j; ++i) formula *= n_seq[static_cast<std::size_t>(i)];
  out.formula_radius = (formula << (j - 1)) * (2 * static_cast<long long>(N) - 1);
  return out;
}

double beta_from_digits(std::span<const int> digits) {
  auto f = [&](double x) {
    double s = 0.0, p = 1.0;
    for (int d : digits) {
      p /= x;
      s += d * p;
    }
    return s - 1.0;
  };
  double lo = 1.0, hi = digits.empty() ? 2.0 : digits.front() + 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

bool parry_admissible(std::span<const int> digits) {
  const std::size_t m = digits.size();
  if (m == 0 || digits.front() < 1 || digits.back() < 1) return false;
  if (std::any_of(digits.begin(), digits.end(), [](int d) { return d < 0; })) return false;
  if (m == 1 && digits.front() == 1) return false;  // beta = 1
  for (std::size_t i = 1; i < m; ++i) {
    // Compare d_{i+1} ... d_m 0 ... with d_1 ... d_m.
    int cmp = 0;
    for (std::size_t k = 0; k < m && cmp == 0; ++k) {
      const int a = i + k < m ? digits[i + k] : 0;
      cmp = (a > digits[k]) - (a < digits[k]);
    }
    if (cmp >= 0) return false;
  }
  return true;
}

int BetaShiftSpec::alphabet_size() const { return digits.empty() ? 0 : digits.front() + (digits.size() > 1 ? 1 : 0); }

BetaShiftSpec beta_shift_from_digits(std::span<const int> digits) {
  if (!parry_admissible(digits)) {
    std::string s;
    for (int d : digits) s += (s.empty() ? "" : ",") + std::to_string(d);
    throw Error(ErrorCode::InvalidArgument, "digits (" + s + ") are not an admissible expansion of 1");
  }
  BetaShiftSpec b;
  b.digits.assign(digits.begin(), digits.end());
  b.beta = beta_from_digits(digits);
  const int m = static_cast<int>(digits.size());
  std::vector<int> star(digits.begin(), digits.end());
  star.back() -= 1;
  auto& to = b.to;
  for (int i = 0; i < m; ++i)
    for (int a = 0; a <= star[static_cast<std::size_t>(i)]; ++a) {
      b.from.push_back(i);
      b.labels.push_back(a);
      to.push_back(a < star[static_cast<std::size_t>(i)] ? 0 : (i + 1) % m);
    }
  const int e = static_cast<int>(b.labels.size());
  if (e > 36) return b;
  std::vector<std::pair<int, int>> allowed;
  for (int x = 0; x < e; ++x)
    for (int y = 0; y < e; ++y)
      if (to[static_cast<std::size_t>(x)] == b.from[static_cast<std::size_t>(y)]) allowed.push_back({x, y});
  b.sft = Sft::from_allowed(e, allowed);
  return b;
}

double BetaShiftSpec::entropy() const {
  const int m = static_cast<int>(digits.size());
  std::vector<double> mult(static_cast<std::size_t>(m * m), 0.0);
  for (std::size_t e = 0; e < labels.size(); ++e) mult[static_cast<std::size_t>(from[e] * m + to[e])] += 1.0;
  LogMatrix a(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (mult[static_cast<std::size_t>(i * m + j)] > 0) a.add(i, j, std::log(mult[static_cast<std::size_t>(i * m + j)]));
  return perron(a).log_root;
}

double beta_word_count(const BetaShiftSpec& b, int n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "word length must be nonnegative");
  const int m = static_cast<int>(b.digits.size());
  std::vector<double> at(static_cast<std::size_t>(m), 0.0), next(static_cast<std::size_t>(m));
  at[0] = 1.0;
  for (int step = 0; step < n; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t e = 0; e < b.labels.size(); ++e)
      next[static_cast<std::size_t>(b.to[e])] += at[static_cast<std::size_t>(b.from[e])];
    at.swap(next);
  }
  double total = 0.0;
  for (double v : at) total += v;
  return total;
}

std::vector<int> approximate_beta_digits(double beta, double log_tol, int max_digits) {
  if (!(beta > 1.0)) throw Error(ErrorCode::InvalidArgument, "beta must exceed 1");
  std::vector<int> d;
  double r = 1.0;
  for (int i = 0; i < max_digits; ++i) {
    const double x = beta * r;
    const int digit = static_cast<int>(std::floor(x));
    r = x - digit;
    d.push_back(digit);
    if (digit > 0 && parry_admissible(d) && std::abs(std::log(beta_from_digits(d)) - std::log(beta)) < log_tol) return d;
    if (r == 0.0) break;
  }
  throw Error(ErrorCode::SearchExhausted, "no finite expansion of 1 within tolerance for beta = " + std::to_string(beta));
}

double YConstruction::entropy_per_symbol() const { return beta ? std::log(beta->beta) / ell : 0.0; }

YConstruction build_Y(const Sft& sft, double b, std::span<const int> u, std::optional<std::vector<int>> digits) {
  const double h = topological_entropy(sft);
  if (!(b >= 0.0 && b < h)) {
    throw Error(ErrorCode::InvalidArgument, "build_Y needs 0 <= b < h_top = " + std::to_string(h));
  }
  if (u.empty() || !sft.admissible(u)) throw Error(ErrorCode::InvalidArgument, "build_Y: u is not an admissible word");
  YConstruction y;
  y.b = b;
  y.L = sft.mixing_length();
  const int extra = static_cast<int>(u.size()) + 2 * y.L;
  for (int n = 1;; ++n) {
    if (n > 100'000) throw Error(ErrorCode::SearchExhausted, "build_Y: no word length found below 10^5");
    if (std::log(word_count(sft, n)) > b * (n + extra)) {
      y.n = n;
      break;
    }
  }
  y.ell = y.n + extra;
  y.target_log_beta = b * y.ell;
  const double n_real = std::ceil(std::exp(y.target_log_beta));
  if (n_real > static_cast<double>(kYAlphabetBudget)) {
    throw Error(ErrorCode::TooLarge, "build_Y: alphabet of " + std::to_string(n_real) + " words exceeds the budget");
  }
  y.N = static_cast<long long>(n_real);

  const std::vector<Word> v = first_words(sft, y.n, static_cast<std::size_t>(y.N));
  for (const Word& vi : v) {
    auto p = connecting_word(sft, u.back(), vi.front(), y.L);
    auto q = connecting_word(sft, vi.back(), u.front(), y.L);
    if (!p || !q) throw Error(ErrorCode::SearchExhausted, "build_Y: connector search failed");
    Word w(u.begin(), u.end());
    w.insert(w.end(), p->begin(), p->end());
    w.insert(w.end(), vi.begin(), vi.end());
    w.insert(w.end(), q->begin(), q->end());
    y.alphabet.push_back(std::move(w));
  }
  if (y.N > 1) {
    std::vector<int> d = digits ? *digits : approximate_beta_digits(std::exp(y.target_log_beta));
    BetaShiftSpec spec = beta_shift_from_digits(d);
    if (std::abs(std::log(spec.beta) - y.target_log_beta) > 1e-3) {
      throw Error(ErrorCode::InvalidArgument, "beta digits give log beta = " + std::to_string(std::log(spec.beta)) +
                                                  ", not within 1e-3 of b * ell = " + std::to_string(y.target_log_beta));
    }
    if (spec.alphabet_size() > y.N) throw Error(ErrorCode::InvalidArgument, "beta-shift alphabet exceeds N");
    y.beta = std::move(spec);
  }
  return y;
}

SunnyBound sunny_lower_bound(double t, int n_max) {
  if (n_max < 1 || n_max > 60) throw Error(ErrorCode::InvalidArgument, "sunny_lower_bound needs 1 <= n_max <= 60");
  SunnyBound best{-std::numeric_limits<double>::infinity(), 0};
  for (int n = 1; n <= n_max; ++n) {
    const double v = std::log(n + 1.0) / (2.5 * n) - t * std::ldexp(1.0, -n);
    if (v > best.value) best = {v, n};
  }
  return best;
}

double generic_upper_curve(int alphabet_size, double a, int k, double t) {
  if (alphabet_size < 1 || !(a > 0) || k < 0) throw Error(ErrorCode::InvalidArgument, "generic_upper_curve: bad arguments");
  return std::log1p((alphabet_size - 1) * std::exp(-a * t * std::ldexp(1.0, -k)));
}

std::string format_rothstein(const RothsteinLevel& level) {
  std::ostringstream o;
  o << "level: " << level.j << "\n" << "n_seq:";
  for (int n : level.n_seq) o << " " << n;
  const auto [num, den] = level.entropy_over_log2();
  o << "\nword_length: " << level.word_length << "\n"
    << "word_count: " << level.word_count << "\n"
    << "entropy_over_log2: " << num << "/" << den << "\n"
    << std::setprecision(17) << "entropy: " << level.entropy() << "\n"
    << "explicit: " << (level.explicit_words ? "yes" : "no") << "\n";
  if (level.explicit_words)
    for (const Word& w : level.words) o << word_to_string(w) << "\n";
  return o.str();
}

std::string format_beta_shift(const BetaShiftSpec& b) {
  std::ostringstream o;
  o << std::setprecision(17) << "digits:";
  for (int d : b.digits) o << " " << d;
  o << "\nbeta: " << b.beta << "\n"
    << "log_beta: " << std::log(b.beta) << "\n"
    << "edge_symbols: " << b.labels.size() << "\n"
    << "entropy: " << b.entropy() << "\n";
  if (b.sft) o << "sft: " << sft_to_json(*b.sft) << "\n";
  return o.str();
}

std::string format_y(const YConstruction& y) {
  std::ostringstream o;
  o << std::setprecision(17) << "b: " << y.b << "\n"
    << "n: " << y.n << "\n"
    << "mixing_length: " << y.L << "\n"
    << "ell: " << y.ell << "\n"
    << "N: " << y.N << "\n"
    << "target_log_beta: " << y.target_log_beta << "\n";
  if (y.beta) {
    o << "beta_digits:";
    for (int d : y.beta->digits) o << " " << d;
    o << "\nbeta: " << y.beta->beta << "\n";
  }
  o << "entropy_per_symbol: " << y.entropy_per_symbol() << "\n";
  return o.str();
}

}  // namespace thermoform
