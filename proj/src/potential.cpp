#include "thermoform/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "thermoform/error.hpp"

namespace thermoform {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Blocks of S after removing those that cannot extend bi-infinitely.
std::set<Word> trim_blocks(const std::vector<Word>& blocks) {
  std::set<Word> live(blocks.begin(), blocks.end());
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = live.begin(); it != live.end();) {
      const Word& b = *it;
      Word tail(b.begin() + 1, b.end()), head(b.begin(), b.end() - 1);
      bool has_next = false, has_prev = false;
      for (const Word& c : live) {
        if (std::equal(tail.begin(), tail.end(), c.begin())) has_next = true;
        if (std::equal(head.begin(), head.end(), c.begin() + 1)) has_prev = true;
        if (has_next && has_prev) break;
      }
      if (!has_next || !has_prev) {
        it = live.erase(it);
        changed = true;
      } else {
        ++it;
      }
    }
  }
  return live;
}

}  // namespace

std::vector<Word> trimmed_blocks(const std::vector<Word>& blocks) {
  const std::set<Word> live = trim_blocks(blocks);
  return {live.begin(), live.end()};
}

const char* variant_name(PotentialVariant v) {
  switch (v) {
    case PotentialVariant::ExplicitTable: return "explicit-table";
    case PotentialVariant::Coordinate: return "coordinate";
    case PotentialVariant::DistOrbit: return "dist-orbit";
    case PotentialVariant::DistSunny: return "dist-sunny";
    case PotentialVariant::DistSubshift: return "dist-subshift";
  }
  return "unknown";
}

PotentialSpec PotentialSpec::explicit_table(std::map<std::string, double> table) {
  PotentialSpec s;
  s.variant = PotentialVariant::ExplicitTable;
  s.table = std::move(table);
  return s;
}

PotentialSpec PotentialSpec::coordinate_values(std::vector<double> values) {
  PotentialSpec s;
  s.variant = PotentialVariant::Coordinate;
  s.coordinate = std::move(values);
  return s;
}

PotentialSpec PotentialSpec::dist_orbit(Word p, double a, double alpha) {
  PotentialSpec s;
  s.variant = PotentialVariant::DistOrbit;
  s.orbit = std::move(p);
  s.scale = a;
  s.alpha = alpha;
  return s;
}

PotentialSpec PotentialSpec::dist_sunny() {
  PotentialSpec s;
  s.variant = PotentialVariant::DistSunny;
  return s;
}

PotentialSpec PotentialSpec::dist_subshift(std::vector<Word> blocks) {
  PotentialSpec s;
  s.variant = PotentialVariant::DistSubshift;
  s.blocks = std::move(blocks);
  return s;
}

std::pair<PotentialSpec, int> parse_potential_spec(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, "potential spec: malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  auto fail = [](const std::string& where, const std::string& what) {
    return Error(ErrorCode::ParseError, "potential spec: at " + where + ": " + what);
  };
  if (!doc.is_object()) throw fail("/", "expected an object");
  if (!doc.contains("variant") || !doc["variant"].is_string()) throw fail("/variant", "missing variant name");
  int depth = 0;
  if (doc.contains("depth")) {
    if (!doc["depth"].is_number_integer()) throw fail("/depth", "expected an integer");
    depth = doc["depth"].get<int>();
  }
  const std::string variant = doc["variant"].get<std::string>();
  try {
    if (variant == "explicit-table") {
      if (!doc.contains("table") || !doc["table"].is_object()) throw fail("/table", "expected an object of word: value");
      std::map<std::string, double> table;
      for (auto& [key, value] : doc["table"].items()) {
        if (!value.is_number()) throw fail("/table/" + key, "expected a number");
        table[key] = value.get<double>();
      }
      return {PotentialSpec::explicit_table(std::move(table)), depth};
    }
    if (variant == "coordinate") {
      if (!doc.contains("values") || !doc["values"].is_array()) throw fail("/values", "expected a list of numbers");
      return {PotentialSpec::coordinate_values(doc["values"].get<std::vector<double>>()), depth};
    }
    if (variant == "dist-orbit") {
      if (!doc.contains("orbit") || !doc["orbit"].is_string()) throw fail("/orbit", "expected a word string");
      const double a = doc.value("a", 1.0);
      const double alpha = doc.value("alpha", 0.5);
      return {PotentialSpec::dist_orbit(word_from_string(doc["orbit"].get<std::string>()), a, alpha), depth};
    }
    if (variant == "dist-sunny") return {PotentialSpec::dist_sunny(), depth};
    if (variant == "dist-subshift") {
      if (!doc.contains("blocks") || !doc["blocks"].is_array()) throw fail("/blocks", "expected a list of word strings");
      std::vector<Word> blocks;
      for (const auto& b : doc["blocks"]) {
        if (!b.is_string()) throw fail("/blocks", "expected word strings");
        blocks.push_back(word_from_string(b.get<std::string>()));
      }
      return {PotentialSpec::dist_subshift(std::move(blocks)), depth};
    }
  } catch (const json::exception& e) {
    throw fail("/", e.what());
  }
  throw fail("/variant", "unknown variant \"" + variant + "\"");
}

std::pair<PotentialSpec, int> load_potential_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open potential spec: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_potential_spec(buf.str());
}

double truncation_bound(const PotentialSpec& spec, int depth) {
  if (!spec.is_distance()) return 0.0;
  const int r = (depth - 1) / 2;
  if (spec.variant == PotentialVariant::DistOrbit) return spec.scale * std::pow(spec.alpha, r);
  return std::ldexp(1.0, -r);
}

int default_depth(const PotentialSpec& spec) {
  if (spec.is_distance()) return 9;
  if (spec.variant == PotentialVariant::ExplicitTable && !spec.table.empty())
    return static_cast<int>(spec.table.begin()->first.size());
  return 1;
}

LocallyConstantPotential::LocallyConstantPotential(Sft sft, PotentialSpec spec, int depth)
    : sft_(std::move(sft)), spec_(std::move(spec)), depth_(depth) {
  const int k = sft_.alphabet_size();
  switch (spec_.variant) {
    case PotentialVariant::ExplicitTable: {
      if (spec_.table.empty()) throw Error(ErrorCode::InvalidArgument, "explicit table is empty");
      const int len = static_cast<int>(spec_.table.begin()->first.size());
      if (depth_ == 0) depth_ = len;
      if (depth_ != len) {
        throw Error(ErrorCode::InvalidArgument, "explicit table words have length " + std::to_string(len) +
                                                    " but depth " + std::to_string(depth_) + " was requested");
      }
      for (const auto& [key, value] : spec_.table) {
        const Word w = word_from_string(key);
        if (static_cast<int>(w.size()) != len) throw Error(ErrorCode::InvalidArgument, "explicit table words differ in length");
        if (!sft_.admissible(w)) throw Error(ErrorCode::InvalidArgument, "explicit table word \"" + key + "\" is not admissible");
      }
      break;
    }
    case PotentialVariant::Coordinate:
      if (static_cast<int>(spec_.coordinate.size()) != k) {
        throw Error(ErrorCode::InvalidArgument, "coordinate potential needs one value per symbol");
      }
      if (depth_ == 0) depth_ = 1;
      break;
    case PotentialVariant::DistOrbit:
      if (!sft_.cyclically_admissible(spec_.orbit)) {
        throw Error(ErrorCode::InvalidArgument, "orbit word \"" + word_to_string(spec_.orbit) + "\" is not cyclically admissible");
      }
      if (!(spec_.alpha > 0.0 && spec_.alpha < 1.0) || !(spec_.scale > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "dist-orbit needs a > 0 and alpha in (0, 1)");
      }
      break;
    case PotentialVariant::DistSunny:
      if (!sft_.allowed(0, 0)) throw Error(ErrorCode::InvalidArgument, "dist-sunny needs the fixed point of symbol 0");
      break;
    case PotentialVariant::DistSubshift: {
      if (spec_.blocks.empty()) throw Error(ErrorCode::InvalidArgument, "dist-subshift needs at least one block");
      const std::size_t m = spec_.blocks.front().size();
      for (const Word& b : spec_.blocks) {
        if (b.size() != m || m < 2) throw Error(ErrorCode::InvalidArgument, "dist-subshift blocks must share a length >= 2");
        if (!sft_.admissible(b)) {
          throw Error(ErrorCode::InvalidArgument, "dist-subshift block \"" + word_to_string(b) + "\" is not admissible");
        }
      }
      break;
    }
  }
  if (depth_ < 1) throw Error(ErrorCode::InvalidArgument, "depth must be positive");
  if (spec_.is_distance() && depth_ % 2 == 0) {
    throw Error(ErrorCode::InvalidArgument, "distance potentials need an odd depth (symmetric window)");
  }

  const int r = (depth_ - 1) / 2;
  truncation_error_ = truncation_bound(spec_, depth_);
  holder_alpha_ = spec_.variant == PotentialVariant::DistOrbit ? spec_.alpha : 0.5;

  if (spec_.variant == PotentialVariant::DistSubshift) {
    const std::set<Word> live = trim_blocks(spec_.blocks);
    if (live.empty()) throw Error(ErrorCode::InvalidArgument, "dist-subshift blocks define an empty subshift");
    // language_[len] holds the admissible words of S of length len < m as
    // a sorted flat list; longer words are checked block by block.
    const std::size_t m = spec_.blocks.front().size();
    subshift_language_.assign(1, {});
    for (const Word& b : live) {
      std::vector<std::uint8_t> bytes(b.begin(), b.end());
      subshift_language_[0].insert(subshift_language_[0].end(), bytes.begin(), bytes.end());
    }
    subshift_language_[0].push_back(static_cast<std::uint8_t>(m));
  }

  // Materialise when the dense index fits the budget.
  const double dense = std::pow(static_cast<double>(k), depth_);
  if (dense <= static_cast<double>(kMaterializeBudget)) {
    table_.assign(static_cast<std::size_t>(dense), kNaN);
    min_ = std::numeric_limits<double>::infinity();
    max_ = -std::numeric_limits<double>::infinity();
    for (const Word& w : enumerate_words(sft_, depth_, kMaterializeBudget)) {
      const double v = evaluate(w);
      table_[index(w)] = v;
      min_ = std::min(min_, v);
      max_ = std::max(max_, v);
    }
  } else {
    // Distance potentials take values in [-c, 0]; the extremes are attained
    // on the all-zero window (or orbit window) and a dense window.
    min_ = spec_.variant == PotentialVariant::DistOrbit ? -spec_.scale : -1.0;
    max_ = spec_.variant == PotentialVariant::DistOrbit ? -spec_.scale * std::pow(spec_.alpha, r + 1)
                                                        : -std::ldexp(1.0, -(r + 1));
  }

  switch (spec_.variant) {
    case PotentialVariant::DistOrbit: holder_c_ = spec_.scale; break;
    case PotentialVariant::DistSunny:
    case PotentialVariant::DistSubshift: holder_c_ = 1.0; break;
    default: holder_c_ = (max_ - min_) * std::ldexp(1.0, depth_ - 1); break;
  }
}

std::size_t LocallyConstantPotential::index(std::span<const int> window) const {
  std::size_t idx = 0;
  const auto k = static_cast<std::size_t>(sft_.alphabet_size());
  for (int s : window) idx = idx * k + static_cast<std::size_t>(s);
  return idx;
}

double LocallyConstantPotential::value(std::span<const int> window) const {
  if (static_cast<int>(window.size()) != depth_) {
    throw Error(ErrorCode::InvalidArgument, "window length differs from potential depth");
  }
  if (materialized()) return table_[index(window)];
  return evaluate(window);
}

double LocallyConstantPotential::evaluate(std::span<const int> w) const {
  const int r = (depth_ - 1) / 2;
  switch (spec_.variant) {
    case PotentialVariant::ExplicitTable: {
      auto it = spec_.table.find(word_to_string(w));
      if (it == spec_.table.end()) {
        throw Error(ErrorCode::InvalidArgument, "explicit table has no value for admissible word \"" + word_to_string(w) + "\"");
      }
      return it->second;
    }
    case PotentialVariant::Coordinate:
      return spec_.coordinate[static_cast<std::size_t>(w[static_cast<std::size_t>(r)])];
    case PotentialVariant::DistSunny: {
      // Second-smallest distance from the centre to a non-zero symbol.
      int first = r + 1, second = r + 1;
      for (int i = 0; i < depth_; ++i) {
        if (w[static_cast<std::size_t>(i)] == 0) continue;
        const int d = std::abs(i - r);
        if (d < first) {
          second = first;
          first = d;
        } else if (d < second) {
          second = d;
        }
      }
      return -std::ldexp(1.0, -second);
    }
    case PotentialVariant::DistOrbit: {
      const int period = static_cast<int>(spec_.orbit.size());
      int best = 0;
      for (int phase = 0; phase < period; ++phase) {
        // Agreement radius with T^phase p centred at the window centre.
        int n = 0;
        for (; n <= r; ++n) {
          auto at = [&](int offset) {
            const int idx = ((offset + phase) % period + period) % period;
            return spec_.orbit[static_cast<std::size_t>(idx)];
          };
          if (w[static_cast<std::size_t>(r + n)] != at(n) || w[static_cast<std::size_t>(r - n)] != at(-n)) break;
        }
        best = std::max(best, n);
      }
      return -spec_.scale * std::pow(spec_.alpha, best);
    }
    case PotentialVariant::DistSubshift: {
      const auto& flat = subshift_language_[0];
      const std::size_t m = flat.back();
      const std::size_t nblocks = (flat.size() - 1) / m;
      auto in_language = [&](std::span<const int> u) {
        if (u.size() >= m) {
          for (std::size_t s = 0; s + m <= u.size(); ++s) {
            bool found = false;
            for (std::size_t b = 0; b < nblocks && !found; ++b)
              found = std::equal(u.begin() + static_cast<std::ptrdiff_t>(s), u.begin() + static_cast<std::ptrdiff_t>(s + m),
                                 flat.begin() + static_cast<std::ptrdiff_t>(b * m));
            if (!found) return false;
          }
          return true;
        }
        for (std::size_t b = 0; b < nblocks; ++b)
          for (std::size_t s = 0; s + u.size() <= m; ++s)
            if (std::equal(u.begin(), u.end(), flat.begin() + static_cast<std::ptrdiff_t>(b * m + s))) return true;
        return false;
      };
      // Largest n <= r+1 whose central window of radius n-1 lies in L(S).
      int n = 0;
      while (n <= r && in_language(w.subspan(static_cast<std::size_t>(r - n), static_cast<std::size_t>(2 * n + 1)))) ++n;
      return -std::ldexp(1.0, -n);
    }
  }
  return 0.0;
}

LocallyConstantPotential LocallyConstantPotential::affine(double s, double c) const {
  if (!materialized()) throw Error(ErrorCode::TooLarge, "affine transform needs a materialized table");
  LocallyConstantPotential out = *this;
  std::map<std::string, double> table;
  for (const Word& w : enumerate_words(sft_, depth_, kMaterializeBudget)) {
    const double v = s * table_[index(w)] + c;
    out.table_[index(w)] = v;
    table[word_to_string(w)] = v;
  }
  out.spec_ = PotentialSpec::explicit_table(std::move(table));
  out.min_ = s >= 0 ? s * min_ + c : s * max_ + c;
  out.max_ = s >= 0 ? s * max_ + c : s * min_ + c;
  out.truncation_error_ = std::abs(s) * truncation_error_;
  out.holder_c_ = std::abs(s) * holder_c_;
  return out;
}

LocallyConstantPotential build_potential(const Sft& sft, const PotentialSpec& spec, int depth) {
  return LocallyConstantPotential(sft, spec, depth);
}

double birkhoff_sum(const LocallyConstantPotential& pot, std::span<const int> w) {
  const int k = pot.depth();
  if (static_cast<int>(w.size()) < k) {
    throw Error(ErrorCode::InvalidArgument, "birkhoff_sum: word shorter than the potential depth");
  }
  double s = 0.0;
  for (std::size_t i = 0; i + static_cast<std::size_t>(k) <= w.size(); ++i) s += pot.value(w.subspan(i, static_cast<std::size_t>(k)));
  return s;
}

namespace {

double cylinder_birkhoff(const LocallyConstantPotential& pot, std::span<const int> w, bool want_min) {
  const Sft& sft = pot.sft();
  const int k = pot.depth();
  const int n = static_cast<int>(w.size());
  if (n == 0) return 0.0;
  if (!sft.admissible(w)) throw Error(ErrorCode::InvalidArgument, "cylinder_birkhoff: word is not admissible");

  // Windows fully inside w.
  double inner = 0.0;
  for (int i = 0; i + k <= n; ++i) inner += pot.value(w.subspan(static_cast<std::size_t>(i), static_cast<std::size_t>(k)));
  const int tail_len = k - 1;
  if (tail_len == 0) return inner;

  // Windows starting at positions max(0, n-k+1) .. n-1 run past the end of w;
  // optimise over admissible continuations of length k-1.
  const int first_open = std::max(0, n - k + 1);
  Word buf(w.begin(), w.end());
  buf.resize(static_cast<std::size_t>(n + tail_len));
  double best = want_min ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  const int kk = sft.alphabet_size();
  // Continuations of length k-1 are enumerated by DFS.
  std::vector<int> stack(static_cast<std::size_t>(tail_len), -1);
  int depth = 0;
  while (depth >= 0) {
    int& s = stack[static_cast<std::size_t>(depth)];
    ++s;
    const int prev = buf[static_cast<std::size_t>(n + depth - 1)];
    while (s < kk && !sft.allowed(prev, s)) ++s;
    if (s >= kk) {
      s = -1;
      --depth;
      continue;
    }
    buf[static_cast<std::size_t>(n + depth)] = s;
    if (depth == tail_len - 1) {
      double open = 0.0;
      for (int i = first_open; i < n; ++i) {
        if (i + k <= n) continue;
        open += pot.value(std::span<const int>(buf).subspan(static_cast<std::size_t>(i), static_cast<std::size_t>(k)));
      }
      best = want_min ? std::min(best, open) : std::max(best, open);
    } else {
      ++depth;
    }
  }
  return inner + best;
}

}  // namespace

double cylinder_birkhoff_inf(const LocallyConstantPotential& pot, std::span<const int> w) {
  return cylinder_birkhoff(pot, w, true);
}

double cylinder_birkhoff_sup(const LocallyConstantPotential& pot, std::span<const int> w) {
  return cylinder_birkhoff(pot, w, false);
}

}  // namespace thermoform
