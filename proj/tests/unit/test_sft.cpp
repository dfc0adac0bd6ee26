#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "thermoform/error.hpp"
#include "thermoform/sft.hpp"

using namespace thermoform;

namespace {

// Entry sum of A^(n-1) by repeated integer matrix products.
long long matrix_power_sum(const std::vector<std::vector<int>>& a, int n) {
  const std::size_t k = a.size();
  std::vector<std::vector<long long>> p(k, std::vector<long long>(k, 0));
  for (std::size_t i = 0; i < k; ++i) p[i][i] = 1;
  for (int step = 1; step < n; ++step) {
    std::vector<std::vector<long long>> q(k, std::vector<long long>(k, 0));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t l = 0; l < k; ++l)
        for (std::size_t j = 0; j < k; ++j) q[i][j] += p[i][l] * a[l][j];
    p = q;
  }
  long long s = 0;
  for (auto& row : p)
    for (auto v : row) s += v;
  return s;
}

Sft random_sft(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(2, 4);
  std::bernoulli_distribution coin(0.7);
  for (;;) {
    const int k = size(rng);
    std::vector<std::vector<int>> m(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(k)));
    for (auto& row : m)
      for (auto& v : row) v = coin(rng) ? 1 : 0;
    try {
      return Sft::from_matrix(m);
    } catch (const Error&) {
    }
  }
}

}  // namespace

TEST_CASE("parse_sft reads the spec formats") {
  Sft full = parse_sft(R"({"alphabet": 2, "matrix": [[1,1],[1,1]]})");
  CHECK(full.is_full_shift());
  CHECK(full.matrix() == std::vector<std::vector<int>>{{1, 1}, {1, 1}});

  Sft gm = parse_sft(R"({"alphabet": 2, "forbidden": [[1,1]]})");
  CHECK(gm.matrix() == std::vector<std::vector<int>>{{1, 1}, {1, 0}});

  Sft gm2 = parse_sft(R"({"alphabet": 2, "allowed": [[0,0],[0,1],[1,0]]})");
  CHECK(gm2.matrix() == gm.matrix());
}

TEST_CASE("parse_sft errors") {
  try {
    parse_sft(R"({"alphabet": 2, "matrix": [[1,0],[0,1]]})");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotMixing);
    CHECK(std::string(e.what()).find("not mixing") != std::string::npos);
  }
  try {
    parse_sft(R"({"alphabet": 2, "matrix": [[1,1],[1,1]})");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_sft(R"({"alphabet": 2})"), Error);
  CHECK_THROWS_AS(parse_sft(R"({"alphabet": 2, "matrix": [[1,1],[1,1]], "allowed": []})"), Error);
  CHECK_THROWS_AS(parse_sft(R"({"alphabet": 2, "matrix": [[1,1]]})"), Error);
}

TEST_CASE("mixing length") {
  CHECK(Sft::full_shift(2).mixing_length() == 1);
  CHECK(Sft::full_shift(5).mixing_length() == 1);
  CHECK(Sft::golden_mean().mixing_length() == 2);
}

TEST_CASE("enumerate_words") {
  auto full = enumerate_words(Sft::full_shift(2), 3);
  REQUIRE(full.size() == 8);
  CHECK(word_to_string(full.front()) == "000");
  CHECK(word_to_string(full.back()) == "111");

  std::vector<std::string> gm;
  for (const auto& w : enumerate_words(Sft::golden_mean(), 3)) gm.push_back(word_to_string(w));
  CHECK(gm == std::vector<std::string>{"000", "001", "010", "100", "101"});

  CHECK(enumerate_words(Sft::full_shift(3), 1).size() == 3);
  CHECK_THROWS_AS(enumerate_words(Sft::full_shift(2), 30, 1000), Error);
}

TEST_CASE("word counts agree with matrix powers and words are admissible") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Sft s = random_sft(rng);
    for (int n = 1; n <= 12; ++n) {
      auto words = enumerate_words(s, n);
      CHECK(static_cast<long long>(words.size()) == matrix_power_sum(s.matrix(), n));
      CHECK(word_count(s, n) == static_cast<double>(words.size()));
      CHECK(std::all_of(words.begin(), words.end(), [&](const Word& w) { return s.admissible(w); }));
    }
  }
}

TEST_CASE("topological entropy") {
  CHECK(topological_entropy(Sft::full_shift(2)) == doctest::Approx(std::log(2.0)).epsilon(1e-13));
  CHECK(topological_entropy(Sft::full_shift(4)) == doctest::Approx(std::log(4.0)).epsilon(1e-13));
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  CHECK(topological_entropy(Sft::golden_mean()) == doctest::Approx(std::log(phi)).epsilon(1e-13));

  // Slope of log word counts, as a ratio of consecutive counts at n = 20.
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    Sft s = random_sft(rng);
    const double slope = std::log(word_count(s, 41) / word_count(s, 40));
    CHECK(std::abs(slope - topological_entropy(s)) < 1e-6);
  }
}

TEST_CASE("no long overlaps") {
  CHECK(has_no_long_overlaps(word_from_string("0111")));
  CHECK(has_no_long_overlaps(word_from_string("011")));
  CHECK_FALSE(has_no_long_overlaps(word_from_string("0101")));
  CHECK_FALSE(has_no_long_overlaps(word_from_string("000")));

  Sft full = Sft::full_shift(2);
  for (int n : {3, 4, 6, 9}) {
    Word w = find_no_overlap_word(full, n);
    CHECK(static_cast<int>(w.size()) >= n);
    CHECK(has_no_long_overlaps(w));
  }
  Sft gm = Sft::golden_mean();
  Word w = find_no_overlap_word(gm, 6);
  CHECK(gm.admissible(w));
  CHECK(has_no_long_overlaps(w));
  CHECK_THROWS_AS(find_no_overlap_word(gm, 5), Error);
}

TEST_CASE("connecting words exist from the mixing length on") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Sft s = random_sft(rng);
    const int L = s.mixing_length();
    for (int a = 0; a < s.alphabet_size(); ++a)
      for (int b = 0; b < s.alphabet_size(); ++b)
        for (int n = L; n <= L + 4; ++n) {
          auto c = connecting_word(s, a, b, n);
          REQUIRE(c.has_value());
          Word full{a};
          full.insert(full.end(), c->begin(), c->end());
          full.push_back(b);
          CHECK(s.admissible(full));
        }
  }
}

TEST_CASE("periodic orbits") {
  auto names = [](const std::vector<PeriodicOrbit>& orbits) {
    std::set<std::string> out;
    for (const auto& o : orbits) out.insert(word_to_string(o.word));
    return out;
  };
  CHECK(names(periodic_orbits(Sft::full_shift(2), 2)) == std::set<std::string>{"0", "1", "01"});
  CHECK(names(periodic_orbits(Sft::golden_mean(), 1)) == std::set<std::string>{"0"});
  std::set<std::string> p3;
  for (const auto& o : periodic_orbits(Sft::full_shift(2), 3))
    if (o.period() == 3) p3.insert(word_to_string(o.word));
  CHECK(p3 == std::set<std::string>{"001", "011"});

  // Necklace count: primitive binary necklaces of length 6 number 9.
  int six = 0;
  for (const auto& o : periodic_orbits(Sft::full_shift(2), 6)) six += o.period() == 6;
  CHECK(six == 9);
}
