#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "thermoform/error.hpp"
#include "thermoform/splice.hpp"

using namespace thermoform;

namespace {

std::vector<std::size_t> ones_of(const BinarySequence& y) {
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i]) pos.push_back(i);
  return pos;
}

std::size_t count_occurrences(std::span<const int> z, std::span<const int> w) {
  std::size_t c = 0;
  for (std::size_t i = 0; i + w.size() <= z.size(); ++i)
    if (std::equal(w.begin(), w.end(), z.begin() + static_cast<std::ptrdiff_t>(i))) ++c;
  return c;
}

}  // namespace

TEST_CASE("closed forms of nu") {
  auto p = nu_closed_form(std::log(2.0), 1);
  CHECK(p.delta == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p.nu_entropy == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  for (int M : {1, 5, 40}) {
    const double eta = 1e-4;
    p = nu_closed_form(eta, M);
    CHECK(std::abs(p.delta - eta / (1 + M * eta)) < 1e-3 * eta);
    CHECK(p.delta <= 1.0 / M);
  }
  p = nu_closed_form(0.01, 10);
  CHECK(std::abs(p.nu_entropy - (-0.01 * std::log(0.01))) <= 0.1);
  CHECK_THROWS_AS(nu_closed_form(0.0, 3), Error);
}

TEST_CASE("sample_nu spacing and frequencies") {
  std::uint64_t seed = 5;
  for (double eta : {0.01, 0.1, 0.5}) {
    for (int M : {5, 20, 100}) {
      const auto p = nu_closed_form(eta, M);
      const std::size_t n = 10'000'000;
      const auto y = sample_nu(p, n, seed++);
      const auto pos = ones_of(y);
      bool spaced = true;
      for (std::size_t i = 1; i < pos.size(); ++i) spaced = spaced && pos[i] - pos[i - 1] >= static_cast<std::size_t>(M);
      CHECK(spaced);
      const double freq = static_cast<double>(pos.size()) / static_cast<double>(n);
      CHECK(std::abs(freq - p.delta) <= 4 * nu_frequency_sigma(p, static_cast<double>(n)));
      CHECK(std::abs(nu_plugin_entropy(y) - p.nu_entropy) <= 0.01);
    }
  }
  const auto p = nu_closed_form(50.0, 3);
  const auto pos = ones_of(sample_nu(p, 30000, 1));
  bool exact = true;
  for (std::size_t i = 1; i < pos.size(); ++i) exact = exact && pos[i] - pos[i - 1] == 3;
  CHECK(exact);
  CHECK(p.delta == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("sample_nu starts stationary") {
  // The first 1 lands at 0 with probability delta.
  const auto p = nu_closed_form(0.3, 4);
  int hits = 0;
  const int runs = 40000;
  for (int s = 0; s < runs; ++s) hits += sample_nu(p, 8, static_cast<std::uint64_t>(s))[0];
  const double sigma = std::sqrt(p.delta * (1 - p.delta) / runs);
  CHECK(std::abs(hits / double(runs) - p.delta) <= 4 * sigma);
}

TEST_CASE("connector words") {
  const Word w = word_from_string("0111");
  auto c = connector_words(Sft::full_shift(2), w);
  CHECK(c.L == 1);
  for (int a = 0; a < 2; ++a) {
    CHECK(c.prefix[static_cast<std::size_t>(a)] == Word{0});
    CHECK(c.suffix[static_cast<std::size_t>(a)] == Word{0});
  }
  const Sft gm = Sft::golden_mean();
  c = connector_words(gm, word_from_string("101"));
  CHECK(c.L == 2);
  CHECK(c.prefix[1] == word_from_string("00"));
  CHECK(c.suffix[1] == word_from_string("00"));
  // Adjacency oracle: connectors join and are least among all L-words.
  const Word v = word_from_string("1001010");
  c = connector_words(gm, v);
  for (int a = 0; a < 2; ++a) {
    std::vector<Word> pre, suf;
    for (const Word& u : enumerate_words(gm, c.L)) {
      Word s{a};
      s.insert(s.end(), u.begin(), u.end());
      s.push_back(v.front());
      if (gm.admissible(s)) pre.push_back(u);
      Word t{v.back()};
      t.insert(t.end(), u.begin(), u.end());
      t.push_back(a);
      if (gm.admissible(t)) suf.push_back(u);
    }
    CHECK(c.prefix[static_cast<std::size_t>(a)] == pre.front());
    CHECK(c.suffix[static_cast<std::size_t>(a)] == suf.front());
  }
}

TEST_CASE("splice map") {
  const Word w = word_from_string("101");
  const auto c = connector_words(Sft::full_shift(2), w);
  Word x(12, 0);
  BinarySequence y(12, 0);
  y[3] = 1;
  CHECK(word_to_string(splice_map(c, w, x, y)) == "000010100000");
  CHECK(splice_map(c, w, x, BinarySequence(12, 0)) == x);
  y[6] = 1;
  CHECK_THROWS_AS(splice_map(c, w, x, y), Error);
  // Edits crossing either end are skipped.
  BinarySequence edge(12, 0);
  edge[0] = 1;
  edge[8] = 1;
  CHECK(splice_map(c, w, x, edge) == x);
}

TEST_CASE("spliced sequences stay admissible on the golden mean") {
  const Sft gm = Sft::golden_mean();
  const Word w = find_no_overlap_word(gm, 6);
  REQUIRE(has_no_long_overlaps(w));
  const auto c = connector_words(gm, w);
  const auto mu = equilibrium_state(build_potential(gm, PotentialSpec::coordinate_values({0.0, 0.4}), 1), 1.0);
  const std::size_t n = 1'000'000;
  const Word x = sample_markov(mu, n, 11);
  CHECK(gm.admissible(x));
  const int M = static_cast<int>(w.size()) + 2 * c.L + 1;
  const auto y = sample_nu(nu_closed_form(0.2, M), n, 12);
  const Word z = splice_map(c, w, x, y);
  CHECK(gm.admissible(z));
  // w sits at offset L after every interior edit, and the overlap count bound holds.
  std::size_t interior = 0;
  bool placed = true;
  for (std::size_t k : ones_of(y)) {
    if (k == 0 || k + w.size() + 2 * static_cast<std::size_t>(c.L) >= n) continue;
    ++interior;
    placed = placed && std::equal(w.begin(), w.end(), z.begin() + static_cast<std::ptrdiff_t>(k + static_cast<std::size_t>(c.L)));
  }
  CHECK(placed);
  CHECK(count_occurrences(z, w) <= 3 * interior + count_occurrences(x, w));
}

TEST_CASE("Markov sampling reproduces cylinder measures") {
  const Sft gm = Sft::golden_mean();
  const auto pot = build_potential(gm, PotentialSpec::explicit_table({{"00", 0.3}, {"01", -0.2}, {"10", 0.5}}), 2);
  const auto mu = equilibrium_state(pot, 1.5);
  const std::size_t n = 2'000'000;
  const Word x = sample_markov(mu, n, 3);
  for (const char* s : {"0", "1", "00", "010", "0010"}) {
    const Word w = word_from_string(s);
    const double p = mu.cylinder(w);
    const double f = static_cast<double>(count_occurrences(x, w)) / static_cast<double>(n - w.size() + 1);
    // Samples are correlated, so allow 10 binomial sigmas.
    CHECK(std::abs(f - p) <= 10 * std::sqrt(p * (1 - p) / static_cast<double>(n)));
  }
  CHECK(sample_markov(mu, 1000, 9) == sample_markov(mu, 1000, 9));
}

TEST_CASE("empirical block entropy") {
  std::mt19937_64 rng(1);
  std::bernoulli_distribution coin(0.5);
  Word seq(1'000'000);
  for (int& s : seq) s = coin(rng);
  CHECK(std::abs(empirical_block_entropy(seq, 8, 2) - std::log(2.0)) < 0.01);
  CHECK(empirical_block_entropy(Word(5000, 1), 3, 2) == 0.0);
  Word alt(100000);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = static_cast<int>(i % 2);
  for (int n : {1, 4, 9}) CHECK(empirical_block_entropy(alt, n, 2) == doctest::Approx(std::log(2.0) / n).epsilon(1e-9));
  CHECK_THROWS_AS(empirical_block_entropy(alt, 12, 2), Error);
}

TEST_CASE("splice experiment") {
  const Sft full = Sft::full_shift(2);
  const auto pot = build_potential(full, PotentialSpec::coordinate_values({0.0, -1.0}), 1);
  SpliceConfig cfg{bernoulli_measure(full, std::vector<double>{0.5, 0.5}), word_from_string("0111")};
  cfg.eta = 0.05;
  cfg.length = 2'000'000;
  cfg.max_block = 12;
  auto r = splice_experiment(cfg, pot);
  CHECK(r.integral_pass);
  CHECK(r.entropy_pass);
  CHECK(r.nu.M == 7);
  CHECK(r.edits > 0);
  CHECK(r.integral_rhs_table >= r.integral_rhs_holder);
  CHECK(format_splice_report(r).find("integral_check: pass") != std::string::npos);

  // No edits: the sample integral is that of mu.
  cfg.edits = false;
  r = splice_experiment(cfg, pot);
  CHECK(r.edits == 0);
  CHECK(std::abs(r.birkhoff_average - r.mu_integral) <= 4 * r.birkhoff_sigma);

  // delta <= e^-1 mu([w]).
  cfg.edits = true;
  cfg.w = word_from_string("0001");
  cfg.mu = bernoulli_measure(full, std::vector<double>{0.99, 0.01});
  cfg.eta = 1e-4;
  try {
    splice_experiment(cfg, pot);
    FAIL("expected a hypothesis error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HypothesisViolated);
    CHECK(std::string(e.what()).find("delta > e^-1 mu([w])") != std::string::npos);
  }
}

TEST_CASE("tuned eta") {
  CHECK(tuned_eta(0.5, 1.0, -4.0) == doctest::Approx(std::exp(-4.0)));
}
