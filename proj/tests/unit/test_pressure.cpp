#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "thermoform/error.hpp"
#include "thermoform/pressure.hpp"

using namespace thermoform;

namespace {

LocallyConstantPotential minus_x0() {
  return build_potential(Sft::full_shift(2), PotentialSpec::coordinate_values({0.0, -1.0}), 1);
}

LocallyConstantPotential random_table(const Sft& sft, int depth, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::map<std::string, double> t;
  for (const Word& w : enumerate_words(sft, depth)) t[word_to_string(w)] = u(rng);
  return build_potential(sft, PotentialSpec::explicit_table(t), depth);
}

// Dense eigen-decomposition of the transfer matrix: independent of the
// power iteration.
double dense_pressure(const LocallyConstantPotential& pot, double t) {
  WordGraph g = build_word_graph(pot);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(g.size(), g.size());
  for (int u = 0; u < g.size(); ++u)
    for (int v : g.succ[static_cast<std::size_t>(u)]) m(u, v) = std::exp(t * g.value[static_cast<std::size_t>(u)]);
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  double best = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) best = std::max(best, std::abs(es.eigenvalues()[i]));
  return std::log(best);
}

}  // namespace

TEST_CASE("closed-form pressure of -x_0") {
  auto pot = minus_x0();
  PressureSolver solver(pot);
  for (double t : {-30.0, -1.0, 0.0, 0.5, 1.0, 7.0, 30.0, 200.0}) {
    CHECK(std::abs(solver.pressure(t).value - std::log1p(std::exp(-t))) < 1e-10 * std::max(1.0, std::abs(t)));
  }
  CHECK(solver.pressure(1.0).value == doctest::Approx(0.3132617).epsilon(1e-7));
}

TEST_CASE("depth-1 potentials on full shifts") {
  std::vector<double> c{0.3, -1.2, 0.7};
  auto pot = build_potential(Sft::full_shift(3), PotentialSpec::coordinate_values(c), 1);
  for (double t : {-5.0, 2.0, 11.0}) {
    const double expect = std::log(std::exp(c[0] * t) + std::exp(c[1] * t) + std::exp(c[2] * t));
    CHECK(pressure(pot, t).value == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("zero potential gives topological entropy") {
  auto zero = build_potential(Sft::golden_mean(), PotentialSpec::coordinate_values({0.0, 0.0}), 1);
  CHECK(pressure(zero, 0.0).value == doctest::Approx(topological_entropy(Sft::golden_mean())).epsilon(1e-13));
  std::mt19937_64 rng(2);
  auto pot = random_table(Sft::golden_mean(), 3, rng);
  CHECK(std::abs(pressure(pot, 0.0).value - topological_entropy(Sft::golden_mean())) < 1e-12);
}

TEST_CASE("power iteration agrees with a dense eigensolver") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Sft sft = trial % 2 ? Sft::golden_mean() : Sft::full_shift(3);
    auto pot = random_table(sft, 1 + trial % 3, rng);
    for (double t : {-3.0, 0.7, 5.0}) CHECK(pressure(pot, t).value == doctest::Approx(dense_pressure(pot, t)).epsilon(1e-11));
  }
}

TEST_CASE("equilibrium of -x_0 is Bernoulli") {
  auto pot = minus_x0();
  for (double t : {-2.0, 0.0, 1.0, 10.0}) {
    auto m = equilibrium_state(pot, t);
    const double p0 = 1.0 / (1.0 + std::exp(-t));
    CHECK(m.cylinder(Word{0}) == doctest::Approx(p0).epsilon(1e-12));
    CHECK(m.cylinder(word_from_string("01")) == doctest::Approx(p0 * (1 - p0)).epsilon(1e-12));
  }
}

TEST_CASE("t = 0 on the golden mean is the Parry measure") {
  auto pot = build_potential(Sft::golden_mean(), PotentialSpec::coordinate_values({0.0, 0.0}), 1);
  auto m = equilibrium_state(pot, 0.0);
  const double phi = (1 + std::sqrt(5.0)) / 2;
  // Parry: pi_i = l_i r_i / sum, P_ij = A_ij r_j / (phi r_i), with l = r = (phi, 1).
  CHECK(m.stationary[0] == doctest::Approx(phi * phi / (phi * phi + 1)).epsilon(1e-12));
  CHECK(m.out[0][0].prob == doctest::Approx(1 / phi).epsilon(1e-12));
  CHECK(m.out[0][1].prob == doctest::Approx(1 / (phi * phi)).epsilon(1e-12));
  CHECK(m.out[1][0].prob == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("Markov measure invariants") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    auto pot = random_table(trial % 2 ? Sft::golden_mean() : Sft::full_shift(2), 1 + trial % 3, rng, 2.0);
    auto m = equilibrium_state(pot, 3.0 * (trial - 5));
    double total = 0.0;
    for (double p : m.stationary) total += p;
    CHECK(std::abs(total - 1.0) < 1e-12);
    std::vector<double> next(m.states.size(), 0.0);
    for (std::size_t u = 0; u < m.states.size(); ++u) {
      double row = 0.0;
      for (const auto& tr : m.out[u]) {
        row += tr.prob;
        next[static_cast<std::size_t>(tr.to)] += m.stationary[u] * tr.prob;
      }
      CHECK(std::abs(row - 1.0) < 1e-12);
    }
    for (std::size_t u = 0; u < next.size(); ++u) CHECK(std::abs(next[u] - m.stationary[u]) < 1e-12);
  }
}

TEST_CASE("entropy and integral") {
  auto pot = minus_x0();
  const double half[] = {0.5, 0.5};
  auto b = bernoulli_measure(Sft::full_shift(2), half);
  auto ei = entropy_and_integral(b, pot);
  CHECK(ei.entropy == doctest::Approx(std::log(2.0)));
  CHECK(ei.integral == doctest::Approx(-0.5));

  auto fixed = periodic_measure(Sft::full_shift(2), Word{0});
  auto ef = entropy_and_integral(fixed, pot);
  CHECK(ef.entropy == 0.0);
  CHECK(ef.integral == 0.0);

  auto eq = equilibrium_state(pot, 1.0);
  auto ee = entropy_and_integral(eq, pot);
  CHECK(std::abs(ee.entropy + ee.integral - std::log1p(std::exp(-1.0))) < 1e-12);

  auto orbit = periodic_measure(Sft::full_shift(2), word_from_string("011"));
  CHECK(entropy_and_integral(orbit, pot).integral == doctest::Approx(-2.0 / 3.0));
  CHECK(orbit.cylinder(word_from_string("11")) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("variational identity and tangency") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> tdist(-20.0, 20.0);
  for (int trial = 0; trial < 12; ++trial) {
    auto pot = random_table(trial % 2 ? Sft::golden_mean() : Sft::full_shift(2), 1 + trial % 2, rng);
    PressureSolver solver(pot);
    const double t = tdist(rng);
    auto row = solver.point(t);
    CHECK(std::abs(row.entropy + t * row.integral - row.pressure) < 1e-9);
    for (double s : {-20.0, -5.0, 0.0, 3.0, 20.0}) {
      CHECK(solver.pressure(s).value >= row.entropy + s * row.integral - 1e-12);
    }
  }
}

TEST_CASE("convexity, shifts and monotonicity") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 6; ++trial) {
    auto pot = random_table(Sft::golden_mean(), 2, rng);
    PressureSolver solver(pot);
    auto ts = uniform_grid(-10, 10, 41);
    std::vector<double> p;
    for (double t : ts) p.push_back(solver.pressure(t).value);
    for (std::size_t i = 1; i + 1 < p.size(); ++i) CHECK(p[i - 1] + p[i + 1] - 2 * p[i] >= -1e-10);

    const double c = 0.37;
    auto shifted = pot.affine(1.0, c);
    CHECK(std::abs(pressure(shifted, 1.0).value - pressure(pot, 1.0).value - c) < 1e-12);
    auto lower = pot.affine(1.0, -0.1);
    CHECK(pressure(lower, 1.0).value <= pressure(pot, 1.0).value);
  }
}

TEST_CASE("block entropy") {
  const double half[] = {0.5, 0.5};
  auto b = bernoulli_measure(Sft::full_shift(2), half);
  for (int n = 1; n <= 20; ++n) CHECK(block_entropy(b, n) == doctest::Approx(n * std::log(2.0)));
  CHECK_THROWS_AS(block_entropy(b, 21), Error);

  // Chain rule against brute-force summation over words.
  std::mt19937_64 rng(6);
  auto pot = random_table(Sft::golden_mean(), 3, rng);
  auto m = equilibrium_state(pot, 1.5);
  for (int n = 1; n <= 10; ++n) {
    double h = 0.0;
    for (const Word& w : enumerate_words(Sft::golden_mean(), n)) {
      const double p = m.cylinder(w);
      if (p > 0) h -= p * std::log(p);
    }
    CHECK(block_entropy(m, n) == doctest::Approx(h).epsilon(1e-11));
  }
}

TEST_CASE("refinement preserves cylinders") {
  std::mt19937_64 rng(15);
  auto pot = random_table(Sft::golden_mean(), 2, rng);
  auto m = equilibrium_state(pot, 0.8);
  auto r = refine(m, 5);
  CHECK(r.order == 5);
  for (const Word& w : enumerate_words(Sft::golden_mean(), 7)) CHECK(r.cylinder(w) == doctest::Approx(m.cylinder(w)).epsilon(1e-12));
  CHECK_THROWS_AS(refine(r, 2), Error);
}

TEST_CASE("Gibbs report") {
  std::vector<double> ts{0.0, 1.0, 3.0};
  auto full = build_potential(Sft::full_shift(3), PotentialSpec::coordinate_values({0.2, -0.5, 1.0}), 1);
  auto rep = gibbs_report(full, ts, 6);
  for (const auto& p : rep.points) {
    CHECK(std::abs(p.log_c) < 1e-10);
    CHECK(p.c_lo <= 1 + 1e-12);
    CHECK(p.c_hi >= 1 - 1e-12);
  }

  // Parry measure: mu[w] = l_{w_0} r_{w_{n-1}} / (phi^{n-1} (l.r)) with
  // l = r = (phi, 1), so the ratio takes finitely many values.
  auto zero = build_potential(Sft::golden_mean(), PotentialSpec::coordinate_values({0.0, 0.0}), 1);
  std::vector<double> t0{0.0};
  auto parry = gibbs_report(zero, t0, 10);
  const double phi = (1 + std::sqrt(5.0)) / 2;
  const double norm = phi * phi + 1;
  // ratio = l r phi / norm; extremes at (phi, phi) and (1, 1).
  CHECK(parry.points[0].c_hi == doctest::Approx(phi * phi * phi / norm).epsilon(1e-12));
  CHECK(parry.points[0].c_lo == doctest::Approx(phi / norm).epsilon(1e-12));

  // Lemma 3.4 at desk scale.
  std::mt19937_64 rng(30);
  auto pot = random_table(Sft::golden_mean(), 2, rng);
  std::vector<double> grid{0.0, 2.0, 5.0};
  auto rep2 = gibbs_report(pot, grid, 12);
  for (const auto& p : rep2.points)
    for (double d : p.block_entropy_defect) CHECK(d <= p.log_c + 1e-9);
  CHECK(std::isfinite(rep2.fit_b));
}

TEST_CASE("pressure curve is independent of thread count") {
  auto pot = minus_x0();
  auto ts = uniform_grid(-5, 5, 17);
  auto a = pressure_curve(pot, ts, 1);
  auto b = pressure_curve(pot, ts, 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].t == b[i].t);
    CHECK(a[i].pressure == b[i].pressure);
    CHECK(a[i].entropy == b[i].entropy);
  }
}

TEST_CASE("budget errors") {
  auto deep = build_potential(Sft::full_shift(3), PotentialSpec::dist_subshift({word_from_string("00"), word_from_string("01"), word_from_string("10")}), 11);
  CHECK_THROWS_AS(pressure(deep, 1.0), Error);
}
