#include <cmath>

#include "doctest.h"
#include "oracles/brute.hpp"
#include "oracles/gaussian.hpp"
#include "symprox/assignment.hpp"
#include "symprox/errors.hpp"
#include "symprox/measures.hpp"
#include "symprox/rng.hpp"

using namespace symprox;

namespace {

EmpiricalMeasure1D random_measure(Rng& rng, std::size_t k) {
  std::vector<double> a(k), w(k);
  for (std::size_t i = 0; i < k; ++i) {
    a[i] = 3.0 * rng.normal();
    w[i] = 0.1 + rng.uniform();
  }
  return EmpiricalMeasure1D(a, w);
}

}  // namespace

TEST_CASE("empirical measure construction merges and normalizes") {
  EmpiricalMeasure1D m({2.0, 1.0, 1.0 + 1e-13, 3.0}, {1.0, 1.0, 1.0, 1.0});
  REQUIRE(m.size() == 3);
  CHECK(m.atoms()[0] == 1.0);
  CHECK(m.weights()[0] == doctest::Approx(0.5));
  double s = 0.0;
  for (double w : m.weights()) s += w;
  CHECK(std::abs(s - 1.0) <= 1e-12);
  CHECK_THROWS_AS(EmpiricalMeasure1D({1.0}, {-1.0}), Error);
  CHECK_THROWS_AS(EmpiricalMeasure1D({1.0, 2.0}, {1.0}), Error);
  CHECK_THROWS_AS(EmpiricalMeasure1D({NAN}, {1.0}), Error);
}

TEST_CASE("quantiles") {
  CHECK(EmpiricalMeasure1D({5.0}, {1.0}).quantile(0.5) == 5.0);
  CHECK(EmpiricalMeasure1D::uniform({1, 2, 3, 4}).quantile(0.6) == 3.0);
  CHECK(EmpiricalMeasure1D::uniform({1, 2, 3, 4}).quantile(0.5) == 2.0);
  GridMeasure g({-1.0, 0.0, 0.5, 2.0, 7.0});
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.quantile((i + 0.5) / 5.0) == g.grid()[i]);
  CHECK_THROWS_AS(g.quantile(0.0), Error);
  CHECK_THROWS_AS(g.quantile(1.0), Error);
  try {
    g.quantile(1.5);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::OutOfRange);
  }
}

TEST_CASE("materialize uses midpoint quantiles") {
  EmpiricalMeasure1D mu({-1.0, 0.0, 1.0}, {0.05, 0.9, 0.05});
  auto th = mu.materialize(1000);
  int neg = 0, zero = 0, pos = 0;
  for (double v : th) (v < 0 ? neg : v > 0 ? pos : zero)++;
  CHECK(neg == 50);
  CHECK(zero == 900);
  CHECK(pos == 50);
}

TEST_CASE("w2_1d examples") {
  EmpiricalMeasure1D d0({0.0}, {1.0}), d1({1.0}, {1.0});
  CHECK(w2_1d(d0, d1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w2_1d(d1, d1) == 0.0);
  auto a = EmpiricalMeasure1D::uniform({0.0, 2.0}), b = EmpiricalMeasure1D::uniform({1.0, 3.0});
  double brute = oracle::w2_2d_bruteforce({{0, 0}, {2, 0}}, {{1, 0}, {3, 0}});
  CHECK(w2_1d(a, b) == doctest::Approx(brute).epsilon(1e-14));
  CHECK(brute == doctest::Approx(1.0));
}

TEST_CASE("w2_1d is a metric on random measures") {
  Rng rng(7);
  for (int t = 0; t < 100; ++t) {
    auto a = random_measure(rng, 1 + t % 7), b = random_measure(rng, 2 + t % 5), c = random_measure(rng, 3 + t % 4);
    CHECK(w2_1d(a, c) <= w2_1d(a, b) + w2_1d(b, c) + 1e-9);
    CHECK(std::abs(w2_1d(a, b) - w2_1d(b, a)) <= 1e-12);
    CHECK(w2_1d(a, a) == 0.0);
  }
}

TEST_CASE("w2_1d agrees with 2-D assignment on the line") {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    std::size_t n = 2 + t % 30;
    std::vector<double> u(n), v(n);
    std::vector<Point2> pu(n), pv(n);
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = rng.normal();
      v[i] = 2.0 * rng.normal() + 1.0;
      pu[i] = {u[i], 0.0};
      pv[i] = {v[i], 0.0};
    }
    double one = w2_1d(EmpiricalMeasure1D::uniform(u), EmpiricalMeasure1D::uniform(v));
    double two = w2_2d(JointSample2D(pu), JointSample2D(pv));
    CHECK(std::abs(one * one - two * two) <= 1e-9);
  }
}

TEST_CASE("w2_2d examples and errors") {
  JointSample2D a({{0, 0}}), b({{3, 4}});
  CHECK(w2_2d(a, b) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(w2_2d(a, a) == 0.0);
  JointSample2D c({{0, 0}, {1, 1}});
  CHECK_THROWS_AS(w2_2d(a, c), Error);
  try {
    w2_2d(c, c, 1);
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TooLarge);
  }
}

TEST_CASE("w2_2d matches permutation brute force") {
  Rng rng(3);
  for (int t = 0; t < 30; ++t) {
    std::size_t n = 1 + t % 8;
    std::vector<Point2> pa(n), pb(n);
    std::vector<std::pair<double, double>> ra(n), rb(n);
    for (std::size_t i = 0; i < n; ++i) {
      pa[i] = {rng.normal(), rng.normal()};
      pb[i] = {rng.normal(), rng.normal()};
      ra[i] = {pa[i].u, pa[i].v};
      rb[i] = {pb[i].u, pb[i].v};
    }
    CHECK(std::abs(w2_2d(JointSample2D(pa), JointSample2D(pb)) - oracle::w2_2d_bruteforce(ra, rb)) <= 1e-12);
  }
}

TEST_CASE("w2_2d is invariant under a common relabeling") {
  Rng rng(5);
  std::size_t n = 40;
  std::vector<Point2> pa(n), pb(n);
  for (std::size_t i = 0; i < n; ++i) {
    pa[i] = {rng.normal(), rng.normal()};
    pb[i] = {rng.normal(), rng.normal()};
  }
  auto perm = rng.permutation(n);
  std::vector<Point2> qa(n), qb(n);
  for (std::size_t i = 0; i < n; ++i) {
    qa[i] = pa[perm[i]];
    qb[i] = pb[perm[i]];
  }
  CHECK(std::abs(w2_2d(JointSample2D(pa), JointSample2D(pb)) - w2_2d(JointSample2D(qa), JointSample2D(qb))) <= 1e-12);
}

TEST_CASE("assignment maximization") {
  std::vector<double> v = {1, 2, 3, 2, 4, 6, 3, 6, 9};
  auto r = solve_assignment_max(v, 3);
  CHECK(r.cost == doctest::Approx(1 + 4 + 9));
}

TEST_CASE("gaussian_convolve") {
  EmpiricalMeasure1D d0({0.0}, {1.0});
  auto g = gaussian_convolve(d0, 1.0, 3);
  CHECK(g.grid()[0] == doctest::Approx(-0.967421566101701).epsilon(1e-9));
  CHECK(std::abs(g.grid()[1]) <= 1e-9);
  CHECK(g.grid()[2] == doctest::Approx(0.967421566101701).epsilon(1e-9));
  for (int i = 0; i < 3; ++i) CHECK(oracle::Phi(g.grid()[i]) == doctest::Approx((i + 0.5) / 3.0).epsilon(1e-9));

  EmpiricalMeasure1D mu({-1.0, 0.0, 1.0}, {0.05, 0.9, 0.05});
  auto id = gaussian_convolve(mu, 0.0, 20);
  for (std::size_t i = 0; i < 20; ++i) CHECK(id.grid()[i] == mu.quantile((i + 0.5) / 20.0));

  auto big = gaussian_convolve(mu, 1.0, 4096);
  CHECK(std::abs(big.second_moment() - 1.1) <= 1e-3);
  CHECK_THROWS_AS(gaussian_convolve(mu, 1.0, 1), Error);
}

TEST_CASE("gaussian_convolve moments on random measures") {
  Rng rng(19);
  for (int t = 0; t < 10; ++t) {
    auto mu = random_measure(rng, 1 + t);
    double tau = 0.2 + 2.0 * rng.uniform();
    std::size_t m = 1024 << (t % 2);
    auto g = gaussian_convolve(mu, tau, m);
    double tol = 2.0 / static_cast<double>(m) + 1e-6;
    double var = g.second_moment() - g.mean() * g.mean();
    double target = mu.variance() + tau * tau;
    CHECK(std::abs(g.mean() - mu.mean()) <= tol * (1.0 + std::abs(mu.mean()) + std::sqrt(target)));
    CHECK(std::abs(var - target) <= tol * target);
    // Each node solves the CDF equation.
    for (std::size_t i = 0; i < m; i += 97) {
      double F = 0.0;
      for (std::size_t k = 0; k < mu.size(); ++k) F += mu.weights()[k] * oracle::Phi((g.grid()[i] - mu.atoms()[k]) / tau);
      CHECK(std::abs(F - (i + 0.5) / m) <= 1e-9);
    }
  }
}

TEST_CASE("grid round trip") {
  GridMeasure g({-1.0, -1.0, 0.0, 0.0, 0.0, 2.0});
  auto e = g.to_empirical();
  CHECK(e.size() == 3);
  std::vector<double> back;
  for (std::size_t i = 0; i < 6; ++i) back.push_back(e.quantile((i + 0.5) / 6.0));
  CHECK(w2_1d(GridMeasure(back).to_empirical(), e) <= 1e-12);
}
