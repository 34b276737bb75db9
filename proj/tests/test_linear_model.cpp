#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles/gaussian.hpp"
#include "oracles/lasso_cd.hpp"
#include "symprox/errors.hpp"
#include "symprox/linear_model.hpp"
#include "symprox/rng.hpp"

using namespace symprox;

namespace {

const EmpiricalMeasure1D kSparse({-1.0, 0.0, 1.0}, {0.05, 0.9, 0.05});
const std::vector<double> kAtoms{-1.0, 0.0, 1.0};
const std::vector<double> kWeights{0.05, 0.9, 0.05};

PenaltySpec lasso(double xi) { return PenaltySpec{Separable{AbsWeight{xi}}, 1.0}; }
PenaltySpec zero_penalty() { return PenaltySpec{Separable{Quadratic{1.0}}, 0.0}; }

Eigen::MatrixXd gaussian_design(std::size_t n, std::size_t p, std::uint64_t seed) {
  Rng rng(seed, 0);
  Eigen::MatrixXd X(n, p);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < n; ++i) X(i, j) = rng.normal() / std::sqrt(static_cast<double>(n));
  return X;
}

Eigen::VectorXd gaussian_vector(std::size_t n, std::uint64_t seed) {
  Rng rng(seed, 1);
  Eigen::VectorXd v(n);
  for (std::size_t i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

double fit_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const PenaltySpec& f, double lambda,
                     const Eigen::VectorXd& b) {
  std::vector<double> bv(b.data(), b.data() + b.size());
  return 0.5 * (y - X * b).squaredNorm() / static_cast<double>(X.rows()) + lambda * evaluate(f, bv);
}

}  // namespace

TEST_CASE("map moments of identity and zero maps") {
  for (auto method : {SeQuadrature::Exact, SeQuadrature::GaussHermite}) {
    SeOptions opt;
    opt.method = method;
    for (double tau : {0.3, 1.0, 4.0}) {
      auto id = map_moments(PR1Map::identity(), kSparse, tau, opt);
      CHECK(id.mse == doctest::Approx(tau * tau).epsilon(1e-12));
      CHECK(id.cross == doctest::Approx(tau).epsilon(1e-12));
      auto zero = map_moments(PR1Map::constant(0.0), kSparse, tau, opt);
      CHECK(zero.mse == doctest::Approx(kSparse.second_moment()).epsilon(1e-12));
      CHECK(std::abs(zero.cross) < 1e-14);
    }
  }
  SeOptions bad;
  bad.method = SeQuadrature::GaussHermite;
  bad.gh_nodes = 11;
  CHECK_THROWS_AS(map_moments(PR1Map::identity(), kSparse, 1.0, bad), Error);
}

TEST_CASE("zero penalty expectations") {
  auto s = se_expectations(zero_penalty(), kSparse, 0.7, 2.0, 256);
  CHECK(s.mse == doctest::Approx(0.49).epsilon(1e-10));
  CHECK(s.cross == doctest::Approx(0.7).epsilon(1e-10));
}

TEST_CASE("lasso expectations match closed form") {
  for (double tau : {0.2, 0.6, 1.5})
    for (double lam : {0.5, 1.0, 3.0}) {
      const double xi = 0.3;
      auto o = oracle::soft_threshold_moments(kAtoms, kWeights, tau, lam * xi);
      auto s = se_expectations(lasso(xi), kSparse, tau, lam, 4096);
      CAPTURE(tau);
      CAPTURE(lam);
      CHECK(std::abs(s.mse - o.mse) <= 1e-6);
      CHECK(std::abs(s.cross - o.cross) <= 1e-6);
      SeOptions gh;
      gh.method = SeQuadrature::GaussHermite;
      auto g = se_expectations(lasso(xi), kSparse, tau, lam, 4096, gh);
      CHECK(std::abs(g.mse - o.mse) <= 1e-2 * tau * tau);
      CHECK(std::abs(g.cross - o.cross) <= 1e-2 * tau);
    }
}

TEST_CASE("quadrature rules agree on a linear map") {
  PR1Map ridge{{-1.0, 1.0}, {-0.4, 0.4}, 0.4, 0.4};
  SeOptions gh;
  gh.method = SeQuadrature::GaussHermite;
  for (double tau : {0.2, 1.0, 3.0}) {
    auto e = map_moments(ridge, kSparse, tau);
    auto g = map_moments(ridge, kSparse, tau, gh);
    CHECK(e.mse == doctest::Approx(g.mse).epsilon(1e-12));
    CHECK(e.cross == doctest::Approx(0.4 * tau).epsilon(1e-12));
    CHECK(g.cross == doctest::Approx(0.4 * tau).epsilon(1e-12));
  }
}

TEST_CASE("zero penalty fixed point") {
  const double delta = 2.0, sigma = 0.5;
  auto fp = solve_fixed_point(kSparse, delta, sigma, zero_penalty(), 512);
  CHECK(fp.tau_star * fp.tau_star == doctest::Approx(sigma * sigma * delta / (delta - 1.0)).epsilon(1e-6));
  CHECK(fp.lambda_star == doctest::Approx(delta * delta / (delta - 1.0)).epsilon(1e-6));
  try {
    solve_fixed_point(kSparse, 0.5, sigma, zero_penalty(), 512);
    FAIL("expected NoSolution");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NoSolution);
  }
}

TEST_CASE("lasso fixed point matches independent solver") {
  const double delta = 0.64, sigma = 0.25, xi = 0.3;
  auto fp = solve_fixed_point(kSparse, delta, sigma, lasso(xi), 4096);
  auto o = oracle::lasso_fixed_point(kAtoms, kWeights, sigma, delta, xi);
  CHECK(fp.tau_star == doctest::Approx(o.tau).epsilon(1e-4));
  CHECK(fp.lambda_star == doctest::Approx(o.lambda).epsilon(1e-4));
  CHECK(fp.residual_tau <= 1e-6);
  CHECK(fp.residual_lambda <= 1e-6);
  CHECK(fp.tau_star >= sigma);
  CHECK(fp.predicted_mse == doctest::Approx(delta * (fp.tau_star * fp.tau_star - sigma * sigma)));
  CHECK(validate_pr1(fp.map).empty());
  CHECK(std::isfinite(fp.gordon_value));
  CHECK(fp.gordon_value > 0.0);
}

TEST_CASE("fixed point invariants across penalties") {
  double prev = 0.0;
  for (double sigma : {0.1, 0.25, 0.5}) {
    auto fp = solve_fixed_point(kSparse, 0.64, sigma, PenaltySpec{SmoothedOwl{fixtures::thirds()}, 1.0}, 2048);
    CAPTURE(sigma);
    CHECK(fp.residual_tau <= 1e-6);
    CHECK(fp.residual_lambda <= 1e-6);
    CHECK(fp.tau_star >= sigma);
    CHECK(fp.tau_star >= prev);
    CHECK(validate_pr1(fp.map).empty());
    prev = fp.tau_star;
  }
  auto fp = solve_fixed_point(kSparse, 0.8, 0.3, PenaltySpec{Slope{fixtures::thirds()}, 1.0}, 2048);
  CHECK(std::isfinite(fp.gordon_value));
  auto sep = separable_equivalent(fp);
  CHECK(sep.is_separable());
  CHECK(sep.scale == doctest::Approx(1.0 / fp.lambda_star));
}

TEST_CASE("least squares at zero penalty") {
  auto X = gaussian_design(60, 8, 1);
  auto y = gaussian_vector(60, 2);
  auto fit = fit_penalized_ls(X, y, zero_penalty(), 1.0, 1e-12);
  Eigen::VectorXd ls = X.colPivHouseholderQr().solve(y);
  CHECK((fit.beta - ls).norm() <= 1e-8);
  Eigen::VectorXd grad = X.transpose() * (X * fit.beta - y) / 60.0;
  CHECK(grad.norm() <= 1e-9);
}

TEST_CASE("zero response gives zero estimate") {
  auto X = gaussian_design(30, 12, 3);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(30);
  for (const auto& n : fixtures::penalty_corpus()) {
    auto fit = fit_penalized_ls(X, y, n.f, 0.1);
    CAPTURE(n.label);
    CHECK(fit.beta.norm() == 0.0);
  }
}

TEST_CASE("lasso fit matches coordinate descent") {
  auto X = gaussian_design(10, 5, 4);
  Eigen::VectorXd theta(5);
  theta << 1.0, 0.0, -0.5, 0.0, 2.0;
  Eigen::VectorXd y = X * theta + 0.1 * gaussian_vector(10, 5);
  for (double lam : {0.02, 0.1, 0.4}) {
    auto fit = fit_penalized_ls(X, y, lasso(1.0), lam, 1e-12);
    auto cd = oracle::lasso_cd(X, y, lam);
    CAPTURE(lam);
    CHECK((fit.beta - cd).lpNorm<Eigen::Infinity>() <= 1e-6);
  }
}

TEST_CASE("fit objective is monotone and beats reference points") {
  auto X = gaussian_design(120, 80, 6);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(80);
  for (int j = 0; j < 8; ++j) theta(j) = j % 2 ? 1.5 : -1.5;
  Eigen::VectorXd y = X * theta + 0.3 * gaussian_vector(120, 7);
  Eigen::VectorXd ls = X.colPivHouseholderQr().solve(y);
  for (const auto& n : fixtures::penalty_corpus()) {
    if (!n.f.evaluable()) continue;
    const double lam = 1.0 / 80.0;
    auto fit = fit_penalized_ls(X, y, n.f, lam);
    CAPTURE(n.label);
    for (std::size_t k = 1; k < fit.trace.size(); ++k)
      CHECK(fit.trace[k] <= fit.trace[k - 1] + 1e-12 * std::abs(fit.trace[k - 1]));
    CHECK(fit.objective <= fit_objective(X, y, n.f, lam, Eigen::VectorXd::Zero(80)));
    CHECK(fit.objective <= fit_objective(X, y, n.f, lam, ls) + 1e-12);
    auto ref = fit_penalized_ls(X, y, n.f, lam, 1e-12);
    CHECK(std::abs(fit.objective - ref.objective) <= 1e-6 * std::max(1.0, std::abs(ref.objective)));
  }
}

TEST_CASE("fit reports non-convergence") {
  auto X = gaussian_design(40, 30, 8);
  auto y = gaussian_vector(40, 9);
  CHECK_THROWS_AS(fit_penalized_ls(X, y, lasso(1.0), 0.001, 1e-14, 3), NoConvergence);
}

TEST_CASE("noiseless overdetermined recovery") {
  LinearConfig c;
  c.theta = ThetaSpec::from_prior(kSparse, 100);
  c.delta = 4.0;
  c.sigma = 1e-6;
  c.penalty = lasso(1e-6);
  c.trials = 2;
  c.seed = 3;
  c.grid_size = 512;
  auto fp = solve_fixed_point(c);
  auto r = lm_concentration_experiment(c, fp, true);
  REQUIRE(r.trials.size() == 2);
  for (const auto& t : r.trials) {
    CHECK(t.empirical_mse < 1e-8);
    CHECK(t.scalar_gap < 1e-8);
    CHECK(t.w2 < 1e-3);
  }
  REQUIRE(r.joints.size() == 2);
  CHECK(r.joints[0].size() == 100);
  CHECK(r.predicted.size() == 100);
}

TEST_CASE("lasso concentration at moderate size") {
  LinearConfig c;
  c.theta = ThetaSpec::from_prior(kSparse, 500);
  c.delta = 0.64;
  c.sigma = 0.25;
  c.penalty = lasso(0.3);
  c.trials = 4;
  c.seed = 21;
  auto fp = solve_fixed_point(c);
  auto r = lm_concentration_experiment(c, fp);
  CHECK(r.gap_summary.median <= 0.15 * c.delta * fp.tau_star * fp.tau_star);
  auto again = lm_concentration_experiment(c, fp);
  for (std::size_t t = 0; t < r.trials.size(); ++t) {
    CHECK(again.trials[t].scalar_gap == r.trials[t].scalar_gap);
    CHECK(again.trials[t].w2 == r.trials[t].w2);
  }
}

TEST_CASE("linear config validation") {
  LinearConfig c;
  c.theta = ThetaSpec::from_prior(kSparse, 10);
  c.penalty = lasso(1.0);
  c.delta = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c.delta = 0.01;
  CHECK_THROWS_AS(c.validate(), Error);
  c.delta = 1.0;
  c.sigma = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c.sigma = 1.0;
  CHECK_NOTHROW(c.validate());
  CHECK(c.n() == 10);
}

TEST_CASE("joint diagnostic pairs the subsampled coordinates") {
  LinearConfig c;
  c.theta = ThetaSpec::from_prior(kSparse, 1000);
  c.delta = 0.64;
  c.sigma = 0.25;
  c.penalty = lasso(0.3);
  c.trials = 3;
  c.seed = 5;
  auto fp = solve_fixed_point(kSparse, c.delta, c.sigma, c.penalty, 1024);
  c.joint_subsample = 1000;
  auto full = lm_concentration_experiment(c, fp);
  c.joint_subsample = 500;
  auto half = lm_concentration_experiment(c, fp);
  for (std::size_t t = 0; t < 3; ++t) CHECK(half.trials[t].w2 <= 1.5 * full.trials[t].w2 + 0.01);
}
