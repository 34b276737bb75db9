#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "symprox/measures.hpp"
#include "symprox/penalties.hpp"
#include "symprox/pr1_map.hpp"
#include "symprox/sequence_model.hpp"

namespace symprox {

// Expectations over Theta ~ mu, G ~ N(0,1) of a map applied to Theta + tau G.
enum class SeQuadrature { Exact, GaussHermite };

struct SeOptions {
  SeQuadrature method = SeQuadrature::Exact;
  int gh_nodes = 61;
  ProxOptions prox;
};

struct SeMoments {
  double mse;    // E (A(Theta + tau G) - Theta)^2
  double cross;  // E G A(Theta + tau G)
};

// Moments of an arbitrary PR1 map.
SeMoments map_moments(const PR1Map& A, const EmpiricalMeasure1D& mu, double tau, const SeOptions& opt = {});

// Moments of the effective scalar representation of lambda * penalty on the
// grid of mu * N(0, tau^2).
SeMoments se_expectations(const PenaltySpec& penalty, const EmpiricalMeasure1D& mu, double tau, double lambda,
                          std::size_t m, const SeOptions& opt = {});

struct LinearConfig {
  ThetaSpec theta;
  double delta = 1.0;
  double sigma = 1.0;
  PenaltySpec penalty;
  std::size_t grid_size = 4096;
  SeOptions se;
  double fp_tol = 1e-8;
  double damping = 0.5;
  int max_outer = 500;
  double fit_tol = 1e-8;
  long fit_max_iters = 50000;
  std::size_t trials = 10;
  std::uint64_t seed = 0;
  std::size_t joint_subsample = 512;

  std::size_t p() const { return theta.dimension(); }
  std::size_t n() const;
  void validate() const;
};

struct FixedPointSolution {
  double tau_star = 0;
  double lambda_star = 0;
  double predicted_mse = 0;
  double gordon_value = 0;  // NaN when the penalty cannot be evaluated
  double residual_tau = 0;
  double residual_lambda = 0;
  int outer_iterations = 0;
  PR1Map map;
};

FixedPointSolution solve_fixed_point(const EmpiricalMeasure1D& mu_theta, double delta, double sigma,
                                     const PenaltySpec& penalty, std::size_t m, const SeOptions& se = {},
                                     double tol = 1e-8, double damping = 0.5, int max_outer = 500);
FixedPointSolution solve_fixed_point(const LinearConfig& cfg);

// For fixed tau, the lambda solving delta = lambda (1 - cross / (delta tau)).
double solve_lambda(const EmpiricalMeasure1D& mu_theta, const GridMeasure& grid, double tau, double delta,
                    const PenaltySpec& penalty, const SeOptions& se);

struct FitResult {
  Eigen::VectorXd beta;
  long iterations = 0;
  int restarts = 0;
  double objective = 0;  // NaN when the penalty cannot be evaluated
  std::vector<double> trace;  // accepted objective values
};

// argmin (1/2n)||y - X b||^2 + lambda * penalty(b) by accelerated proximal
// gradient with restarts.
FitResult fit_penalized_ls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const PenaltySpec& penalty,
                           double lambda, double tol = 1e-8, long max_iters = 50000, const ProxOptions& prox_opt = {});

struct LmTrial {
  double scalar_gap = 0;
  double w2 = 0;
  double empirical_mse = 0;
  long iterations = 0;
};

struct LmReport {
  FixedPointSolution fp;
  std::vector<LmTrial> trials;
  Summary gap_summary;
  Summary w2_summary;
  std::vector<std::vector<Point2>> joints;  // (theta_hat_j, theta_j) per trial
  std::vector<Point2> predicted;            // (A(theta_j + tau g_j), theta_j)
};

LmReport lm_concentration_experiment(const LinearConfig& cfg, const FixedPointSolution& fp, bool keep_joints = false);

// The separable penalty with the same effective map: Separable(TabulatedProx(A*)) / lambda*.
PenaltySpec separable_equivalent(const FixedPointSolution& fp);

}  // namespace symprox
