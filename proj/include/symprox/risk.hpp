#pragma once

#include <functional>
#include <vector>

#include "symprox/measures.hpp"
#include "symprox/pr1_map.hpp"
#include "symprox/scalar_rep.hpp"

namespace symprox {

// Posterior mean and variance of theta ~ mu given y = theta + tau z.
struct Posterior {
  double mean;
  double var;
};
Posterior posterior(const EmpiricalMeasure1D& mu, double tau, double y);

// Posterior mean tabulated on the quantile grid of mu * N(0, tau^2). The
// result need not be 1-Lipschitz; its end slopes are 0.
PR1Map bayes_estimator(const EmpiricalMeasure1D& mu, double tau, std::size_t m);

struct RiskOptions {
  int gh_nodes = 61;
  double pr1_slope_tol = 1e-6;
  ProjectionOptions projection;
};

struct RiskResult {
  double r_sep = 0;
  double bayes_risk = 0;
  double map_risk = 0;  // risk of optimal_map under the exact law of Y
  PR1Map optimal_map;
  PR1Map bayes_map;
  double bayes_max_slope = 0;
  bool bayes_in_pr1 = false;
};

RiskResult optimal_separable_risk(const EmpiricalMeasure1D& mu, double tau, std::size_t m = 4096,
                                  const RiskOptions& opt = {});

// E (eta(Theta + tau G) - Theta)^2 by exact integration of the
// piecewise-linear map.
double map_risk(const PR1Map& eta, const EmpiricalMeasure1D& mu, double tau);

struct TauSep {
  double tau2 = 0;
  double tau = 0;
  double risk_bound = 0;  // delta (tau_sep^2 - sigma^2)
  int probes = 0;
};

// sup { t : delta (t - sigma^2) < R(sqrt t) } by bisection on
// [sigma^2, sigma^2 + second_moment / delta + 1].
TauSep tau_sep(const std::function<double(double)>& risk, double second_moment, double sigma, double delta,
               double rel_tol = 1e-6);
TauSep tau_sep(const EmpiricalMeasure1D& mu, double sigma, double delta, std::size_t m = 4096,
               const RiskOptions& opt = {});

}  // namespace symprox
