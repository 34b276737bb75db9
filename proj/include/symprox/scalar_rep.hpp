#pragma once

#include <vector>

#include "symprox/measures.hpp"
#include "symprox/penalties.hpp"
#include "symprox/pr1_map.hpp"

namespace symprox {

// Effective scalar representation of f (materialized at dimension m) on the
// quantile grid of mu. Separable penalties return their exact scalar prox,
// sampled at the grid nodes and at its kinks.
PR1Map effective_scalar_rep(const PenaltySpec& f, const GridMeasure& mu, const ProxOptions& opt = {});

enum class ProjectionMethod { Exact, Dykstra };

struct ProjectionOptions {
  ProjectionMethod method = ProjectionMethod::Exact;
  long max_sweeps = 200000;
  double violation_tol = 1e-9;
  double objective_tol = 1e-10;
};

// Weighted least-squares projection of node targets onto PR1.
PR1Map project_pr1(const std::vector<double>& y_nodes, const std::vector<double>& targets,
                   const std::vector<double>& weights, const ProjectionOptions& opt = {});

}  // namespace symprox
