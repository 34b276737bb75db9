#pragma once

#include <cstddef>
#include <vector>

namespace symprox {

struct AssignmentResult {
  std::vector<std::size_t> col_of_row;
  double cost = 0.0;
};

// Minimum-cost perfect matching on a dense n x n row-major cost matrix
// (Kuhn-Munkres with potentials, O(n^3)).
AssignmentResult solve_assignment(const std::vector<double>& cost, std::size_t n);

// Maximum-value perfect matching.
AssignmentResult solve_assignment_max(const std::vector<double>& value, std::size_t n);

}  // namespace symprox
