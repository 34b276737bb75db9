#include "symprox/assignment.hpp"

#include <limits>

#include "symprox/errors.hpp"

namespace symprox {

AssignmentResult solve_assignment(const std::vector<double>& cost, std::size_t n) {
  require(cost.size() == n * n, Errc::SizeMismatch, "assignment cost matrix is not n x n");
  AssignmentResult res;
  if (n == 0) return res;
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based rows/cols; column 0 is the virtual source.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      std::size_t i0 = p[j0], j1 = 0;
      double delta = inf;
      const double* row = &cost[(i0 - 1) * n];
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = row[j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  res.col_of_row.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) res.col_of_row[p[j] - 1] = j - 1;
  for (std::size_t i = 0; i < n; ++i) res.cost += cost[i * n + res.col_of_row[i]];
  return res;
}

AssignmentResult solve_assignment_max(const std::vector<double>& value, std::size_t n) {
  std::vector<double> neg(value.size());
  for (std::size_t k = 0; k < value.size(); ++k) neg[k] = -value[k];
  auto r = solve_assignment(neg, n);
  r.cost = -r.cost;
  return r;
}

}  // namespace symprox
