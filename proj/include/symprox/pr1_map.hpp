#pragma once

#include <string>
#include <vector>

namespace symprox {

// Piecewise-linear map through (y_i, x_i) with linear extension beyond the
// end nodes. Members of PR1 are nondecreasing and 1-Lipschitz.
struct PR1Map {
  std::vector<double> y;
  std::vector<double> x;
  double slope_left = 1.0;
  double slope_right = 1.0;

  double operator()(double v) const;
  std::vector<double> operator()(const std::vector<double>& v) const;
  std::size_t size() const { return y.size(); }
  double max_segment_slope() const;

  static PR1Map identity();
  static PR1Map constant(double c);
};

double apply(const PR1Map& map, double y);

enum class ViolationKind { Shape, Ordering, Monotonicity, Lipschitz, ExtensionSlope };
const char* violation_name(ViolationKind k);

struct Violation {
  ViolationKind kind;
  long segment;   // -1 left extension, size()-1 right extension
  double excess;  // in slope units, except Shape/Ordering
};

std::vector<Violation> validate_pr1(const PR1Map& map);

// Builds a PR1 map through noisy node values: duplicate y within 1e-12 are
// merged (x averaged), each slope is clipped to [0,1] and values are
// re-accumulated from the leftmost node. End slopes copy the end segments.
PR1Map pr1_from_nodes(const std::vector<double>& y, const std::vector<double>& x);

// If T = prox[rho], returns prox[s rho]. Its nodes are (1-s) T(y_i) + s y_i.
PR1Map rescale_prox(const PR1Map& T, double s);

}  // namespace symprox
