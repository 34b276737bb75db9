#pragma once

#include <cmath>
#include <vector>

namespace symprox {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

inline double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double norm_quantile(double p);

// Nodes and weights for E f(G), G ~ N(0,1). Weights sum to 1.
struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadRule gauss_hermite(int q);

// Moments of G restricted to [l, u]; infinite endpoints allowed.
struct TruncMoments {
  double m0;  // P(l < G < u)
  double m1;  // E[G 1{l<G<u}]
  double m2;  // E[G^2 1{l<G<u}]
};
TruncMoments trunc_moments(double l, double u);

}  // namespace symprox
