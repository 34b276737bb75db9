#pragma once

#include <cstddef>
#include <vector>

namespace symprox {

// Finitely supported probability measure on the line. Atoms are sorted and
// strictly increasing; atoms within 1e-12 of each other are merged.
class EmpiricalMeasure1D {
 public:
  EmpiricalMeasure1D() = default;
  // Weights are normalized to sum to one.
  EmpiricalMeasure1D(std::vector<double> atoms, std::vector<double> weights);

  // (1/p) sum of point masses at the entries of `values`.
  static EmpiricalMeasure1D uniform(const std::vector<double>& values);

  const std::vector<double>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return atoms_.size(); }

  double mean() const;
  double second_moment() const;
  double variance() const;
  double cdf(double x) const;
  double quantile(double t) const;
  // Values at t_j = (j - 1/2)/p, j = 1..p.
  std::vector<double> materialize(std::size_t p) const;

  bool operator==(const EmpiricalMeasure1D&) const = default;

 private:
  std::vector<double> atoms_;
  std::vector<double> weights_;
};

// Quantile function sampled at t_i = (i - 1/2)/m with equal weights 1/m.
class GridMeasure {
 public:
  GridMeasure() = default;
  explicit GridMeasure(std::vector<double> quantile_grid);

  const std::vector<double>& grid() const { return q_; }
  std::size_t size() const { return q_.size(); }
  double quantile(double t) const;
  double mean() const;
  double second_moment() const;
  EmpiricalMeasure1D to_empirical() const;

 private:
  std::vector<double> q_;
};

struct Point2 {
  double u;
  double v;
};

class JointSample2D {
 public:
  JointSample2D() = default;
  // Equal weights.
  explicit JointSample2D(std::vector<Point2> pairs);
  JointSample2D(std::vector<Point2> pairs, std::vector<double> weights);

  const std::vector<Point2>& pairs() const { return pairs_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return pairs_.size(); }
  bool equal_weights(double tol = 1e-12) const;

 private:
  std::vector<Point2> pairs_;
  std::vector<double> weights_;
};

inline constexpr std::size_t kW2AssignmentCap = 4096;

double w2_1d(const EmpiricalMeasure1D& a, const EmpiricalMeasure1D& b);
double w2_1d(const EmpiricalMeasure1D& a, const GridMeasure& b);
double w2_2d(const JointSample2D& a, const JointSample2D& b, std::size_t cap = kW2AssignmentCap);

// Quantile grid of mu * N(0, tau^2) at m midpoints.
GridMeasure gaussian_convolve(const EmpiricalMeasure1D& mu, double tau, std::size_t m);

}  // namespace symprox
