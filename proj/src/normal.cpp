#include "symprox/normal.hpp"

#include <Eigen/Dense>
#include <boost/math/special_functions/erf.hpp>
#include <map>
#include <mutex>

#include "symprox/errors.hpp"

namespace symprox {

double norm_quantile(double p) {
  require(p > 0.0 && p < 1.0, Errc::OutOfRange, "normal quantile needs p in (0,1)");
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

QuadRule gauss_hermite(int q) {
  require(q >= 1, Errc::InvalidArgument, "Gauss-Hermite rule needs q >= 1");
  static std::mutex mu;
  static std::map<int, QuadRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(q); it != cache.end()) return it->second;

  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(q, q);
  for (int k = 1; k < q; ++k) {
    J(k, k - 1) = std::sqrt(static_cast<double>(k));
    J(k - 1, k) = J(k, k - 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadRule r;
  r.nodes.resize(q);
  r.weights.resize(q);
  double total = 0.0;
  for (int i = 0; i < q; ++i) {
    r.nodes[i] = es.eigenvalues()(i);
    r.weights[i] = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
    total += r.weights[i];
  }
  for (auto& w : r.weights) w /= total;
  // Symmetrize to kill eigen-solver noise.
  for (int i = 0; i < q / 2; ++i) {
    double x = 0.5 * (r.nodes[q - 1 - i] - r.nodes[i]);
    double w = 0.5 * (r.weights[i] + r.weights[q - 1 - i]);
    r.nodes[i] = -x;
    r.nodes[q - 1 - i] = x;
    r.weights[i] = r.weights[q - 1 - i] = w;
  }
  if (q % 2 == 1) r.nodes[q / 2] = 0.0;
  cache.emplace(q, r);
  return r;
}

TruncMoments trunc_moments(double l, double u) {
  if (!(u > l)) return {0.0, 0.0, 0.0};
  auto phi = [](double x) { return std::isinf(x) ? 0.0 : norm_pdf(x); };
  auto xphi = [](double x) { return std::isinf(x) ? 0.0 : x * norm_pdf(x); };
  double m0;
  // Use the upper tail when both ends are positive to keep precision.
  if (l > 0.0)
    m0 = norm_cdf(-l) - norm_cdf(-u);
  else
    m0 = norm_cdf(u) - norm_cdf(l);
  double m1 = phi(l) - phi(u);
  double m2 = m0 + xphi(l) - xphi(u);
  return {m0, m1, m2};
}

}  // namespace symprox
