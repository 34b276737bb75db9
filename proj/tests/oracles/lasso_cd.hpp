#pragma once
// Cyclic coordinate descent for (1/2n)||y - Xb||^2 + kappa ||b||_1.

#include <Eigen/Dense>
#include <cmath>

namespace oracle {

inline Eigen::VectorXd lasso_cd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double kappa, int sweeps = 100000) {
  const double n = static_cast<double>(X.rows());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(X.cols());
  Eigen::VectorXd r = y;
  for (int s = 0; s < sweeps; ++s) {
    double moved = 0.0;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      double cj = X.col(j).squaredNorm() / n;
      double zj = X.col(j).dot(r) / n + cj * b(j);
      double nb = std::copysign(std::max(std::abs(zj) - kappa, 0.0), zj) / cj;
      r -= X.col(j) * (nb - b(j));
      moved = std::max(moved, std::abs(nb - b(j)));
      b(j) = nb;
    }
    if (moved < 1e-15) break;
  }
  return b;
}

}  // namespace oracle
