#include "symprox/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "symprox/assignment.hpp"
#include "symprox/errors.hpp"
#include "symprox/normal.hpp"

namespace symprox {

namespace {

constexpr double kMergeTol = 1e-12;

void check_t(double t) {
  require(t > 0.0 && t < 1.0, Errc::OutOfRange, "quantile level must lie in (0,1), got " + std::to_string(t));
}

}  // namespace

EmpiricalMeasure1D::EmpiricalMeasure1D(std::vector<double> atoms, std::vector<double> weights) {
  require(!atoms.empty(), Errc::InvalidArgument, "measure needs at least one atom");
  require(atoms.size() == weights.size(), Errc::SizeMismatch, "atoms and weights differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    require(std::isfinite(atoms[i]), Errc::InvalidArgument, "atoms must be finite");
    require(std::isfinite(weights[i]) && weights[i] >= 0.0, Errc::InvalidArgument,
            "weights must be finite and nonnegative");
    total += weights[i];
  }
  require(total > 0.0, Errc::InvalidArgument, "weights must have positive total");

  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return atoms[i] < atoms[j]; });
  for (auto i : order) {
    if (weights[i] == 0.0) continue;
    if (!atoms_.empty() && atoms[i] - atoms_.back() <= kMergeTol) {
      weights_.back() += weights[i];
    } else {
      atoms_.push_back(atoms[i]);
      weights_.push_back(weights[i]);
    }
  }
  for (auto& w : weights_) w /= total;
}

EmpiricalMeasure1D EmpiricalMeasure1D::uniform(const std::vector<double>& values) {
  return EmpiricalMeasure1D(values, std::vector<double>(values.size(), 1.0));
}

double EmpiricalMeasure1D::mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) s += weights_[i] * atoms_[i];
  return s;
}

double EmpiricalMeasure1D::second_moment() const {
  double s = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) s += weights_[i] * atoms_[i] * atoms_[i];
  return s;
}

double EmpiricalMeasure1D::variance() const {
  double m = mean(), s = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) s += weights_[i] * (atoms_[i] - m) * (atoms_[i] - m);
  return s;
}

double EmpiricalMeasure1D::cdf(double x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < atoms_.size() && atoms_[i] <= x; ++i) s += weights_[i];
  return std::min(s, 1.0);
}

double EmpiricalMeasure1D::quantile(double t) const {
  check_t(t);
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < atoms_.size(); ++i) {
    cum += weights_[i];
    if (cum >= t) return atoms_[i];
  }
  return atoms_.back();
}

std::vector<double> EmpiricalMeasure1D::materialize(std::size_t p) const {
  require(p >= 1, Errc::InvalidArgument, "materialize needs p >= 1");
  std::vector<double> out(p);
  double cum = weights_[0];
  std::size_t k = 0;
  for (std::size_t j = 0; j < p; ++j) {
    double t = (static_cast<double>(j) + 0.5) / static_cast<double>(p);
    while (k + 1 < atoms_.size() && cum < t) cum += weights_[++k];
    out[j] = atoms_[k];
  }
  return out;
}

GridMeasure::GridMeasure(std::vector<double> quantile_grid) : q_(std::move(quantile_grid)) {
  require(q_.size() >= 1, Errc::InvalidGrid, "grid must be nonempty");
  for (std::size_t i = 0; i < q_.size(); ++i) {
    require(std::isfinite(q_[i]), Errc::InvalidGrid, "grid values must be finite");
    if (i > 0) require(q_[i] >= q_[i - 1], Errc::InvalidGrid, "grid must be nondecreasing");
  }
}

double GridMeasure::quantile(double t) const {
  check_t(t);
  double m = static_cast<double>(q_.size());
  auto i = static_cast<std::size_t>(std::ceil(t * m - 1e-12 * m));
  i = std::clamp<std::size_t>(i, 1, q_.size());
  return q_[i - 1];
}

double GridMeasure::mean() const {
  return std::accumulate(q_.begin(), q_.end(), 0.0) / static_cast<double>(q_.size());
}

double GridMeasure::second_moment() const {
  double s = 0.0;
  for (double v : q_) s += v * v;
  return s / static_cast<double>(q_.size());
}

EmpiricalMeasure1D GridMeasure::to_empirical() const { return EmpiricalMeasure1D::uniform(q_); }

JointSample2D::JointSample2D(std::vector<Point2> pairs)
    : JointSample2D(pairs, std::vector<double>(pairs.size(), 1.0)) {}

JointSample2D::JointSample2D(std::vector<Point2> pairs, std::vector<double> weights)
    : pairs_(std::move(pairs)), weights_(std::move(weights)) {
  require(pairs_.size() == weights_.size(), Errc::SizeMismatch, "pairs and weights differ in length");
  require(!pairs_.empty(), Errc::InvalidArgument, "joint sample needs at least one pair");
  double total = 0.0;
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    require(std::isfinite(pairs_[i].u) && std::isfinite(pairs_[i].v), Errc::InvalidArgument,
            "joint sample entries must be finite");
    require(std::isfinite(weights_[i]) && weights_[i] >= 0.0, Errc::InvalidArgument,
            "joint sample weights must be nonnegative");
    total += weights_[i];
  }
  require(total > 0.0, Errc::InvalidArgument, "joint sample weights must have positive total");
  for (auto& w : weights_) w /= total;
}

bool JointSample2D::equal_weights(double tol) const {
  double w0 = 1.0 / static_cast<double>(weights_.size());
  return std::all_of(weights_.begin(), weights_.end(), [&](double w) { return std::abs(w - w0) <= tol; });
}

double w2_1d(const EmpiricalMeasure1D& a, const EmpiricalMeasure1D& b) {
  const auto &xa = a.atoms(), &wa = a.weights(), &xb = b.atoms(), &wb = b.weights();
  std::size_t i = 0, j = 0;
  double ra = wa[0], rb = wb[0], cost = 0.0;
  // Walk the merged partition of [0,1] by cumulative weight.
  while (i < xa.size() && j < xb.size()) {
    double step = std::min(ra, rb);
    double d = xa[i] - xb[j];
    cost += step * d * d;
    ra -= step;
    rb -= step;
    if (ra <= 1e-15) {
      if (++i < xa.size()) ra += wa[i];
    }
    if (rb <= 1e-15) {
      if (++j < xb.size()) rb += wb[j];
    }
  }
  return std::sqrt(std::max(cost, 0.0));
}

double w2_1d(const EmpiricalMeasure1D& a, const GridMeasure& b) { return w2_1d(a, b.to_empirical()); }

double w2_2d(const JointSample2D& a, const JointSample2D& b, std::size_t cap) {
  require(a.size() == b.size(), Errc::SizeMismatch,
          "w2_2d needs equal atom counts (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  require(a.size() <= cap, Errc::TooLarge,
          "w2_2d atom count " + std::to_string(a.size()) + " exceeds cap " + std::to_string(cap));
  require(a.equal_weights() && b.equal_weights(), Errc::InvalidArgument, "w2_2d needs equal-weight samples");
  std::size_t n = a.size();
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double du = a.pairs()[i].u - b.pairs()[j].u, dv = a.pairs()[i].v - b.pairs()[j].v;
      cost[i * n + j] = du * du + dv * dv;
    }
  }
  auto r = solve_assignment(cost, n);
  return std::sqrt(std::max(r.cost, 0.0) / static_cast<double>(n));
}

namespace {

// Mixture CDF (or survival function) with atoms farther than 9 tau lumped.
class MixtureCdf {
 public:
  MixtureCdf(const EmpiricalMeasure1D& mu, double tau) : a_(mu.atoms()), w_(mu.weights()), tau_(tau) {
    cum_.resize(a_.size() + 1, 0.0);
    for (std::size_t k = 0; k < a_.size(); ++k) cum_[k + 1] = cum_[k] + w_[k];
  }

  // Returns F(x) (upper = false) or 1 - F(x) (upper = true), and the density.
  void eval(double x, bool upper, double& value, double& density) const {
    double r = 9.0 * tau_;
    auto lo = std::lower_bound(a_.begin(), a_.end(), x - r) - a_.begin();
    auto hi = std::upper_bound(a_.begin(), a_.end(), x + r) - a_.begin();
    double v = upper ? (cum_.back() - cum_[hi]) : cum_[lo];
    double d = 0.0;
    for (auto k = lo; k < hi; ++k) {
      double z = (x - a_[k]) / tau_;
      v += w_[k] * (upper ? norm_cdf(-z) : norm_cdf(z));
      d += w_[k] * norm_pdf(z);
    }
    value = v;
    density = d / tau_;
  }

 private:
  const std::vector<double>& a_;
  const std::vector<double>& w_;
  std::vector<double> cum_;
  double tau_;
};

}  // namespace

GridMeasure gaussian_convolve(const EmpiricalMeasure1D& mu, double tau, std::size_t m) {
  require(m >= 2, Errc::InvalidGrid, "grid size must be at least 2");
  require(tau >= 0.0 && std::isfinite(tau), Errc::InvalidArgument, "tau must be finite and nonnegative");
  std::vector<double> q(m);
  double md = static_cast<double>(m);
  if (tau == 0.0) {
    for (std::size_t i = 0; i < m; ++i) q[i] = mu.quantile((static_cast<double>(i) + 0.5) / md);
    return GridMeasure(std::move(q));
  }
  MixtureCdf F(mu, tau);
  const double tol = 1e-10 * std::max(1.0, tau);
  const double bracket_lo = mu.atoms().front() - 10.0 * tau;
  const double bracket_hi = mu.atoms().back() + 10.0 * tau;
  double prev = bracket_lo;
  for (std::size_t i = 0; i < m; ++i) {
    bool upper = 2 * i + 1 > m;
    double target = upper ? (md - static_cast<double>(i) - 0.5) / md : (static_cast<double>(i) + 0.5) / md;
    // g(x) = F(x) - t is increasing; in survival form g(x) = target - S(x).
    auto g = [&](double x, double& dg) {
      double val, den;
      F.eval(x, upper, val, den);
      dg = den;
      return upper ? target - val : val - target;
    };
    double lo = prev, hi = bracket_hi;
    double x = prev, dg;
    double gx = g(x, dg);
    if (gx >= 0.0) {
      q[i] = x;
      continue;
    }
    for (int it = 0; it < 400 && hi - lo > tol; ++it) {
      if (gx < 0.0)
        lo = x;
      else
        hi = x;
      double xn = dg > 0.0 ? x - gx / dg : 0.5 * (lo + hi);
      if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
      bool small = std::abs(xn - x) <= 0.25 * tol;
      x = xn;
      gx = g(x, dg);
      if (small) break;
    }
    q[i] = x;
    prev = x;
  }
  return GridMeasure(std::move(q));
}

}  // namespace symprox
