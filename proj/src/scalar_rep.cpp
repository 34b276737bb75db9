#include "symprox/scalar_rep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "symprox/errors.hpp"

namespace symprox {

PR1Map effective_scalar_rep(const PenaltySpec& f, const GridMeasure& mu, const ProxOptions& opt) {
  const auto& y = mu.grid();
  require(y.size() >= 16, Errc::InvalidGrid, "effective_scalar_rep needs a grid of at least 16 points");
  require(y.back() > y.front(), Errc::DegenerateGrid, "all grid values are equal");
  if (f.is_separable()) {
    PR1Map exact = separable_prox_map(f);
    std::vector<double> nodes(y);
    nodes.insert(nodes.end(), exact.y.begin(), exact.y.end());
    std::sort(nodes.begin(), nodes.end());
    PR1Map m = pr1_from_nodes(nodes, exact(nodes));
    m.slope_left = exact.slope_left;
    m.slope_right = exact.slope_right;
    return m;
  }
  return pr1_from_nodes(y, prox(f, y, opt));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Continuous nondecreasing piecewise-linear function: knots plus end slopes.
struct PwLinear {
  std::vector<double> k, v;
  double sl = 0.0, sr = 0.0;

  // [a, b] = {x : value(x) = 0}; value is < 0 left of a and > 0 right of b.
  void zero_interval(double& a, double& b) const {
    std::size_t r = k.size();
    if (v[0] >= 0.0) {
      a = sl > 0.0 ? k[0] - v[0] / sl : -kInf;
    } else {
      std::size_t j = 1;
      while (j < r && v[j] < 0.0) ++j;
      a = j < r ? k[j - 1] - v[j - 1] * (k[j] - k[j - 1]) / (v[j] - v[j - 1]) : k[r - 1] - v[r - 1] / sr;
    }
    if (v[r - 1] <= 0.0) {
      b = sr > 0.0 ? k[r - 1] - v[r - 1] / sr : kInf;
    } else {
      std::size_t j = r - 1;
      while (j > 0 && v[j - 1] > 0.0) --j;
      b = j > 0 ? k[j - 1] - v[j - 1] * (k[j] - k[j - 1]) / (v[j] - v[j - 1]) : k[0] - v[0] / sl;
    }
    if (b < a) b = a;
  }
};

PR1Map project_exact(const std::vector<double>& y, const std::vector<double>& t, const std::vector<double>& w) {
  const std::size_t m = y.size();
  std::vector<double> lo(m), hi(m);
  PwLinear F{{0.0}, {0.0}, 0.0, 0.0};
  auto add_quadratic = [&](double wi, double ti) {
    for (std::size_t j = 0; j < F.k.size(); ++j) F.v[j] += 2.0 * wi * (F.k[j] - ti);
    F.sl += 2.0 * wi;
    F.sr += 2.0 * wi;
  };
  add_quadratic(w[0], t[0]);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    double a, b;
    F.zero_interval(a, b);
    lo[i] = a;
    hi[i] = b;
    const double h = y[i + 1] - y[i];
    // Window minimum over [x - h, x]: flatten the zero set and shift the right part by h.
    PwLinear G;
    for (std::size_t j = 0; j < F.k.size(); ++j) {
      if (F.k[j] < a) {
        G.k.push_back(F.k[j]);
        G.v.push_back(F.v[j]);
      }
    }
    if (std::isfinite(a)) {
      G.k.push_back(a);
      G.v.push_back(0.0);
    }
    if (std::isfinite(b) && (G.k.empty() || b + h > G.k.back())) {
      G.k.push_back(b + h);
      G.v.push_back(0.0);
    }
    for (std::size_t j = 0; j < F.k.size(); ++j) {
      if (F.k[j] > b && F.k[j] + h > G.k.back()) {
        G.k.push_back(F.k[j] + h);
        G.v.push_back(F.v[j]);
      }
    }
    if (G.k.empty()) {
      G.k.push_back(0.0);
      G.v.push_back(0.0);
    }
    G.sl = std::isfinite(a) ? F.sl : 0.0;
    G.sr = std::isfinite(b) ? F.sr : 0.0;
    F = std::move(G);
    add_quadratic(w[i + 1], t[i + 1]);
  }
  double a, b;
  F.zero_interval(a, b);
  std::vector<double> x(m);
  if (std::isfinite(a) && std::isfinite(b))
    x[m - 1] = 0.5 * (a + b);
  else if (std::isfinite(a))
    x[m - 1] = a;
  else if (std::isfinite(b))
    x[m - 1] = b;
  else
    x[m - 1] = t[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) {
    double c = std::clamp(x[i + 1], lo[i], hi[i]);
    x[i] = std::clamp(c, x[i + 1] - (y[i + 1] - y[i]), x[i + 1]);
  }
  return pr1_from_nodes(y, x);
}

PR1Map project_dykstra(const std::vector<double>& y, const std::vector<double>& t, const std::vector<double>& w,
                       const ProjectionOptions& opt) {
  const std::size_t m = y.size();
  for (double wi : w) require(wi > 0.0, Errc::InvalidArgument, "Dykstra projection needs positive weights");
  std::vector<double> sw(m), z(m);
  for (std::size_t i = 0; i < m; ++i) {
    sw[i] = std::sqrt(w[i]);
    z[i] = sw[i] * t[i];
  }
  // Constraint 2i: x_i - x_{i+1} <= 0; constraint 2i+1: x_{i+1} - x_i <= h_i.
  std::vector<double> e0(2 * (m - 1), 0.0), e1(2 * (m - 1), 0.0);
  auto objective = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += (z[i] - sw[i] * t[i]) * (z[i] - sw[i] * t[i]);
    return s;
  };
  double prev = objective();
  double viol = kInf;
  for (long sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    for (std::size_t i = 0; i + 1 < m; ++i) {
      for (int side = 0; side < 2; ++side) {
        std::size_t c = 2 * i + side;
        double sgn = side == 0 ? 1.0 : -1.0;
        double ci = sgn / sw[i], cj = -sgn / sw[i + 1];
        double d = side == 0 ? 0.0 : y[i + 1] - y[i];
        double u0 = z[i] + e0[c], u1 = z[i + 1] + e1[c];
        double excess = ci * u0 + cj * u1 - d;
        double f = excess > 0.0 ? excess / (ci * ci + cj * cj) : 0.0;
        double n0 = u0 - f * ci, n1 = u1 - f * cj;
        e0[c] = u0 - n0;
        e1[c] = u1 - n1;
        z[i] = n0;
        z[i + 1] = n1;
      }
    }
    viol = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      double dx = z[i + 1] / sw[i + 1] - z[i] / sw[i];
      viol = std::max({viol, -dx, dx - (y[i + 1] - y[i])});
    }
    double obj = objective();
    bool done = viol <= opt.violation_tol && std::abs(obj - prev) <= opt.objective_tol * (1.0 + obj);
    prev = obj;
    if (done) {
      std::vector<double> x(m);
      for (std::size_t i = 0; i < m; ++i) x[i] = z[i] / sw[i];
      return pr1_from_nodes(y, x);
    }
  }
  throw NoConvergence("project_pr1 (Dykstra)", opt.max_sweeps, viol);
}

}  // namespace

PR1Map project_pr1(const std::vector<double>& y_nodes, const std::vector<double>& targets,
                   const std::vector<double>& weights, const ProjectionOptions& opt) {
  const std::size_t m = y_nodes.size();
  require(m >= 1, Errc::InvalidArgument, "project_pr1 needs at least one node");
  require(targets.size() == m && weights.size() == m, Errc::SizeMismatch, "project_pr1 inputs differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    require(std::isfinite(y_nodes[i]) && std::isfinite(targets[i]), Errc::InvalidArgument,
            "project_pr1 inputs must be finite");
    require(weights[i] >= 0.0, Errc::InvalidArgument, "project_pr1 weights must be nonnegative");
    if (i > 0) require(y_nodes[i] > y_nodes[i - 1], Errc::InvalidGrid, "project_pr1 nodes must be strictly increasing");
    total += weights[i];
  }
  require(total > 0.0, Errc::InvalidArgument, "project_pr1 weights must have positive sum");
  if (m == 1) return PR1Map{{y_nodes[0]}, {targets[0]}, 0.0, 0.0};
  return opt.method == ProjectionMethod::Exact ? project_exact(y_nodes, targets, weights)
                                               : project_dykstra(y_nodes, targets, weights, opt);
}

}  // namespace symprox
