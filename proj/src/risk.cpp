#include "symprox/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "symprox/errors.hpp"
#include "symprox/linear_model.hpp"
#include "symprox/normal.hpp"
#include "symprox/parallel.hpp"

namespace symprox {

Posterior posterior(const EmpiricalMeasure1D& mu, double tau, double y) {
  const auto& a = mu.atoms();
  const auto& w = mu.weights();
  thread_local std::vector<double> logw;
  logw.resize(a.size());
  double top = -std::numeric_limits<double>::infinity();
  double center = 0.0;
  const double inv = 1.0 / tau;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double z = (y - a[k]) * inv;
    logw[k] = std::log(w[k]) - 0.5 * z * z;
    if (logw[k] > top) {
      top = logw[k];
      center = a[k];
    }
  }
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double e = std::exp(logw[k] - top);
    double d = a[k] - center;
    s0 += e;
    s1 += e * d;
    s2 += e * d * d;
  }
  double m1 = s1 / s0;
  return {center + m1, std::max(0.0, s2 / s0 - m1 * m1)};
}

namespace {

struct Nodes {
  std::vector<double> y, w;
};

Nodes merged_grid(const GridMeasure& g) {
  Nodes n;
  const double share = 1.0 / static_cast<double>(g.size());
  for (double v : g.grid()) {
    if (!n.y.empty() && v - n.y.back() <= 1e-12) {
      n.w.back() += share;
    } else {
      n.y.push_back(v);
      n.w.push_back(share);
    }
  }
  return n;
}

double expected_posterior_variance(const EmpiricalMeasure1D& mu, double tau, int q) {
  auto rule = gauss_hermite(q);
  std::vector<double> per_atom(mu.size());
  parallel_for(mu.size(), [&](std::size_t k) {
    double s = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j)
      s += rule.weights[j] * posterior(mu, tau, mu.atoms()[k] + tau * rule.nodes[j]).var;
    per_atom[k] = s;
  });
  double total = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) total += mu.weights()[k] * per_atom[k];
  return total;
}

}  // namespace

PR1Map bayes_estimator(const EmpiricalMeasure1D& mu, double tau, std::size_t m) {
  require(tau > 0.0, Errc::InvalidArgument, "bayes_estimator needs tau > 0");
  auto nodes = merged_grid(gaussian_convolve(mu, tau, m));
  PR1Map map;
  map.y = nodes.y;
  map.x.resize(nodes.y.size());
  parallel_for(nodes.y.size(), [&](std::size_t i) { map.x[i] = posterior(mu, tau, nodes.y[i]).mean; });
  map.slope_left = 0.0;
  map.slope_right = 0.0;
  return map;
}

double map_risk(const PR1Map& eta, const EmpiricalMeasure1D& mu, double tau) {
  return map_moments(eta, mu, tau).mse;
}

RiskResult optimal_separable_risk(const EmpiricalMeasure1D& mu, double tau, std::size_t m, const RiskOptions& opt) {
  require(tau > 0.0, Errc::InvalidArgument, "optimal_separable_risk needs tau > 0");
  require(m >= 256, Errc::InvalidGrid, "optimal_separable_risk needs m >= 256");
  RiskResult r;
  auto nodes = merged_grid(gaussian_convolve(mu, tau, m));
  r.bayes_map = bayes_estimator(mu, tau, m);
  r.bayes_max_slope = r.bayes_map.size() > 1 ? r.bayes_map.max_segment_slope() : 0.0;
  r.bayes_in_pr1 = r.bayes_max_slope <= 1.0 + opt.pr1_slope_tol;
  r.bayes_risk = expected_posterior_variance(mu, tau, opt.gh_nodes);

  if (nodes.y.size() == 1) {
    r.optimal_map = PR1Map::constant(r.bayes_map.x[0]);
  } else {
    r.optimal_map = project_pr1(nodes.y, r.bayes_map.x, nodes.w, opt.projection);
  }
  double proj = 0.0;
  for (std::size_t i = 0; i < nodes.y.size(); ++i) {
    double d = r.optimal_map(nodes.y[i]) - r.bayes_map.x[i];
    proj += nodes.w[i] * d * d;
  }
  r.r_sep = proj + r.bayes_risk;
  const double zero_risk = mu.second_moment(), identity_risk = tau * tau;
  if (zero_risk < r.r_sep) {
    r.r_sep = zero_risk;
    r.optimal_map = PR1Map::constant(0.0);
  }
  if (identity_risk < r.r_sep) {
    r.r_sep = identity_risk;
    r.optimal_map = PR1Map::identity();
  }
  r.map_risk = map_risk(r.optimal_map, mu, tau);
  return r;
}

TauSep tau_sep(const std::function<double(double)>& risk, double second_moment, double sigma, double delta,
               double rel_tol) {
  require(sigma >= 0.0 && delta > 0.0, Errc::InvalidArgument, "tau_sep needs sigma >= 0 and delta > 0");
  TauSep out;
  const double s2 = sigma * sigma;
  auto h = [&](double t) {
    ++out.probes;
    return risk(std::sqrt(t)) - delta * (t - s2);
  };
  double lo = std::max(s2, 1e-10 * (1.0 + second_moment / delta));
  double hi = s2 + second_moment / delta + 1.0;
  double hlo = h(lo);
  if (hlo <= 0.0) {
    out.tau2 = s2;
  } else {
    double hhi = h(hi);
    if (hhi > 0.0) {
      std::ostringstream os;
      os << "defining inequality does not flip on [" << lo << ", " << hi << "]: h(lo) = " << hlo
         << ", h(hi) = " << hhi;
      fail(Errc::BracketFailure, os.str());
    }
    while (hi - lo > rel_tol * hi) {
      double mid = 0.5 * (lo + hi);
      (h(mid) > 0.0 ? lo : hi) = mid;
    }
    out.tau2 = 0.5 * (lo + hi);
  }
  out.tau = std::sqrt(out.tau2);
  out.risk_bound = delta * (out.tau2 - s2);
  return out;
}

TauSep tau_sep(const EmpiricalMeasure1D& mu, double sigma, double delta, std::size_t m, const RiskOptions& opt) {
  return tau_sep([&](double tau) { return optimal_separable_risk(mu, tau, m, opt).r_sep; }, mu.second_moment(),
                 sigma, delta);
}

}  // namespace symprox
