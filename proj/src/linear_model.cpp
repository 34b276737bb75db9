#include "symprox/linear_model.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "symprox/errors.hpp"
#include "symprox/normal.hpp"
#include "symprox/parallel.hpp"
#include "symprox/rng.hpp"
#include "symprox/scalar_rep.hpp"

namespace symprox {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTailCut = 12.0;

std::vector<double> to_std(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Exact Gaussian integrals of a piecewise-linear map, one atom at a time.
SeMoments exact_atom(const PR1Map& A, double a, double tau) {
  const auto& y = A.y;
  const auto& x = A.x;
  const std::size_t m = y.size();
  double mse = 0.0, cross = 0.0;
  auto piece = [&](double ylo, double yhi, double x0, double y0, double s) {
    double l = (ylo - a) / tau, u = (yhi - a) / tau;
    if (u < -kTailCut || l > kTailCut) return;
    auto mom = trunc_moments(std::max(l, -kTailCut - 1.0), std::min(u, kTailCut + 1.0));
    double c0 = x0 + s * (a - y0), c1 = s * tau;
    double e = c0 - a;
    mse += e * e * mom.m0 + 2.0 * e * c1 * mom.m1 + c1 * c1 * mom.m2;
    cross += c0 * mom.m1 + c1 * mom.m2;
  };
  const double inf = std::numeric_limits<double>::infinity();
  piece(-inf, y[0], x[0], y[0], A.slope_left);
  auto first = std::lower_bound(y.begin(), y.end(), a - kTailCut * tau) - y.begin();
  auto last = std::upper_bound(y.begin(), y.end(), a + kTailCut * tau) - y.begin();
  std::size_t i0 = first > 0 ? static_cast<std::size_t>(first) - 1 : 0;
  std::size_t i1 = std::min(static_cast<std::size_t>(last), m - 1);
  for (std::size_t i = i0; i < i1; ++i) {
    double s = (x[i + 1] - x[i]) / (y[i + 1] - y[i]);
    piece(y[i], y[i + 1], x[i], y[i], s);
  }
  piece(y[m - 1], inf, x[m - 1], y[m - 1], A.slope_right);
  return {mse, cross};
}

double penalty_value_or_nan(const PenaltySpec& f, const std::vector<double>& x) {
  if (!f.evaluable()) return kNaN;
  return evaluate(f, x);
}

[[noreturn]] void no_solution(const std::string& what) { fail(Errc::NoSolution, what); }

}  // namespace

SeMoments map_moments(const PR1Map& A, const EmpiricalMeasure1D& mu, double tau, const SeOptions& opt) {
  require(tau > 0.0, Errc::InvalidArgument, "tau must be positive");
  SeMoments out{0.0, 0.0};
  if (opt.method == SeQuadrature::Exact) {
    for (std::size_t k = 0; k < mu.size(); ++k) {
      auto s = exact_atom(A, mu.atoms()[k], tau);
      out.mse += mu.weights()[k] * s.mse;
      out.cross += mu.weights()[k] * s.cross;
    }
    return out;
  }
  require(opt.gh_nodes >= 21, Errc::InvalidArgument, "Gauss-Hermite rule needs at least 21 nodes");
  auto rule = gauss_hermite(opt.gh_nodes);
  for (std::size_t k = 0; k < mu.size(); ++k) {
    double a = mu.atoms()[k], mse = 0.0, cross = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      double g = rule.nodes[j], v = A(a + tau * g);
      mse += rule.weights[j] * (v - a) * (v - a);
      cross += rule.weights[j] * g * v;
    }
    out.mse += mu.weights()[k] * mse;
    out.cross += mu.weights()[k] * cross;
  }
  return out;
}

SeMoments se_expectations(const PenaltySpec& penalty, const EmpiricalMeasure1D& mu, double tau, double lambda,
                          std::size_t m, const SeOptions& opt) {
  require(tau > 0.0 && lambda > 0.0, Errc::InvalidArgument, "se_expectations needs tau > 0 and lambda > 0");
  auto grid = gaussian_convolve(mu, tau, m);
  auto A = effective_scalar_rep(penalty.scaled(lambda), grid, opt.prox);
  return map_moments(A, mu, tau, opt);
}

std::size_t LinearConfig::n() const {
  return static_cast<std::size_t>(std::llround(delta * static_cast<double>(p())));
}

void LinearConfig::validate() const {
  require(delta > 0.0 && std::isfinite(delta), Errc::InvalidArgument, "delta must be positive");
  require(sigma > 0.0 && std::isfinite(sigma), Errc::InvalidArgument, "sigma must be positive");
  require(p() >= 1, Errc::InvalidArgument, "p must be >= 1");
  require(n() >= 1, Errc::InvalidArgument, "round(delta p) must be >= 1");
  require(grid_size >= 16, Errc::InvalidArgument, "grid_size must be >= 16");
  require(trials >= 1, Errc::InvalidArgument, "trials must be >= 1");
  require(damping > 0.0 && damping <= 1.0, Errc::InvalidArgument, "damping must lie in (0,1]");
  penalty.validate();
}

double solve_lambda(const EmpiricalMeasure1D& mu_theta, const GridMeasure& grid, double tau, double delta,
                    const PenaltySpec& penalty, const SeOptions& se) {
  auto phi = [&](double log_lambda) {
    double lam = std::exp(log_lambda);
    auto A = effective_scalar_rep(penalty.scaled(lam), grid, se.prox);
    auto mom = map_moments(A, mu_theta, tau, se);
    return lam * (1.0 - mom.cross / (delta * tau)) - delta;
  };
  double lo = -12.0, hi = 12.0;
  double flo = phi(lo), fhi = phi(hi);
  for (int widen = 0; widen < 2 && !(flo < 0.0 && fhi > 0.0); ++widen) {
    lo -= 12.0;
    hi += 12.0;
    flo = phi(lo);
    fhi = phi(hi);
  }
  if (!(flo < 0.0 && fhi > 0.0)) {
    std::ostringstream os;
    os << "lambda equation has no bracket at tau = " << tau << " (phi(e^" << lo << ") = " << flo << ", phi(e^" << hi
       << ") = " << fhi << ")";
    no_solution(os.str());
  }
  std::uintmax_t max_iter = 200;
  auto root = boost::math::tools::toms748_solve(phi, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(46),
                                                max_iter);
  return std::exp(0.5 * (root.first + root.second));
}

FixedPointSolution solve_fixed_point(const EmpiricalMeasure1D& mu, double delta, double sigma,
                                     const PenaltySpec& penalty, std::size_t m, const SeOptions& se, double tol,
                                     double damping, int max_outer) {
  require(delta > 0.0 && sigma > 0.0, Errc::InvalidArgument, "fixed point needs delta > 0 and sigma > 0");
  double tau2 = sigma * sigma + mu.second_moment() / delta;
  double last_step = 0.0;
  for (int k = 1; k <= max_outer; ++k) {
    double tau = std::sqrt(tau2);
    auto grid = gaussian_convolve(mu, tau, m);
    double lam = solve_lambda(mu, grid, tau, delta, penalty, se);
    auto A = effective_scalar_rep(penalty.scaled(lam), grid, se.prox);
    auto mom = map_moments(A, mu, tau, se);
    double target = sigma * sigma + mom.mse / delta;
    double next = (1.0 - damping) * tau2 + damping * target;
    last_step = std::abs(next - tau2);
    if (last_step <= tol * tau2) {
      FixedPointSolution s;
      s.tau_star = tau;
      s.lambda_star = lam;
      s.predicted_mse = delta * (tau2 - sigma * sigma);
      s.residual_tau = std::abs(tau2 - target);
      s.residual_lambda = std::abs(delta - lam * (1.0 - mom.cross / (delta * tau)));
      s.outer_iterations = k;
      s.map = A;
      s.gordon_value = 0.5 * std::pow(tau * delta / lam, 2) +
                       penalty_value_or_nan(penalty.scaled(1.0), A(grid.grid())) / static_cast<double>(m);
      return s;
    }
    tau2 = next;
  }
  std::ostringstream os;
  os << "outer iteration did not settle in " << max_outer << " steps (last |step| = " << last_step
     << ", tau^2 = " << tau2 << ")";
  no_solution(os.str());
}

FixedPointSolution solve_fixed_point(const LinearConfig& cfg) {
  cfg.validate();
  auto mu = EmpiricalMeasure1D::uniform(cfg.theta.materialize());
  return solve_fixed_point(mu, cfg.delta, cfg.sigma, cfg.penalty, cfg.grid_size, cfg.se, cfg.fp_tol, cfg.damping,
                           cfg.max_outer);
}

FitResult fit_penalized_ls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const PenaltySpec& penalty,
                           double lambda, double tol, long max_iters, const ProxOptions& prox_opt) {
  const auto n = X.rows(), p = X.cols();
  require(y.size() == n, Errc::SizeMismatch, "design rows and response length differ");
  require(lambda >= 0.0 && tol > 0.0, Errc::InvalidArgument, "fit needs lambda >= 0 and tol > 0");
  const double nd = static_cast<double>(n);
  const bool evaluable = penalty.evaluable();
  const PenaltySpec pen = penalty.scaled(lambda);

  // Lipschitz constant of the smooth part by power iteration.
  Eigen::VectorXd v = Eigen::VectorXd::Ones(p) / std::sqrt(static_cast<double>(p));
  double L = 0.0;
  for (int it = 0; it < 30; ++it) {
    Eigen::VectorXd w = X.transpose() * (X * v);
    double nw = w.norm();
    if (nw == 0.0) break;
    L = v.dot(w) / nd;
    v = w / nw;
  }
  if (L <= 0.0) L = 1.0;

  auto smooth = [&](const Eigen::VectorXd& b, Eigen::VectorXd* grad) {
    Eigen::VectorXd r = y - X * b;
    if (grad) *grad = -(X.transpose() * r) / nd;
    return 0.5 * r.squaredNorm() / nd;
  };
  auto objective = [&](const Eigen::VectorXd& b) {
    return smooth(b, nullptr) + (evaluable ? evaluate(pen, to_std(b)) : 0.0);
  };
  auto prox_step = [&](const Eigen::VectorXd& z, const Eigen::VectorXd& g, double step) {
    return to_eigen(prox(pen.scaled(step), to_std(z - step * g), prox_opt));
  };

  FitResult res;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p), z = b, g;
  double t = 1.0;
  double F = evaluable ? objective(b) : kNaN;
  res.trace.push_back(F);
  for (long it = 1; it <= max_iters; ++it) {
    double fz = smooth(z, &g);
    Eigen::VectorXd bn;
    // Backtracking guards against an underestimated L.
    for (;;) {
      bn = prox_step(z, g, 1.0 / L);
      Eigen::VectorXd d = bn - z;
      if (smooth(bn, nullptr) <= fz + g.dot(d) + 0.5 * L * d.squaredNorm() + 1e-15 * std::abs(fz)) break;
      L *= 2.0;
    }
    double Fn = evaluable ? objective(bn) : kNaN;
    bool restart = evaluable ? Fn > F : (z - bn).dot(bn - b) > 0.0;
    if (restart && t > 1.0) {
      // Reject the momentum step and retake a plain step from b.
      z = b;
      t = 1.0;
      ++res.restarts;
      continue;
    }
    double change = evaluable ? std::abs(F - Fn) / std::max(1.0, std::abs(Fn))
                              : (bn - b).norm() / (1.0 + bn.norm());
    double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = bn + ((t - 1.0) / tn) * (bn - b);
    b = bn;
    t = tn;
    F = evaluable ? std::min(F, Fn) : kNaN;
    res.trace.push_back(Fn);
    if (change <= tol) {
      Eigen::VectorXd gb;
      smooth(b, &gb);
      double fixed = (b - prox_step(b, gb, 1.0)).norm() / (1.0 + b.norm());
      if (fixed <= 10.0 * tol) {
        res.beta = b;
        res.iterations = it;
        res.objective = evaluable ? objective(b) : kNaN;
        return res;
      }
    }
  }
  Eigen::VectorXd gb;
  smooth(b, &gb);
  throw NoConvergence("fit_penalized_ls", max_iters, (b - prox_step(b, gb, 1.0)).norm() / (1.0 + b.norm()));
}

PenaltySpec separable_equivalent(const FixedPointSolution& fp) {
  return PenaltySpec{Separable{TabulatedProx{fp.map}}, 1.0 / fp.lambda_star};
}

LmReport lm_concentration_experiment(const LinearConfig& cfg, const FixedPointSolution& fp, bool keep_joints) {
  cfg.validate();
  const auto theta = cfg.theta.materialize();
  const std::size_t p = theta.size(), n = cfg.n();
  const Eigen::VectorXd th = to_eigen(theta);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  const std::size_t k = std::min(p, cfg.joint_subsample);
  const double target = fp.predicted_mse;

  LmReport rep;
  rep.fp = fp;
  rep.trials.resize(cfg.trials);
  if (keep_joints) rep.joints.resize(cfg.trials);
  std::vector<std::vector<Point2>> predicted(cfg.trials);
  parallel_for(cfg.trials, [&](std::size_t t) {
    Rng rng(cfg.seed, 1000 + t);
    Eigen::MatrixXd X(n, p);
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t i = 0; i < n; ++i) X(i, j) = rng.normal() * inv_sqrt_n;
    Eigen::VectorXd w(n);
    for (std::size_t i = 0; i < n; ++i) w(i) = cfg.sigma * rng.normal();
    Eigen::VectorXd y = X * th + w;
    FitResult fit;
    try {
      fit = fit_penalized_ls(X, y, cfg.penalty, 1.0 / static_cast<double>(p), cfg.fit_tol, cfg.fit_max_iters,
                             cfg.se.prox);
    } catch (const NoConvergence& e) {
      throw NoConvergence("trial " + std::to_string(t) + ": " + e.where(), e.iterations(), e.residual());
    }
    std::vector<Point2> emp(p), pred(p);
    Rng grng(cfg.seed, 2000 + t);
    double err = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      emp[j] = {fit.beta(j), theta[j]};
      pred[j] = {fp.map(theta[j] + fp.tau_star * grng.normal()), theta[j]};
      err += (fit.beta(j) - theta[j]) * (fit.beta(j) - theta[j]);
    }
    Rng srng(cfg.seed, 3000 + t);
    std::vector<Point2> se, sp;
    for (auto j : srng.subsample(p, k)) {
      se.push_back(emp[j]);
      sp.push_back(pred[j]);
    }
    auto& tr = rep.trials[t];
    tr.empirical_mse = err / static_cast<double>(p);
    tr.scalar_gap = std::abs(tr.empirical_mse - target);
    tr.w2 = w2_2d(JointSample2D(se), JointSample2D(sp));
    tr.iterations = fit.iterations;
    if (keep_joints) rep.joints[t] = std::move(emp);
    predicted[t] = std::move(pred);
  });
  std::vector<double> gaps, w2s;
  for (const auto& tr : rep.trials) {
    gaps.push_back(tr.scalar_gap);
    w2s.push_back(tr.w2);
  }
  rep.gap_summary = summarize(gaps);
  rep.w2_summary = summarize(w2s);
  rep.predicted = std::move(predicted[0]);
  return rep;
}

}  // namespace symprox
