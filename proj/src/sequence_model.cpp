#include "symprox/sequence_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "symprox/errors.hpp"
#include "symprox/normal.hpp"
#include "symprox/parallel.hpp"
#include "symprox/rng.hpp"
#include "symprox/scalar_rep.hpp"

namespace symprox {

namespace {

constexpr std::uint64_t kScatterStream = 0x5ca77e5ULL << 20;

std::vector<std::pair<double, double>> subsample_pairs(const std::vector<double>& y, const std::vector<double>& x,
                                                       std::size_t k, std::uint64_t seed) {
  Rng rng(seed, kScatterStream);
  std::vector<std::pair<double, double>> out;
  for (auto j : rng.subsample(y.size(), std::min(k, y.size()))) out.emplace_back(y[j], x[j]);
  return out;
}

double quantile_sorted(const std::vector<double>& s, double q) {
  double h = q * static_cast<double>(s.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

}  // namespace

ThetaSpec ThetaSpec::explicit_values(std::vector<double> v) {
  ThetaSpec t;
  t.kind = Kind::Values;
  t.values = std::move(v);
  t.p = t.values.size();
  return t;
}

ThetaSpec ThetaSpec::from_prior(EmpiricalMeasure1D mu, std::size_t p) {
  ThetaSpec t;
  t.kind = Kind::Prior;
  t.prior = std::move(mu);
  t.p = p;
  return t;
}

ThetaSpec ThetaSpec::gaussian_quantiles(std::size_t p) {
  ThetaSpec t;
  t.kind = Kind::GaussianQuantiles;
  t.p = p;
  return t;
}

std::size_t ThetaSpec::dimension() const { return kind == Kind::Values ? values.size() : p; }

std::vector<double> ThetaSpec::materialize() const {
  require(dimension() >= 1, Errc::InvalidArgument, "theta dimension must be >= 1");
  switch (kind) {
    case Kind::Values: return values;
    case Kind::Prior: return prior.materialize(p);
    case Kind::GaussianQuantiles: {
      std::vector<double> v(p);
      for (std::size_t j = 0; j < p; ++j) v[j] = norm_quantile(static_cast<double>(j + 1) / static_cast<double>(p + 1));
      return v;
    }
  }
  return {};
}

EmpiricalMeasure1D ThetaSpec::population() const {
  if (kind == Kind::Prior) return prior;
  return EmpiricalMeasure1D::uniform(materialize());
}

void SequenceConfig::validate() const {
  require(theta.dimension() >= 1, Errc::InvalidArgument, "p must be >= 1");
  require(tau >= 0.0 && std::isfinite(tau), Errc::InvalidArgument, "tau must be finite and >= 0");
  require(trials >= 1, Errc::InvalidArgument, "trials must be >= 1");
  require(grid_size >= 16, Errc::InvalidArgument, "grid_size must be >= 16");
  penalty.validate();
}

Summary summarize(std::vector<double> v) {
  Summary s;
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  double total = 0.0;
  for (double x : v) total += x;
  s.mean = total / static_cast<double>(v.size());
  s.median = quantile_sorted(v, 0.5);
  s.q10 = quantile_sorted(v, 0.1);
  s.q90 = quantile_sorted(v, 0.9);
  s.max = v.back();
  return s;
}

std::vector<double> simulate_y(const std::vector<double>& theta, double tau, std::uint64_t seed, std::uint64_t stream) {
  require(tau >= 0.0, Errc::InvalidArgument, "tau must be >= 0");
  if (tau == 0.0) return theta;
  Rng rng(seed, stream);
  std::vector<double> y(theta.size());
  for (std::size_t j = 0; j < y.size(); ++j) y[j] = theta[j] + tau * rng.normal();
  return y;
}

SeparabilityReport separability_experiment(const SequenceConfig& cfg) {
  cfg.validate();
  const auto theta = cfg.theta.materialize();
  const std::size_t p = theta.size();
  auto base = cfg.map_source == MapSource::Empirical ? EmpiricalMeasure1D::uniform(theta) : cfg.theta.population();

  SeparabilityReport r;
  r.p = p;
  r.tau = cfg.tau;
  r.grid = gaussian_convolve(base, cfg.tau, cfg.grid_size);
  r.map = effective_scalar_rep(cfg.penalty, r.grid, cfg.prox);
  if (cfg.tau > 0.0) {
    double ss = 0.0;
    for (double t : theta) ss += t * t;
    r.snr = ss / (static_cast<double>(p) * cfg.tau * cfg.tau);
  }
  const auto grid_emp = r.grid.to_empirical();
  r.gaps.assign(cfg.trials, 0.0);
  r.w2.assign(cfg.trials, 0.0);
  std::vector<double> y0, x0;
  parallel_for(cfg.trials, [&](std::size_t t) {
    auto y = simulate_y(theta, cfg.tau, cfg.seed, t);
    std::vector<double> x;
    try {
      x = prox(cfg.penalty, y, cfg.prox);
    } catch (const NoConvergence& e) {
      throw NoConvergence("trial " + std::to_string(t) + ": " + e.where(), e.iterations(), e.residual());
    }
    double gap = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      double d = x[j] - r.map(y[j]);
      gap += d * d;
    }
    r.gaps[t] = gap / static_cast<double>(p);
    r.w2[t] = w2_1d(EmpiricalMeasure1D::uniform(y), grid_emp);
    if (t == 0) {
      y0 = std::move(y);
      x0 = std::move(x);
    }
  });
  r.gap_summary = summarize(r.gaps);
  r.w2_summary = summarize(r.w2);
  r.scatter = subsample_pairs(y0, x0, cfg.scatter_points, cfg.seed);
  return r;
}

double zero_threshold(const PR1Map& map) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (map.y[i] >= 0.0 && std::abs(map.x[i]) <= 1e-12) best = std::max(best, map.y[i]);
  }
  return best;
}

PanelResult theory_panel(const ThetaSpec& theta, double tau, const PenaltySpec& f, std::size_t grid_size,
                         std::uint64_t seed, std::size_t scatter_points, const ProxOptions& opt) {
  auto th = theta.materialize();
  PanelResult r;
  r.theory = effective_scalar_rep(f, gaussian_convolve(EmpiricalMeasure1D::uniform(th), tau, grid_size), opt);
  auto y = simulate_y(th, tau, seed, 0);
  auto x = prox(f, y, opt);
  r.scatter = subsample_pairs(y, x, scatter_points, seed);
  r.zero_threshold = zero_threshold(r.theory);
  return r;
}

}  // namespace symprox
