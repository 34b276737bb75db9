#include "symprox/penalties.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "symprox/errors.hpp"
#include "symprox/rng.hpp"

namespace symprox {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double a : v) s += a * a;
  return std::sqrt(s);
}

double norm1(const std::vector<double>& v) {
  double s = 0.0;
  for (double a : v) s += std::abs(a);
  return s;
}

// Indices ordering |v| decreasing; ties keep index order.
std::vector<std::size_t> abs_order(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto i, auto j) { return std::abs(v[i]) > std::abs(v[j]); });
  return idx;
}

struct Block {
  double num;
  double den;
  std::size_t len;
  double value() const { return num / den; }
};

// Pool adjacent violators for a nonincreasing sequence of ratios num/den.
std::vector<Block> pav_nonincreasing(const std::vector<double>& num, const std::vector<double>& den) {
  std::vector<Block> st;
  st.reserve(num.size());
  for (std::size_t j = 0; j < num.size(); ++j) {
    st.push_back({num[j], den[j], 1});
    while (st.size() >= 2 && st[st.size() - 2].value() < st.back().value()) {
      Block top = st.back();
      st.pop_back();
      st.back().num += top.num;
      st.back().den += top.den;
      st.back().len += top.len;
    }
  }
  return st;
}

std::vector<double> positive_profile(const WeightProfile& w, std::size_t p, bool strict) {
  auto lam = w.materialize(p);
  for (double l : lam) {
    require(strict ? l > 0.0 : l >= 0.0, Errc::InvalidArgument,
            strict ? "smoothed OWL weights must be positive" : "SLOPE weights must be nonnegative");
  }
  return lam;
}

std::vector<double> slope_prox(const std::vector<double>& y, const std::vector<double>& lam, double s) {
  std::size_t p = y.size();
  auto ord = abs_order(y);
  std::vector<double> num(p), den(p, 1.0);
  for (std::size_t j = 0; j < p; ++j) num[j] = std::abs(y[ord[j]]) - s * lam[j];
  auto blocks = pav_nonincreasing(num, den);
  std::vector<double> x(p, 0.0);
  std::size_t j = 0;
  for (const auto& b : blocks) {
    double v = std::max(0.0, b.value());
    for (std::size_t k = 0; k < b.len; ++k, ++j) x[ord[j]] = std::copysign(v, y[ord[j]]);
  }
  return x;
}

// eta on sorted positions for the smoothed OWL variational form.
std::vector<double> sowl_eta(const std::vector<double>& v, const std::vector<std::size_t>& ord,
                             const std::vector<double>& lam) {
  std::size_t p = v.size();
  std::vector<double> num(p);
  for (std::size_t j = 0; j < p; ++j) num[j] = v[ord[j]] * v[ord[j]];
  auto blocks = pav_nonincreasing(num, lam);
  std::vector<double> u(p);
  std::size_t j = 0;
  for (const auto& b : blocks) {
    double val = std::sqrt(b.value());
    for (std::size_t k = 0; k < b.len; ++k) u[j++] = val;
  }
  return u;
}

std::vector<double> sowl_prox_exact(const std::vector<double>& y, const std::vector<double>& lam, double s) {
  auto ord = abs_order(y);
  auto u = sowl_eta(y, ord, lam);
  std::vector<double> x(y.size(), 0.0);
  for (std::size_t j = 0; j < y.size(); ++j) {
    std::size_t i = ord[j];
    if (u[j] > s) x[i] = y[i] * (1.0 - s / u[j]);
  }
  return x;
}

std::vector<double> sowl_prox_alternating(const PenaltySpec& f, const std::vector<double>& y,
                                          const std::vector<double>& lam, double s, const ProxOptions& opt) {
  std::size_t p = y.size();
  std::vector<double> x = y, xn(p), eta(p);
  double change = 0.0;
  for (long it = 1; it <= opt.max_iters; ++it) {
    auto ord = abs_order(x);
    auto u = sowl_eta(x, ord, lam);
    for (std::size_t j = 0; j < p; ++j) eta[ord[j]] = u[j];
    change = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      xn[i] = eta[i] > 0.0 ? y[i] * eta[i] / (eta[i] + s) : 0.0;
      change = std::max(change, std::abs(xn[i] - x[i]));
    }
    x.swap(xn);
    if (change <= 1e-3 * opt.tol && (it % 10 == 0 || change == 0.0)) {
      if (kkt_residual(f, y, x, 50, static_cast<std::uint64_t>(it)) <= opt.tol) return x;
    }
  }
  throw NoConvergence("smoothed OWL alternating prox", opt.max_iters, kkt_residual(f, y, x, 50, 0));
}

std::vector<double> l2power_prox(const std::vector<double>& y, double alpha, double c) {
  double r = norm2(y);
  std::vector<double> x(y.size(), 0.0);
  if (r == 0.0) return x;
  double s;
  if (alpha == 1.0) {
    s = std::max(0.0, r - c);
  } else {
    // s + c alpha s^(alpha-1) = r, increasing in s on [0, r].
    double lo = 0.0, hi = r;
    for (int it = 0; it < 300 && hi - lo > 1e-16 * r; ++it) {
      double mid = 0.5 * (lo + hi);
      if (mid + c * alpha * std::pow(mid, alpha - 1.0) < r)
        lo = mid;
      else
        hi = mid;
    }
    s = 0.5 * (lo + hi);
  }
  for (std::size_t i = 0; i < y.size(); ++i) x[i] = y[i] * (s / r);
  return x;
}

double soft_sum(const std::vector<double>& y, double t) {
  double s = 0.0;
  for (double v : y) s += std::max(std::abs(v) - t, 0.0);
  return s;
}

std::vector<double> l1power_prox(const std::vector<double>& y, double alpha, double c) {
  double t;
  if (alpha == 1.0) {
    t = c;
  } else {
    double lo = 0.0, hi = 0.0;
    for (double v : y) hi = std::max(hi, std::abs(v));
    if (hi == 0.0) return std::vector<double>(y.size(), 0.0);
    double top = hi;
    for (int it = 0; it < 300 && hi - lo > 1e-16 * top; ++it) {
      double mid = 0.5 * (lo + hi);
      if (mid < c * alpha * std::pow(soft_sum(y, mid), alpha - 1.0))
        lo = mid;
      else
        hi = mid;
    }
    t = 0.5 * (lo + hi);
  }
  std::vector<double> x(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) x[i] = std::copysign(std::max(std::abs(y[i]) - t, 0.0), y[i]);
  return x;
}

}  // namespace

std::vector<double> WeightProfile::materialize(std::size_t p) const {
  require(!steps.empty(), Errc::InvalidArgument, "weight profile is empty");
  std::vector<double> w(p);
  std::size_t k = 0;
  for (std::size_t j = 0; j < p; ++j) {
    double t = (static_cast<double>(j) + 0.5) / static_cast<double>(p);
    while (k + 1 < steps.size() && t > steps[k].first) ++k;
    w[j] = steps[k].second;
  }
  return w;
}

WeightProfile WeightProfile::from_weights(const std::vector<double>& w) {
  WeightProfile prof;
  double p = static_cast<double>(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) prof.steps.emplace_back(static_cast<double>(j + 1) / p, w[j]);
  prof.steps.back().first = 1.0;
  return prof;
}

PenaltySpec PenaltySpec::scaled(double s) const {
  PenaltySpec out = *this;
  out.scale *= s;
  return out;
}

std::string PenaltySpec::name() const {
  return std::visit(overloaded{[](const Separable& s) -> std::string {
                                 return std::visit(overloaded{[](const AbsWeight&) { return "separable-abs"; },
                                                              [](const Quadratic&) { return "separable-quadratic"; },
                                                              [](const TabulatedProx&) { return "separable-tabulated"; }},
                                                   s.scalar);
                               },
                               [](const Slope&) -> std::string { return "slope"; },
                               [](const SmoothedOwl&) -> std::string { return "sowl"; },
                               [](const L2Power&) -> std::string { return "l2power"; },
                               [](const L1Power&) -> std::string { return "l1power"; }},
                    family);
}

bool PenaltySpec::evaluable() const {
  if (auto* s = std::get_if<Separable>(&family)) return !std::holds_alternative<TabulatedProx>(s->scalar);
  return true;
}

void PenaltySpec::validate() const {
  require(scale >= 0.0 && std::isfinite(scale), Errc::InvalidArgument, "penalty scale must be finite and >= 0");
  auto check_profile = [](const WeightProfile& w, bool strict) {
    require(!w.steps.empty(), Errc::InvalidArgument, "weight profile is empty");
    double prev_t = 0.0, prev_v = INFINITY;
    for (const auto& [t, v] : w.steps) {
      require(t > prev_t && t <= 1.0 + 1e-12, Errc::InvalidArgument,
              "profile breakpoints must be increasing in (0,1]");
      require(std::isfinite(v) && (strict ? v > 0.0 : v >= 0.0), Errc::InvalidArgument,
              strict ? "smoothed OWL weights must be positive" : "SLOPE weights must be nonnegative");
      require(v <= prev_v, Errc::InvalidArgument, "profile weights must be nonincreasing");
      prev_t = t;
      prev_v = v;
    }
    require(w.steps.back().first >= 1.0 - 1e-12, Errc::InvalidArgument, "profile must extend to t = 1");
  };
  std::visit(overloaded{[](const Separable& s) {
                          std::visit(overloaded{[](const AbsWeight& a) {
                                                  require(a.xi >= 0.0 && std::isfinite(a.xi), Errc::InvalidArgument,
                                                          "abs weight must be >= 0");
                                                },
                                                [](const Quadratic& q) {
                                                  require(q.c >= 0.0 && std::isfinite(q.c), Errc::InvalidArgument,
                                                          "quadratic coefficient must be >= 0");
                                                },
                                                [](const TabulatedProx& t) {
                                                  require(validate_pr1(t.map).empty(), Errc::InvalidArgument,
                                                          "tabulated prox is not in PR1");
                                                }},
                                     s.scalar);
                        },
                        [&](const Slope& s) { check_profile(s.profile, false); },
                        [&](const SmoothedOwl& s) { check_profile(s.profile, true); },
                        [](const L2Power& l) {
                          require(l.alpha >= 1.0 && std::isfinite(l.alpha), Errc::InvalidArgument, "alpha must be >= 1");
                        },
                        [](const L1Power& l) {
                          require(l.alpha >= 1.0 && std::isfinite(l.alpha), Errc::InvalidArgument, "alpha must be >= 1");
                        }},
             family);
}

PR1Map separable_prox_map(const PenaltySpec& f) {
  const auto* sep = std::get_if<Separable>(&f.family);
  require(sep != nullptr, Errc::InvalidArgument, "separable_prox_map needs a separable penalty");
  double s = f.scale;
  return std::visit(overloaded{[&](const AbsWeight& a) {
                                 double t = s * a.xi;
                                 if (t == 0.0) return PR1Map::identity();
                                 return PR1Map{{-t, t}, {0.0, 0.0}, 1.0, 1.0};
                               },
                               [&](const Quadratic& q) {
                                 double k = 1.0 / (1.0 + 2.0 * s * q.c);
                                 return PR1Map{{0.0}, {0.0}, k, k};
                               },
                               [&](const TabulatedProx& t) {
                                 if (s == 0.0) return PR1Map::identity();
                                 return s == 1.0 ? t.map : rescale_prox(t.map, s);
                               }},
                    sep->scalar);
}

double evaluate(const PenaltySpec& f, const std::vector<double>& x) {
  const double s = f.scale;
  const std::size_t p = x.size();
  require(p >= 1, Errc::InvalidArgument, "penalty dimension must be >= 1");
  const double pd = static_cast<double>(p);
  return std::visit(
      overloaded{[&](const Separable& sep) {
                   return std::visit(overloaded{[&](const AbsWeight& a) { return s * a.xi * norm1(x); },
                                                [&](const Quadratic& q) {
                                                  double n = norm2(x);
                                                  return s * q.c * n * n;
                                                },
                                                [&](const TabulatedProx&) -> double {
                                                  fail(Errc::Unevaluable, "tabulated prox penalties have no value");
                                                }},
                                     sep.scalar);
                 },
                 [&](const Slope& sl) {
                   auto lam = positive_profile(sl.profile, p, false);
                   auto ord = abs_order(x);
                   double v = 0.0;
                   for (std::size_t j = 0; j < p; ++j) v += lam[j] * std::abs(x[ord[j]]);
                   return s * v;
                 },
                 [&](const SmoothedOwl& so) {
                   auto lam = positive_profile(so.profile, p, true);
                   auto ord = abs_order(x);
                   std::vector<double> num(p);
                   for (std::size_t j = 0; j < p; ++j) num[j] = x[ord[j]] * x[ord[j]];
                   double v = 0.0;
                   for (const auto& b : pav_nonincreasing(num, lam)) v += std::sqrt(b.num * b.den);
                   return s * v;
                 },
                 [&](const L2Power& l) { return s * std::pow(pd, 1.0 - 0.5 * l.alpha) * std::pow(norm2(x), l.alpha); },
                 [&](const L1Power& l) { return s * std::pow(pd, 1.0 - l.alpha) * std::pow(norm1(x), l.alpha); }},
      f.family);
}

std::vector<double> prox(const PenaltySpec& f, const std::vector<double>& y, const ProxOptions& opt) {
  require(opt.tol > 0.0, Errc::InvalidArgument, "prox tolerance must be positive");
  for (double v : y) require(std::isfinite(v), Errc::InvalidArgument, "prox input must be finite");
  const std::size_t p = y.size();
  const double s = f.scale;
  if (p == 0) return {};
  if (s == 0.0) return y;
  const double pd = static_cast<double>(p);
  return std::visit(overloaded{[&](const Separable&) {
                                 auto m = separable_prox_map(f);
                                 return m(y);
                               },
                               [&](const Slope& sl) { return slope_prox(y, positive_profile(sl.profile, p, false), s); },
                               [&](const SmoothedOwl& so) {
                                 auto lam = positive_profile(so.profile, p, true);
                                 if (opt.sowl == SowlMethod::Alternating) return sowl_prox_alternating(f, y, lam, s, opt);
                                 return sowl_prox_exact(y, lam, s);
                               },
                               [&](const L2Power& l) {
                                 return l2power_prox(y, l.alpha, s * std::pow(pd, 1.0 - 0.5 * l.alpha));
                               },
                               [&](const L1Power& l) { return l1power_prox(y, l.alpha, s * std::pow(pd, 1.0 - l.alpha)); }},
                    f.family);
}

double kkt_residual(const PenaltySpec& f, const std::vector<double>& y, const std::vector<double>& x,
                    std::size_t n_probes, std::uint64_t seed) {
  require(y.size() == x.size(), Errc::SizeMismatch, "kkt_residual needs equal-length y and x");
  require(n_probes >= 1, Errc::InvalidArgument, "kkt_residual needs at least one probe");
  const std::size_t p = x.size();
  std::vector<double> g(p);
  for (std::size_t i = 0; i < p; ++i) g[i] = y[i] - x[i];
  const double fx = evaluate(f, x);
  const double nx = norm2(x);
  Rng rng(seed, 0x6b6b74);
  double worst = 0.0;
  std::vector<double> xp(p);

  auto probe = [&](const std::vector<double>& cand) {
    double inner = 0.0, dist = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      double d = cand[i] - x[i];
      inner += g[i] * d;
      dist += d * d;
    }
    double excess = fx + inner - evaluate(f, cand);
    worst = std::max(worst, std::max(0.0, excess) / (1.0 + std::sqrt(dist)));
  };

  const double scales[3] = {0.01, 0.1, 1.0};
  for (std::size_t k = 0; k < n_probes; ++k) {
    switch (k) {
      case 0: xp = x; break;
      case 1: xp = y; break;
      case 2: std::fill(xp.begin(), xp.end(), 0.0); break;
      case 3:
        for (std::size_t i = 0; i < p; ++i) xp[i] = -x[i];
        break;
      case 4:
        for (std::size_t i = 0; i < p; ++i) xp[i] = x[p - 1 - i];
        break;
      default: {
        std::size_t kind = (k - 5) % 5;
        if (kind == 0) {
          for (std::size_t i = 0; i < p; ++i) xp[i] = rng.uniform() < 0.5 ? -x[i] : x[i];
        } else if (kind == 1) {
          auto perm = rng.permutation(p);
          for (std::size_t i = 0; i < p; ++i) xp[i] = x[perm[i]];
        } else {
          double sd = scales[kind - 2] * (1.0 + nx) / std::sqrt(static_cast<double>(p));
          for (std::size_t i = 0; i < p; ++i) xp[i] = x[i] + sd * rng.normal();
        }
      }
    }
    probe(xp);
  }
  return worst;
}

}  // namespace symprox
