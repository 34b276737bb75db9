#include "symprox/pr1_map.hpp"

#include <algorithm>
#include <cmath>

#include "symprox/errors.hpp"

namespace symprox {

double apply(const PR1Map& m, double v) {
  if (m.y.empty()) return v;
  if (v <= m.y.front()) return m.x.front() + m.slope_left * (v - m.y.front());
  if (v >= m.y.back()) return m.x.back() + m.slope_right * (v - m.y.back());
  auto it = std::upper_bound(m.y.begin(), m.y.end(), v);
  std::size_t i = static_cast<std::size_t>(it - m.y.begin());
  double y0 = m.y[i - 1], y1 = m.y[i], x0 = m.x[i - 1], x1 = m.x[i];
  double w = (v - y0) / (y1 - y0);
  return x0 + w * (x1 - x0);
}

double PR1Map::operator()(double v) const { return apply(*this, v); }

std::vector<double> PR1Map::operator()(const std::vector<double>& v) const {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = apply(*this, v[i]);
  return out;
}

double PR1Map::max_segment_slope() const {
  double s = std::max(slope_left, slope_right);
  for (std::size_t i = 0; i + 1 < y.size(); ++i) s = std::max(s, (x[i + 1] - x[i]) / (y[i + 1] - y[i]));
  return s;
}

PR1Map PR1Map::identity() { return PR1Map{{0.0}, {0.0}, 1.0, 1.0}; }
PR1Map PR1Map::constant(double c) { return PR1Map{{0.0}, {c}, 0.0, 0.0}; }

const char* violation_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::Shape: return "Shape";
    case ViolationKind::Ordering: return "Ordering";
    case ViolationKind::Monotonicity: return "Monotonicity";
    case ViolationKind::Lipschitz: return "Lipschitz";
    case ViolationKind::ExtensionSlope: return "ExtensionSlope";
  }
  return "Unknown";
}

std::vector<Violation> validate_pr1(const PR1Map& m) {
  constexpr double tol = 1e-12;
  std::vector<Violation> out;
  if (m.y.empty() || m.y.size() != m.x.size()) {
    out.push_back({ViolationKind::Shape, -1, 0.0});
    return out;
  }
  for (std::size_t i = 0; i < m.y.size(); ++i) {
    if (!std::isfinite(m.y[i]) || !std::isfinite(m.x[i])) out.push_back({ViolationKind::Shape, long(i), 0.0});
  }
  for (std::size_t i = 0; i + 1 < m.y.size(); ++i) {
    double dy = m.y[i + 1] - m.y[i], dx = m.x[i + 1] - m.x[i];
    if (!(dy > 0.0)) {
      out.push_back({ViolationKind::Ordering, long(i), -dy});
      continue;
    }
    if (dx < -tol)
      out.push_back({ViolationKind::Monotonicity, long(i), -dx / dy});
    else if (dx > dy + tol)
      out.push_back({ViolationKind::Lipschitz, long(i), dx / dy - 1.0});
  }
  auto check_ext = [&](double s, long seg) {
    if (!(s >= 0.0 && s <= 1.0)) out.push_back({ViolationKind::ExtensionSlope, seg, s < 0.0 ? -s : s - 1.0});
  };
  check_ext(m.slope_left, -1);
  check_ext(m.slope_right, long(m.y.size()) - 1);
  return out;
}

PR1Map pr1_from_nodes(const std::vector<double>& y, const std::vector<double>& x) {
  require(y.size() == x.size(), Errc::SizeMismatch, "node vectors differ in length");
  require(!y.empty(), Errc::InvalidArgument, "need at least one node");
  PR1Map m;
  std::vector<double> cnt;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (i > 0) require(y[i] >= y[i - 1], Errc::InvalidGrid, "node y values must be nondecreasing");
    if (!m.y.empty() && y[i] - m.y.back() <= 1e-12) {
      m.x.back() += x[i];
      cnt.back() += 1.0;
    } else {
      m.y.push_back(y[i]);
      m.x.push_back(x[i]);
      cnt.push_back(1.0);
    }
  }
  for (std::size_t i = 0; i < m.x.size(); ++i) m.x[i] /= cnt[i];
  std::vector<double> slopes(m.y.size() > 1 ? m.y.size() - 1 : 0);
  // Re-accumulate from the left, carrying only the clip corrections so that
  // an already valid map is returned bit for bit.
  double offset = 0.0;
  std::vector<double> fixed(m.x);
  for (std::size_t i = 0; i + 1 < m.y.size(); ++i) {
    double dy = m.y[i + 1] - m.y[i], dx = m.x[i + 1] - m.x[i];
    double s = dx / dy;
    slopes[i] = std::clamp(s, 0.0, 1.0);
    if (slopes[i] != s) offset += slopes[i] * dy - dx;
    fixed[i + 1] = m.x[i + 1] + offset;
  }
  m.x = std::move(fixed);
  if (slopes.empty()) {
    m.slope_left = m.slope_right = 0.0;
  } else {
    m.slope_left = slopes.front();
    m.slope_right = slopes.back();
  }
  return m;
}

PR1Map rescale_prox(const PR1Map& T, double s) {
  require(s > 0.0 && std::isfinite(s), Errc::InvalidArgument, "prox rescaling needs s > 0");
  PR1Map out;
  out.y.resize(T.y.size());
  out.x = T.x;
  for (std::size_t i = 0; i < T.y.size(); ++i) out.y[i] = (1.0 - s) * T.x[i] + s * T.y[i];
  auto ext = [s](double sl) { return sl / ((1.0 - s) * sl + s); };
  out.slope_left = ext(T.slope_left);
  out.slope_right = ext(T.slope_right);
  return out;
}

}  // namespace symprox
