#include "symprox/adaptivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "symprox/assignment.hpp"
#include "symprox/errors.hpp"
#include "symprox/pr1_map.hpp"

namespace symprox {

CmResult support_cyclically_monotone(const JointSample2D& pi, double tol) {
  const auto& pts = pi.pairs();
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pts[a].u < pts[b].u || (pts[a].u == pts[b].u && pts[a].v < pts[b].v);
  });
  auto close = [&](double a, double b) { return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)}); };
  CmResult r;
  bool have_prev = false;
  std::size_t best = 0;  // index of the largest g among strictly smaller x
  std::size_t k = 0;
  while (k < order.size()) {
    std::size_t end = k + 1;
    while (end < order.size() && close(pts[order[end]].u, pts[order[end - 1]].u)) ++end;
    std::size_t low = order[k], top = order[k];
    for (std::size_t i = k; i < end; ++i) {
      if (pts[order[i]].v < pts[low].v) low = order[i];
      if (pts[order[i]].v > pts[top].v) top = order[i];
    }
    if (have_prev && pts[low].v < pts[best].v && !close(pts[low].v, pts[best].v)) {
      r.monotone = false;
      r.witness = CmWitness{best, low, pts[best], pts[low]};
      return r;
    }
    if (!have_prev || pts[top].v > pts[best].v) best = top;
    have_prev = true;
    k = end;
  }
  return r;
}

namespace {

double rearrangement_sup(std::vector<double> x, std::vector<double> g) {
  std::sort(x.begin(), x.end());
  std::sort(g.begin(), g.end());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * g[i];
  return s / static_cast<double>(x.size());
}

TupleMargin evaluate_cycle(const std::vector<JointSample2D>& fam, const std::vector<std::size_t>& cyc, double tol) {
  const std::size_t n = cyc.size(), m = fam[cyc[0]].size();
  const double md = static_cast<double>(m);
  auto X = [&](std::size_t k, std::size_t a) { return fam[cyc[k]].pairs()[a].u; };
  auto G = [&](std::size_t k, std::size_t a) { return fam[cyc[k]].pairs()[a].v; };

  TupleMargin t;
  t.members = cyc;
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    std::vector<double> xs(m), gs(m);
    for (std::size_t a = 0; a < m; ++a) {
      s += X(k, a) * G(k, a);
      xs[a] = X(k, a);
      gs[a] = G((k + 1) % n, a);
    }
    t.diagonal += s / md;
    t.upper += rearrangement_sup(xs, gs);
  }

  // at[a] is the atom of member k matched to atom a of member 0.
  std::vector<std::size_t> at(m);
  std::iota(at.begin(), at.end(), 0);
  double total = 0.0;
  std::vector<double> value(m * m);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const bool closing = k + 2 == n;
    std::vector<std::size_t> origin(m);
    for (std::size_t a = 0; a < m; ++a) origin[at[a]] = a;
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) {
        double v = X(k, a) * G(k + 1, b);
        if (closing) v += X(k + 1, b) * G(0, origin[a]);
        value[a * m + b] = v;
      }
    auto r = solve_assignment_max(value, m);
    total += r.cost;
    for (std::size_t a = 0; a < m; ++a) at[a] = r.col_of_row[at[a]];
  }
  t.achieved = total / md;
  t.exact = n == 2;
  t.margin = t.diagonal - t.achieved;
  const double slack = tol * std::max(1.0, std::abs(t.diagonal));
  t.violated = t.achieved > t.diagonal + slack;
  t.certified = t.upper <= t.diagonal + slack;
  return t;
}

void enumerate_cycles(std::size_t family, std::size_t len, std::vector<std::size_t>& cur, std::vector<bool>& used,
                      std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == len) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = cur[0] + 1; i < family; ++i) {
    if (used[i]) continue;
    used[i] = true;
    cur.push_back(i);
    enumerate_cycles(family, len, cur, used, out);
    cur.pop_back();
    used[i] = false;
  }
}

std::size_t cycle_count(std::size_t f, int max_cycle) {
  double total = 0.0;
  for (int n = 2; n <= max_cycle; ++n) {
    double c = 1.0;
    for (int i = 0; i < n; ++i) c *= static_cast<double>(f > static_cast<std::size_t>(i) ? f - i : 0);
    total += c / static_cast<double>(n);
  }
  return static_cast<std::size_t>(std::min(total, 1e18));
}

}  // namespace

JointCmReport joint_cm_check(const std::vector<JointSample2D>& family, int max_cycle, double tol) {
  require(max_cycle >= 2 && max_cycle <= 4, Errc::InvalidArgument, "max_cycle must lie in [2, 4]");
  require(!family.empty(), Errc::InvalidArgument, "joint_cm_check needs a nonempty family");
  const std::size_t m = family[0].size();
  for (const auto& pi : family) {
    require(pi.size() >= 1, Errc::InvalidArgument, "couplings need at least one atom");
    require(pi.size() == m, Errc::SizeMismatch, "couplings must share one atom count");
    require(pi.equal_weights(), Errc::InvalidArgument, "couplings must have equal weights");
  }
  require(m <= kJointCmAtomCap, Errc::TooLarge,
          "atom count " + std::to_string(m) + " exceeds cap " + std::to_string(kJointCmAtomCap));
  require(cycle_count(family.size(), max_cycle) <= kJointCmTupleCap, Errc::TooLarge,
          "cycle count exceeds cap " + std::to_string(kJointCmTupleCap));

  JointCmReport rep;
  for (std::size_t i = 0; i < family.size(); ++i) {
    rep.individual.push_back(support_cyclically_monotone(family[i], tol));
    if (!rep.individual.back().monotone) rep.failing_members.push_back(i);
  }
  std::vector<std::vector<std::size_t>> cycles;
  for (int len = 2; len <= max_cycle; ++len) {
    std::vector<bool> used(family.size(), false);
    for (std::size_t s = 0; s < family.size(); ++s) {
      std::vector<std::size_t> cur{s};
      used.assign(family.size(), false);
      used[s] = true;
      enumerate_cycles(family.size(), static_cast<std::size_t>(len), cur, used, cycles);
    }
  }
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (const auto& c : cycles) {
    rep.tuples.push_back(evaluate_cycle(family, c, tol));
    if (rep.tuples.back().violated) ++rep.violations;
    rep.min_margin = std::min(rep.min_margin, rep.tuples.back().margin);
  }
  if (cycles.empty()) rep.min_margin = 0.0;
  rep.passed = rep.failing_members.empty() && rep.violations == 0;
  return rep;
}

bool is_pr1(std::vector<std::pair<double, double>> samples) {
  require(!samples.empty(), Errc::InvalidArgument, "is_pr1 needs samples");
  std::sort(samples.begin(), samples.end());
  PR1Map map;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    require(i == 0 || samples[i].first > samples[i - 1].first, Errc::InvalidArgument, "is_pr1 needs distinct y");
    map.y.push_back(samples[i].first);
    map.x.push_back(samples[i].second);
  }
  if (map.size() == 1) {
    map.slope_left = map.slope_right = 0.0;
  } else {
    std::size_t e = map.size() - 1;
    map.slope_left = (map.x[1] - map.x[0]) / (map.y[1] - map.y[0]);
    map.slope_right = (map.x[e] - map.x[e - 1]) / (map.y[e] - map.y[e - 1]);
  }
  return validate_pr1(map).empty();
}

}  // namespace symprox
