#pragma once
// Test-side oracles. Nothing here calls the library's solvers.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace oracle {

inline double w2_2d_bruteforce(const std::vector<std::pair<double, double>>& a,
                               const std::vector<std::pair<double, double>>& b) {
  std::size_t n = a.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double du = a[i].first - b[perm[i]].first, dv = a[i].second - b[perm[i]].second;
      c += du * du + dv * dv;
    }
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::sqrt(best / static_cast<double>(n));
}

// Coarse-to-fine exhaustive search of a convex objective over a box in R^p, p <= 3.
inline std::vector<double> grid_minimize(const std::function<double(const std::vector<double>&)>& obj,
                                         std::size_t p, double half_width, double final_step = 1e-4) {
  std::vector<double> center(p, 0.0), best(p, 0.0), x(p);
  double step = half_width / 20.0;
  int radius = 20;
  for (;;) {
    double best_val = std::numeric_limits<double>::infinity();
    int n = 2 * radius + 1;
    long total = 1;
    for (std::size_t d = 0; d < p; ++d) total *= n;
    for (long code = 0; code < total; ++code) {
      long c = code;
      for (std::size_t d = 0; d < p; ++d) {
        x[d] = center[d] + step * static_cast<double>(c % n - radius);
        c /= n;
      }
      bool inside = std::all_of(x.begin(), x.end(), [&](double v) { return std::abs(v) <= half_width + 1e-12; });
      if (!inside) continue;
      double v = obj(x);
      if (v < best_val) {
        best_val = v;
        best = x;
      }
    }
    if (step <= final_step) return best;
    center = best;
    step /= 4.0;
    radius = 8;
  }
}

// Smoothed OWL value: 1/2 min over eta >= 0 of sum x_j^2/eta_j + lambda_j eta_(j).
// Enumerates every ordering of eta and every pattern of ties along it; each
// candidate is the closed-form minimizer on that face, kept when feasible.
inline double sowl_value_enumerate(const std::vector<double>& x, const std::vector<double>& lam) {
  std::size_t p = x.size();
  std::vector<std::size_t> perm(p);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    for (unsigned ties = 0; ties < (1u << (p - 1)); ++ties) {
      std::vector<double> eta(p);
      std::size_t start = 0;
      for (std::size_t j = 0; j < p; ++j) {
        bool close = j + 1 == p || !(ties & (1u << j));
        if (!close) continue;
        double sx = 0.0, sl = 0.0;
        for (std::size_t k = start; k <= j; ++k) {
          sx += x[perm[k]] * x[perm[k]];
          sl += lam[k];
        }
        for (std::size_t k = start; k <= j; ++k) eta[perm[k]] = std::sqrt(sx / sl);
        start = j + 1;
      }
      bool ok = true;
      for (std::size_t j = 0; j + 1 < p; ++j) ok = ok && eta[perm[j]] >= eta[perm[j + 1]] - 1e-15;
      if (!ok) continue;
      std::vector<double> sorted(eta);
      std::sort(sorted.rbegin(), sorted.rend());
      double v = 0.0;
      for (std::size_t j = 0; j < p; ++j) {
        if (x[j] != 0.0) v += x[j] * x[j] / eta[j];
        v += lam[j] * sorted[j];
      }
      best = std::min(best, 0.5 * v);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// SLOPE prox by enumerating every block partition of the |y|-sorted
// positions and every zero tail, keeping the best feasible candidate under
// the full objective.
inline std::vector<double> slope_prox_enumerate(const std::vector<double>& y, const std::vector<double>& lam) {
  std::size_t p = y.size();
  std::vector<std::size_t> ord(p);
  std::iota(ord.begin(), ord.end(), 0);
  std::sort(ord.begin(), ord.end(), [&](auto i, auto j) { return std::abs(y[i]) > std::abs(y[j]); });
  auto objective = [&](const std::vector<double>& x) {
    std::vector<double> a(p);
    double q = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      a[i] = std::abs(x[i]);
      q += 0.5 * (y[i] - x[i]) * (y[i] - x[i]);
    }
    std::sort(a.rbegin(), a.rend());
    for (std::size_t j = 0; j < p; ++j) q += lam[j] * a[j];
    return q;
  };
  std::vector<double> best_x(p, 0.0);
  double best = objective(best_x);
  for (unsigned cuts = 0; cuts < (1u << (p - 1)); ++cuts) {
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    std::size_t start = 0;
    for (std::size_t j = 0; j < p; ++j) {
      if (j + 1 == p || (cuts & (1u << j))) {
        blocks.emplace_back(start, j + 1);
        start = j + 1;
      }
    }
    for (std::size_t zero_from = 0; zero_from <= blocks.size(); ++zero_from) {
      std::vector<double> v(p, 0.0);
      for (std::size_t b = 0; b < zero_from; ++b) {
        double s = 0.0;
        for (std::size_t k = blocks[b].first; k < blocks[b].second; ++k) s += std::abs(y[ord[k]]) - lam[k];
        s /= static_cast<double>(blocks[b].second - blocks[b].first);
        for (std::size_t k = blocks[b].first; k < blocks[b].second; ++k) v[k] = s;
      }
      bool ok = true;
      for (std::size_t k = 0; k < p; ++k) ok = ok && v[k] >= 0.0 && (k == 0 || v[k] <= v[k - 1] + 1e-15);
      if (!ok) continue;
      std::vector<double> x(p);
      for (std::size_t k = 0; k < p; ++k) x[ord[k]] = std::copysign(v[k], y[ord[k]]);
      double val = objective(x);
      if (val < best) {
        best = val;
        best_x = x;
      }
    }
  }
  return best_x;
}

// Weighted PR1 projection over a lattice of step h, by dynamic programming
// over all lattice paths x_1 <= ... <= x_m with increments <= y_{i+1} - y_i.
inline double pr1_lattice_min(const std::vector<double>& y, const std::vector<double>& t, const std::vector<double>& w,
                              double h) {
  double lo = *std::min_element(t.begin(), t.end()) - 0.05, hi = *std::max_element(t.begin(), t.end()) + 0.05;
  std::size_t L = static_cast<std::size_t>((hi - lo) / h) + 1;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> V(L), N(L);
  for (std::size_t k = 0; k < L; ++k) {
    double x = lo + h * static_cast<double>(k);
    V[k] = w[0] * (x - t[0]) * (x - t[0]);
  }
  for (std::size_t i = 1; i < y.size(); ++i) {
    std::size_t win = static_cast<std::size_t>((y[i] - y[i - 1]) / h + 1e-9);
    for (std::size_t k = 0; k < L; ++k) {
      double m = inf;
      for (std::size_t d = 0; d <= win && d <= k; ++d) m = std::min(m, V[k - d]);
      double x = lo + h * static_cast<double>(k);
      N[k] = m + w[i] * (x - t[i]) * (x - t[i]);
    }
    V.swap(N);
  }
  return *std::min_element(V.begin(), V.end());
}

}  // namespace oracle
