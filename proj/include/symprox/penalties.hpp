#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "symprox/pr1_map.hpp"

namespace symprox {

// Step function on (0,1]: steps[k] = (t_k, value_k) means value_k on
// (t_{k-1}, t_k]. Materialized to length p by sampling at (j - 1/2)/p.
struct WeightProfile {
  std::vector<std::pair<double, double>> steps;

  std::vector<double> materialize(std::size_t p) const;
  // Profile whose materialization at p = w.size() returns w exactly.
  static WeightProfile from_weights(const std::vector<double>& w);
  static WeightProfile constant(double v) { return WeightProfile{{{1.0, v}}}; }
};

struct AbsWeight {
  double xi;
};
struct Quadratic {
  double c;
};
struct TabulatedProx {
  PR1Map map;  // used directly as prox[rho]
};
using ScalarPenalty = std::variant<AbsWeight, Quadratic, TabulatedProx>;

struct Separable {
  ScalarPenalty scalar;
};
struct Slope {
  WeightProfile profile;
};
struct SmoothedOwl {
  WeightProfile profile;
};
struct L2Power {
  double alpha;
};
struct L1Power {
  double alpha;
};

struct PenaltySpec {
  std::variant<Separable, Slope, SmoothedOwl, L2Power, L1Power> family;
  double scale = 1.0;

  PenaltySpec scaled(double s) const;
  std::string name() const;
  bool evaluable() const;
  bool is_separable() const { return std::holds_alternative<Separable>(family); }
  // Throws InvalidArgument on a malformed spec.
  void validate() const;
};

enum class SowlMethod { Exact, Alternating };

struct ProxOptions {
  double tol = 1e-8;
  long max_iters = 10000;
  SowlMethod sowl = SowlMethod::Exact;
};

double evaluate(const PenaltySpec& f, const std::vector<double>& x);
std::vector<double> prox(const PenaltySpec& f, const std::vector<double>& y, const ProxOptions& opt = {});

double kkt_residual(const PenaltySpec& f, const std::vector<double>& y, const std::vector<double>& x,
                    std::size_t n_probes = 200, std::uint64_t seed = 0);

// prox of scale * rho for a Separable penalty, as an exact PR1 map.
PR1Map separable_prox_map(const PenaltySpec& f);

}  // namespace symprox
