#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symprox/measures.hpp"
#include "symprox/penalties.hpp"
#include "symprox/pr1_map.hpp"

namespace symprox {

// The parameter vector: explicit values, or quantiles of a prior.
struct ThetaSpec {
  enum class Kind { Values, Prior, GaussianQuantiles };
  Kind kind = Kind::Values;
  std::vector<double> values;
  EmpiricalMeasure1D prior;
  std::size_t p = 0;

  static ThetaSpec explicit_values(std::vector<double> v);
  // prior quantiles at (j - 1/2)/p
  static ThetaSpec from_prior(EmpiricalMeasure1D mu, std::size_t p);
  // standard normal quantiles at j/(p + 1)
  static ThetaSpec gaussian_quantiles(std::size_t p);

  std::vector<double> materialize() const;
  std::size_t dimension() const;
  // The measure the map is built from under MapSource::Population.
  EmpiricalMeasure1D population() const;
};

enum class MapSource { Empirical, Population };

struct SequenceConfig {
  ThetaSpec theta;
  double tau = 1.0;
  PenaltySpec penalty;
  std::size_t grid_size = 4096;
  std::size_t trials = 20;
  std::uint64_t seed = 0;
  MapSource map_source = MapSource::Empirical;
  ProxOptions prox;
  std::size_t scatter_points = 100;

  void validate() const;
};

struct Summary {
  double mean = 0, median = 0, q10 = 0, q90 = 0, max = 0;
};
Summary summarize(std::vector<double> v);

struct SeparabilityReport {
  std::size_t p = 0;
  double tau = 0;
  std::optional<double> snr;  // empty when tau = 0
  std::vector<double> gaps;
  std::vector<double> w2;
  Summary gap_summary;
  Summary w2_summary;
  PR1Map map;
  GridMeasure grid;
  std::vector<std::pair<double, double>> scatter;  // (y_j, prox_j) from trial 0
};

// y = theta + tau z with z from stream `stream` of `seed`.
std::vector<double> simulate_y(const std::vector<double>& theta, double tau, std::uint64_t seed,
                               std::uint64_t stream = 0);

SeparabilityReport separability_experiment(const SequenceConfig& cfg);

// One Appendix-C style panel: theory map plus a subsampled single draw.
struct PanelResult {
  PR1Map theory;
  std::vector<std::pair<double, double>> scatter;
  double zero_threshold = 0;  // largest y >= 0 with A(y) = 0, or -inf
};
PanelResult theory_panel(const ThetaSpec& theta, double tau, const PenaltySpec& f, std::size_t grid_size,
                         std::uint64_t seed, std::size_t scatter_points, const ProxOptions& opt = {});

double zero_threshold(const PR1Map& map);

}  // namespace symprox
