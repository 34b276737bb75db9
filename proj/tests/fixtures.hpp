#pragma once

#include <string>
#include <vector>

#include "symprox/penalties.hpp"

namespace fixtures {

using namespace symprox;

inline WeightProfile thirds() { return WeightProfile{{{0.333, 2.0}, {0.667, 1.0}, {1.0, 0.5}}}; }

// prox of rho(x) = 0.3|x| + 0.25 x^2, tabulated.
inline PR1Map tabulated_map() { return PR1Map{{-0.3, 0.3}, {0.0, 0.0}, 1.0 / 1.5, 1.0 / 1.5}; }
inline double tabulated_rho(double x) { return 0.3 * std::abs(x) + 0.25 * x * x; }

struct Named {
  std::string label;
  PenaltySpec f;
};

// One or more instances of every family, with assorted scales.
inline std::vector<Named> penalty_corpus() {
  return {
      {"abs", {Separable{AbsWeight{0.5}}, 1.0}},
      {"quadratic", {Separable{Quadratic{0.7}}, 0.8}},
      {"tabulated", {Separable{TabulatedProx{tabulated_map()}}, 1.3}},
      {"slope", {Slope{thirds()}, 0.6}},
      {"sowl", {SmoothedOwl{thirds()}, 0.7}},
      {"l2power-a1", {L2Power{1.0}, 0.5}},
      {"l2power-a2", {L2Power{2.0}, 1.0}},
      {"l2power-a4", {L2Power{4.0}, 0.3}},
      {"l1power-a1", {L1Power{1.0}, 0.4}},
      {"l1power-a2", {L1Power{2.0}, 0.2}},
  };
}

}  // namespace fixtures
