#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "symprox/measures.hpp"

namespace symprox {

// A pair of support points (x_i, g_i), (x_j, g_j) with x_i < x_j and g_i > g_j.
struct CmWitness {
  std::size_t i = 0, j = 0;
  Point2 first, second;
};

struct CmResult {
  bool monotone = true;
  std::optional<CmWitness> witness;
};

// Points are (u, v) = (x, g). Coordinates within tol (relative, floor 1) are
// treated as ties.
CmResult support_cyclically_monotone(const JointSample2D& pi, double tol = 1e-12);

// One cycle j_1 -> j_2 -> ... -> j_n -> j_1 over family members.
struct TupleMargin {
  std::vector<std::size_t> members;
  double diagonal = 0;  // sum_k E X_{j_k} G_{j_k}
  double achieved = 0;  // sum_k E X_{j_k} G_{j_{k+1}} under an explicit joint realization
  double upper = 0;     // sum of the pairwise suprema
  double margin = 0;    // diagonal - achieved
  bool exact = false;   // achieved is the supremum (n = 2)
  bool violated = false;
  bool certified = false;  // upper <= diagonal
};

struct JointCmReport {
  bool passed = true;
  std::vector<CmResult> individual;
  std::vector<std::size_t> failing_members;
  std::vector<TupleMargin> tuples;
  std::size_t violations = 0;
  double min_margin = 0;
};

inline constexpr std::size_t kJointCmAtomCap = 256;
inline constexpr std::size_t kJointCmTupleCap = 20000;

// Necessary-condition audit of joint cyclic monotonicity for equal-weight
// couplings with a common atom count, over cycles of length 2..max_cycle.
// Cycles of length 2 are solved exactly by assignment; longer cycles use a
// chained assignment, which gives a realizable lower bound on the supremum.
JointCmReport joint_cm_check(const std::vector<JointSample2D>& family, int max_cycle = 3, double tol = 1e-9);

// True iff the interpolant through (y, value) samples is nondecreasing and
// 1-Lipschitz. The y values must be distinct.
bool is_pr1(std::vector<std::pair<double, double>> samples);

}  // namespace symprox
