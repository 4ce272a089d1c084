#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hdrelay/core_model.hpp"
#include "hdrelay/errors.hpp"

namespace hdrelay {

/// Deterministic set-function oracle over ground set [1:n], sets as bitmasks.
struct SetFunctionOracle {
  int n = 0;
  std::function<double(std::uint32_t)> eval;
  bool normalized = false;  // asserts eval(0) == 0

  double operator()(std::uint32_t mask) const { return eval(mask); }
};

/// Wraps f into g(A) = f(A) - f(empty set) so that g(0) = 0.
SetFunctionOracle normalize(const SetFunctionOracle& f);

/// Permutation of [1:n] together with its nested prefix chain
/// {} c {pi_1} c {pi_1,pi_2} c ... c [1:n].
struct ChainPermutation {
  std::vector<int> pi;  // 0-based element indices

  static ChainPermutation identity(int n);
  /// Sorts weights descending; equal weights ordered by ascending index.
  static ChainPermutation from_weights(const std::vector<double>& w);

  int n() const { return static_cast<int>(pi.size()); }
  /// prefix_mask(k) = {pi_1,...,pi_k}; k ranges over [0:n].
  std::uint32_t prefix_mask(int k) const;
  std::vector<std::uint32_t> prefix_sets() const;  // n+1 nested members
};

/// Chain-difference vertex x with x_{pi_i} = g(prefix_i) - g(prefix_{i-1});
/// for submodular g this is the greedy vertex of the submodular polyhedron.
std::vector<double> greedy_vertex(const SetFunctionOracle& g, const ChainPermutation& pi);

/// Lovasz extension of a normalized g at w, computed as w . greedy_vertex with
/// the permutation sorting w descending.
double lovasz_extension(const SetFunctionOracle& g, const std::vector<double>& w);

struct ExhaustiveMinimum {
  double min_value = 0.0;
  /// All minimizing masks within a 1e-9 tie window, sorted by cardinality
  /// then mask value.
  std::vector<std::uint32_t> minimizers;
};

ExhaustiveMinimum minimize_exhaustive(const SetFunctionOracle& g, int exhaustive_limit = 20);

struct MinNormMinimum {
  double min_value = 0.0;
  std::uint32_t minimizer = 0;          // minimal minimizer (coords < -1e-9)
  std::uint32_t maximal_minimizer = 0;  // coords <= +1e-9
  std::vector<double> base_point;       // minimum-norm point of the base polytope
  int major_cycles = 0;
};

/// Fujishige-Wolfe minimum-norm-point submodular minimization. Requires g
/// submodular and normalized; behavior is undefined otherwise.
MinNormMinimum minimize_min_norm(const SetFunctionOracle& g, double tol = 1e-9,
                                 int max_iter = 0 /* default 10 n^2 */);

struct TightSetLattice {
  std::vector<std::uint32_t> members;  // all A with g(A) <= level + tol
  std::uint32_t minimal = 0;
  std::uint32_t maximal = 0;
  bool closed_under_union_intersection = true;
};

/// All sets at or below the given level; verifies lattice closure as a
/// diagnostic (a violation indicates g not submodular or tol too large).
TightSetLattice tight_sets(const SetFunctionOracle& g, double level, double tol,
                           int exhaustive_limit = 20);

}  // namespace hdrelay
