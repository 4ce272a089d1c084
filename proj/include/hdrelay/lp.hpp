#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hdrelay/core_model.hpp"
#include "hdrelay/submodular.hpp"

namespace hdrelay {

/// Dense LP: maximize c.x subject to A_ub x <= b_ub, A_eq x = b_eq, x >= 0.
struct LpProblem {
  Eigen::VectorXd c;
  Eigen::MatrixXd a_ub;
  Eigen::VectorXd b_ub;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;

  void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  double value = 0.0;
  /// Basic variable indices; structural variables first, slack i of inequality
  /// row i has index n + i.
  std::vector<int> basis;
  /// Row multipliers, inequality rows first then equality rows. Strong duality
  /// holds at Optimal: b.dual == value to 1e-8.
  Eigen::VectorXd dual;
};

/// Primal two-phase simplex on a dense tableau with Bland's rule. Optimal
/// solutions are basic feasible: support size never exceeds the row count.
LpSolution simplex_solve(const LpProblem& p);

/// The (N+1) x S matrix whose row k holds f_s(prefix_k) over all states s, for
/// the prefix chain {} c {pi_1} c ... c [1:N] of pi.
struct FPiMatrix {
  ChainPermutation pi;
  Eigen::MatrixXd rows;
};

FPiMatrix build_f_pi(const CutValueTable& table, const ChainPermutation& pi);

/// P_pi . (lower-bidiagonal +/-1 differencing) . F_pi, so that
/// [1, w^T] H reproduces the chain telescoping for unsorted w.
Eigen::MatrixXd build_h_pi_f(const FPiMatrix& f);

struct P2Solution {
  double tau = 0.0;
  Schedule lambda;
  LpSolution lp;
};

/// The chain LP "maximize tau s.t. 1 tau <= F_pi lambda, sum lambda = 1".
/// The basic feasible optimum has lambda support of at most N+1 states.
P2Solution solve_p2(const FPiMatrix& f);

struct FullLpSolution {
  double c_prime = 0.0;
  Schedule lambda;
  /// Optimal dual weight per cut mask, certifying the max-min value.
  std::vector<double> cut_weights;
};

/// Exact oracle: max_lambda min_A i_fix(lambda, A) with all 2^N cut rows.
FullLpSolution solve_full_lp(const CutValueTable& table, int exhaustive_limit = 10);

}  // namespace hdrelay
