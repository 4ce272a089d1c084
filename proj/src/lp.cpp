#include "hdrelay/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hdrelay {

namespace {

constexpr double kReducedCostTol = 1e-9;
constexpr double kPivotFloor = 1e-11;

// Tableau simplex working state. Rows are kept in canonical form with respect
// to the current basis; reduced costs are recomputed from scratch each pivot,
// which is cheap at the problem sizes seen here and avoids drift in a separate
// objective row.
struct Tableau {
  Eigen::MatrixXd rows;  // m x (ncols + 1), last column is the RHS
  std::vector<int> basis;

  int m() const { return static_cast<int>(rows.rows()); }
  int ncols() const { return static_cast<int>(rows.cols()) - 1; }
  double rhs(int i) const { return rows(i, rows.cols() - 1); }

  void pivot(int row, int col) {
    rows.row(row) /= rows(row, col);
    for (int i = 0; i < m(); ++i) {
      if (i == row) continue;
      const double factor = rows(i, col);
      if (factor != 0.0) rows.row(i) -= factor * rows.row(row);
    }
    basis[static_cast<std::size_t>(row)] = col;
  }
};

enum class PhaseResult { Optimal, Unbounded, Degenerate };

// Bland's rule primal simplex for maximize cost.x over the tableau columns.
// Columns at or beyond max_enter_col (the artificials) may never enter.
PhaseResult run_simplex(Tableau& t, const Eigen::VectorXd& cost, int max_enter_col) {
  const int m = t.m();
  const int ncols = std::min(t.ncols(), max_enter_col);
  for (;;) {
    // Reduced costs r_j = c_j - c_B . column_j.
    Eigen::VectorXd cb(m);
    for (int i = 0; i < m; ++i) cb(i) = cost(t.basis[static_cast<std::size_t>(i)]);
    bool improved_available = false;
    bool degenerate_only = false;
    for (int j = 0; j < ncols; ++j) {
      const double reduced = cost(j) - cb.dot(t.rows.col(j));
      if (reduced <= kReducedCostTol) continue;
      improved_available = true;
      // Ratio test; Bland tie-break on the smallest leaving basis index.
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      bool tiny_positive = false;
      for (int i = 0; i < m; ++i) {
        const double a = t.rows(i, j);
        if (a > 0.0 && a <= kPivotFloor) tiny_positive = true;
        if (a <= kPivotFloor) continue;
        const double ratio = t.rhs(i) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 &&
             (leave < 0 || t.basis[static_cast<std::size_t>(i)] <
                               t.basis[static_cast<std::size_t>(leave)])))
        {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave < 0) {
        if (tiny_positive) {
          degenerate_only = true;
          continue;  // try another entering column
        }
        return PhaseResult::Unbounded;
      }
      t.pivot(leave, j);
      degenerate_only = false;
      break;
    }
    if (!improved_available) return PhaseResult::Optimal;
    if (degenerate_only) return PhaseResult::Degenerate;
  }
}

}  // namespace

void LpProblem::validate() const {
  const Eigen::Index n = c.size();
  if (a_ub.rows() != b_ub.size() || (a_ub.rows() > 0 && a_ub.cols() != n))
    throw InvalidInputError("inequality block dimensions are inconsistent");
  if (a_eq.rows() != b_eq.size() || (a_eq.rows() > 0 && a_eq.cols() != n))
    throw InvalidInputError("equality block dimensions are inconsistent");
  if (!c.allFinite() || !b_ub.allFinite() || !b_eq.allFinite() ||
      (a_ub.size() > 0 && !a_ub.allFinite()) || (a_eq.size() > 0 && !a_eq.allFinite()))
    throw InvalidInputError("LP data must be finite");
}

LpSolution simplex_solve(const LpProblem& p) {
  p.validate();
  const int n = static_cast<int>(p.c.size());
  const int m1 = static_cast<int>(p.a_ub.rows());
  const int m2 = static_cast<int>(p.a_eq.rows());
  const int m = m1 + m2;

  // Working rows: structural columns, slack columns for inequalities, then
  // RHS. Rows are sign-flipped as needed so every RHS is nonnegative.
  std::vector<bool> flipped(static_cast<std::size_t>(m), false);
  Eigen::MatrixXd work = Eigen::MatrixXd::Zero(m, n + m1 + 1);
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd row = i < m1 ? p.a_ub.row(i).transpose()
                                 : p.a_eq.row(i - m1).transpose();
    double b = i < m1 ? p.b_ub(i) : p.b_eq(i - m1);
    double slack = i < m1 ? 1.0 : 0.0;
    if (b < 0.0) {
      row = -row;
      b = -b;
      slack = -slack;
      flipped[static_cast<std::size_t>(i)] = true;
    }
    work.block(i, 0, 1, n) = row.transpose();
    if (i < m1) work(i, n + i) = slack;
    work(i, n + m1) = b;
  }

  // Phase 1: artificials for every row that cannot start on its own slack.
  std::vector<int> artificial_rows;
  for (int i = 0; i < m; ++i)
    if (i >= m1 || flipped[static_cast<std::size_t>(i)]) artificial_rows.push_back(i);
  const int na = static_cast<int>(artificial_rows.size());

  Tableau t;
  t.rows = Eigen::MatrixXd::Zero(m, n + m1 + na + 1);
  t.rows.leftCols(n + m1) = work.leftCols(n + m1);
  t.rows.col(n + m1 + na) = work.col(n + m1);
  t.basis.assign(static_cast<std::size_t>(m), -1);
  for (int k = 0; k < na; ++k) {
    t.rows(artificial_rows[static_cast<std::size_t>(k)], n + m1 + k) = 1.0;
    t.basis[static_cast<std::size_t>(artificial_rows[static_cast<std::size_t>(k)])] =
        n + m1 + k;
  }
  for (int i = 0; i < m1; ++i)
    if (!flipped[static_cast<std::size_t>(i)]) t.basis[static_cast<std::size_t>(i)] = n + i;

  LpSolution sol;
  if (na > 0) {
    Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(n + m1 + na);
    phase1_cost.tail(na).setConstant(-1.0);
    const PhaseResult r1 = run_simplex(t, phase1_cost, n + m1 + na);
    if (r1 == PhaseResult::Degenerate)
      throw DegeneracyError("simplex phase 1: only degenerate pivots remain");
    double infeas = 0.0;
    for (int i = 0; i < m; ++i)
      if (t.basis[static_cast<std::size_t>(i)] >= n + m1) infeas += t.rhs(i);
    if (infeas > 1e-8 * (1.0 + work.col(n + m1).cwiseAbs().maxCoeff())) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    // Drive remaining artificials out of the basis where possible.
    for (int i = 0; i < m; ++i) {
      if (t.basis[static_cast<std::size_t>(i)] < n + m1) continue;
      int col = -1;
      for (int j = 0; j < n + m1 && col < 0; ++j)
        if (std::abs(t.rows(i, j)) > kPivotFloor) col = j;
      if (col >= 0) t.pivot(i, col);
      // else: redundant row; its artificial stays basic at value zero.
    }
  }

  Eigen::VectorXd phase2_cost = Eigen::VectorXd::Zero(n + m1 + na);
  phase2_cost.head(n) = p.c;
  const PhaseResult r2 = run_simplex(t, phase2_cost, n + m1);
  if (r2 == PhaseResult::Degenerate)
    throw DegeneracyError("simplex phase 2: only degenerate pivots remain");
  if (r2 == PhaseResult::Unbounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  sol.status = LpStatus::Optimal;
  sol.x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) {
    const int b = t.basis[static_cast<std::size_t>(i)];
    if (b < n) sol.x(b) = t.rhs(i);
  }
  sol.value = p.c.dot(sol.x);
  for (int i = 0; i < m; ++i)
    if (t.basis[static_cast<std::size_t>(i)] < n + m1)
      sol.basis.push_back(t.basis[static_cast<std::size_t>(i)]);
  std::sort(sol.basis.begin(), sol.basis.end());

  // Duals: solve B^T y = c_B over the working-row column data, then undo the
  // row sign flips.
  Eigen::MatrixXd basis_cols(m, m);
  Eigen::VectorXd cb(m);
  for (int i = 0; i < m; ++i) {
    const int b = t.basis[static_cast<std::size_t>(i)];
    if (b < n + m1) {
      basis_cols.col(i) = work.col(b);
      cb(i) = b < n ? p.c(b) : 0.0;
    } else {
      // Redundant-row artificial basic at zero: its working column is a unit
      // vector on that row.
      basis_cols.col(i).setZero();
      basis_cols(artificial_rows[static_cast<std::size_t>(b - n - m1)], i) = 1.0;
      cb(i) = 0.0;
    }
  }
  Eigen::VectorXd y = basis_cols.transpose().fullPivLu().solve(cb);
  sol.dual = Eigen::VectorXd(m);
  for (int i = 0; i < m; ++i)
    sol.dual(i) = flipped[static_cast<std::size_t>(i)] ? -y(i) : y(i);
  return sol;
}

FPiMatrix build_f_pi(const CutValueTable& table, const ChainPermutation& pi) {
  if (pi.n() != table.n_relays())
    throw InvalidInputError("permutation length must equal the relay count");
  FPiMatrix f;
  f.pi = pi;
  const int n = table.n_relays();
  const Eigen::Index num_states = static_cast<Eigen::Index>(table.num_states());
  f.rows = Eigen::MatrixXd(n + 1, num_states);
  for (int k = 0; k <= n; ++k) {
    const CutSet prefix{pi.prefix_mask(k)};
    for (Eigen::Index s = 0; s < num_states; ++s)
      f.rows(k, s) = table.value(static_cast<std::size_t>(s), prefix);
  }
  return f;
}

Eigen::MatrixXd build_h_pi_f(const FPiMatrix& f) {
  const int n = f.pi.n();
  Eigen::MatrixXd diff = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int k = 0; k <= n; ++k) {
    diff(k, k) = 1.0;
    if (k > 0) diff(k, k - 1) = -1.0;
  }
  // P(0,0) = 1 and P(pi_j, j) = 1 so that [1, w^T] P = [1, w_{pi_1}, ...].
  Eigen::MatrixXd perm = Eigen::MatrixXd::Zero(n + 1, n + 1);
  perm(0, 0) = 1.0;
  for (int j = 0; j < n; ++j) perm(f.pi.pi[static_cast<std::size_t>(j)] + 1, j + 1) = 1.0;
  return perm * (diff * f.rows);
}

P2Solution solve_p2(const FPiMatrix& f) {
  const int n_rows = static_cast<int>(f.rows.rows());
  const int num_states = static_cast<int>(f.rows.cols());
  // Variables [tau, lambda]; tau >= 0 comes from the x >= 0 convention.
  LpProblem p;
  p.c = Eigen::VectorXd::Zero(1 + num_states);
  p.c(0) = 1.0;
  p.a_ub = Eigen::MatrixXd::Zero(n_rows, 1 + num_states);
  p.a_ub.col(0).setOnes();
  p.a_ub.rightCols(num_states) = -f.rows;
  p.b_ub = Eigen::VectorXd::Zero(n_rows);
  p.a_eq = Eigen::MatrixXd::Zero(1, 1 + num_states);
  p.a_eq.rightCols(num_states).setOnes();
  p.b_eq = Eigen::VectorXd::Ones(1);

  const LpSolution sol = simplex_solve(p);
  if (sol.status != LpStatus::Optimal)
    throw ConvergenceError("solve_p2: chain LP did not reach an optimum", 0.0);
  P2Solution out;
  out.tau = sol.x(0);
  out.lambda.probs.assign(sol.x.data() + 1, sol.x.data() + 1 + num_states);
  out.lp = sol;
  return out;
}

FullLpSolution solve_full_lp(const CutValueTable& table, int exhaustive_limit) {
  if (table.n_relays() > exhaustive_limit)
    throw RefusalError("solve_full_lp: too many relays for the exact oracle");
  const int num_cuts = static_cast<int>(table.num_cuts());
  const int num_states = static_cast<int>(table.num_states());

  LpProblem p;
  p.c = Eigen::VectorXd::Zero(1 + num_states);
  p.c(0) = 1.0;
  p.a_ub = Eigen::MatrixXd::Zero(num_cuts, 1 + num_states);
  p.a_ub.col(0).setOnes();
  for (int a = 0; a < num_cuts; ++a)
    for (int s = 0; s < num_states; ++s)
      p.a_ub(a, 1 + s) = -table.value(static_cast<std::size_t>(s),
                                      CutSet{static_cast<std::uint32_t>(a)});
  p.b_ub = Eigen::VectorXd::Zero(num_cuts);
  p.a_eq = Eigen::MatrixXd::Zero(1, 1 + num_states);
  p.a_eq.rightCols(num_states).setOnes();
  p.b_eq = Eigen::VectorXd::Ones(1);

  const LpSolution sol = simplex_solve(p);
  if (sol.status != LpStatus::Optimal)
    throw ConvergenceError("solve_full_lp: LP did not reach an optimum", 0.0);
  FullLpSolution out;
  out.c_prime = sol.x(0);
  out.lambda.probs.assign(sol.x.data() + 1, sol.x.data() + 1 + num_states);
  out.cut_weights.assign(num_cuts, 0.0);
  for (int a = 0; a < num_cuts; ++a)
    out.cut_weights[static_cast<std::size_t>(a)] = std::max(0.0, sol.dual(a));
  return out;
}

}  // namespace hdrelay
