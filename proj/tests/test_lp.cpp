#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hdrelay/gaussian.hpp"
#include "hdrelay/lp.hpp"

using namespace hdrelay;

namespace {

// Relay-level 4-state table of the two-antenna line network with unit power
// per state; cut {} is the delivery row, cut {1} the pickup row.
CutValueTable example_table(double gamma, bool coherent) {
  const double l1 = std::log2(1.0 + gamma);
  const double l2 = std::log2(1.0 + 2.0 * gamma);
  const double l4 = std::log2(1.0 + (coherent ? 4.0 : 2.0) * gamma);
  // State order 00, 10, 01, 11 (antenna 1 is the low bit).
  std::vector<std::vector<double>> vals = {
      {0.0, l2}, {l1, l1}, {l1, l1}, {l4, 0.0}};
  return CutValueTable::from_values(1, 2, vals);
}

// Example-1 gains: only source->antenna1 and antenna2->dest are nonzero.
CutValueTable example1_table(double gamma) {
  const double l = std::log2(1.0 + gamma);
  std::vector<std::vector<double>> vals = {{0.0, l}, {0.0, 0.0}, {l, l}, {l, 0.0}};
  return CutValueTable::from_values(1, 2, vals);
}

double min_over_cuts(const CutValueTable& table, const Schedule& lambda) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::uint32_t m = 0; m < table.num_cuts(); ++m)
    worst = std::min(worst, i_fix(table, lambda, CutSet{m}));
  return worst;
}

}  // namespace

TEST_CASE("simplex fixtures") {
  // max tau s.t. tau <= 2 l1, tau <= 3 l2, l1 + l2 = 1.
  LpProblem p;
  p.c = Eigen::Vector3d(1.0, 0.0, 0.0);
  p.a_ub = Eigen::MatrixXd(2, 3);
  p.a_ub << 1.0, -2.0, 0.0, 1.0, 0.0, -3.0;
  p.b_ub = Eigen::Vector2d::Zero();
  p.a_eq = Eigen::MatrixXd(1, 3);
  p.a_eq << 0.0, 1.0, 1.0;
  p.b_eq = Eigen::VectorXd::Ones(1);
  const LpSolution s = simplex_solve(p);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.value == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(s.x(1) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(s.x(2) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("simplex trivial, infeasible, unbounded") {
  LpProblem p;
  p.c = Eigen::VectorXd::Ones(1);
  p.a_ub = Eigen::MatrixXd::Ones(1, 1);
  p.b_ub = Eigen::VectorXd::Ones(1);
  const LpSolution s = simplex_solve(p);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.value == doctest::Approx(1.0));
  CHECK(s.basis == std::vector<int>{0});

  p.b_ub(0) = -1.0;  // x <= -1 with x >= 0
  CHECK(simplex_solve(p).status == LpStatus::Infeasible);

  LpProblem q;
  q.c = Eigen::VectorXd::Ones(1);
  CHECK(simplex_solve(q).status == LpStatus::Unbounded);
}

TEST_CASE("optimal solves are basic feasible and strongly dual") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    auto unif = [&rng]() { return static_cast<double>(rng() % 2000) / 1000.0 - 1.0; };
    const int n = 4 + static_cast<int>(seed % 3), m = 3;
    LpProblem p;
    p.c = Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) { return unif(); });
    p.a_ub = Eigen::MatrixXd::NullaryExpr(m, n, [&](Eigen::Index, Eigen::Index) {
      return unif() + 1.5;  // keep rows mostly positive so the LP is bounded
    });
    p.b_ub = Eigen::VectorXd::NullaryExpr(m, [&](Eigen::Index) { return unif() + 1.5; });
    const LpSolution s = simplex_solve(p);
    REQUIRE(s.status == LpStatus::Optimal);
    int support = 0;
    for (Eigen::Index i = 0; i < s.x.size(); ++i)
      if (s.x(i) > 1e-9) ++support;
    CHECK(support <= m);
    CHECK((p.a_ub * s.x - p.b_ub).maxCoeff() <= 1e-9);
    CHECK(s.x.minCoeff() >= -1e-12);
    CHECK(s.dual.dot(p.b_ub) == doctest::Approx(s.value).epsilon(1e-8));
  }
}

TEST_CASE("chain matrix builders") {
  const CutValueTable table = example_table(1.0, true);
  ChainPermutation pi = ChainPermutation::identity(1);
  const FPiMatrix f = build_f_pi(table, pi);
  REQUIRE(f.rows.rows() == 2);
  REQUIRE(f.rows.cols() == 4);
  for (std::size_t s = 0; s < 4; ++s) {
    CHECK(f.rows(0, static_cast<Eigen::Index>(s)) == table.value(s, CutSet{0}));
    CHECK(f.rows(1, static_cast<Eigen::Index>(s)) == table.value(s, CutSet{1}));
  }

  const Eigen::MatrixXd h = build_h_pi_f(f);
  // [1, indicator(prefix_k)] . H reproduces row k of F.
  Eigen::RowVector2d w0(1.0, 0.0), w1(1.0, 1.0);
  CHECK((w0 * h - f.rows.row(0)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((w1 * h - f.rows.row(1)).cwiseAbs().maxCoeff() <= 1e-12);
  // Fractional weights telescope: (1-w) f(empty) + w f(full).
  Eigen::RowVector2d wf(1.0, 0.3);
  CHECK(((wf * h) - (0.7 * f.rows.row(0) + 0.3 * f.rows.row(1)))
            .cwiseAbs()
            .maxCoeff() <= 1e-12);
}

TEST_CASE("chain program on the crossing-links line table") {
  const FPiMatrix f = build_f_pi(example1_table(3.0), ChainPermutation::identity(1));
  const P2Solution p2 = solve_p2(f);
  CHECK(p2.tau == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(p2.lambda.support().size() <= 2);
  CHECK(min_over_cuts(example1_table(3.0), p2.lambda) ==
        doctest::Approx(2.0).epsilon(1e-9));

  FPiMatrix zero = f;
  zero.rows.row(0).setZero();
  CHECK(solve_p2(zero).tau == doctest::Approx(0.0));
}

TEST_CASE("full program fixtures") {
  CHECK(solve_full_lp(example1_table(3.0)).c_prime == doctest::Approx(2.0).epsilon(1e-9));
  const FullLpSolution e2_1 = solve_full_lp(example_table(1.0, true));
  CHECK(e2_1.c_prime == doctest::Approx(1.0).epsilon(1e-9));
  const FullLpSolution e2_half = solve_full_lp(example_table(0.5, true));
  const double expect = 1.0 * std::log2(3.0) / (1.0 + std::log2(3.0));
  CHECK(e2_half.c_prime == doctest::Approx(expect).epsilon(1e-9));
  CHECK(e2_half.lambda.support().size() <= 2);
}

TEST_CASE("best permutation attains the full value and none fall below") {
  for (int n = 2; n <= 4; ++n)
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const CutValueTable table = CutValueTable::from_network(
          random_network(n, std::vector<int>(n, 1), seed * 31 + n));
      const double c_prime = solve_full_lp(table).c_prime;
      ChainPermutation pi = ChainPermutation::identity(n);
      double best = std::numeric_limits<double>::infinity();
      std::vector<int> order = pi.pi;
      do {
        pi.pi = order;
        const double tau = solve_p2(build_f_pi(table, pi)).tau;
        CHECK(tau >= c_prime - 1e-8);
        best = std::min(best, tau);
      } while (std::next_permutation(order.begin(), order.end()));
      CHECK(best == doctest::Approx(c_prime).epsilon(1e-8));
    }
}

TEST_CASE("scaling the table scales the value and keeps a support") {
  const CutValueTable base = example_table(0.5, true);
  std::vector<std::vector<double>> doubled(4, std::vector<double>(2));
  for (std::size_t s = 0; s < 4; ++s)
    for (std::uint32_t m = 0; m < 2; ++m)
      doubled[s][m] = 2.0 * base.value(s, CutSet{m});
  const CutValueTable scaled = CutValueTable::from_values(1, 2, doubled);
  const FullLpSolution a = solve_full_lp(base);
  const FullLpSolution b = solve_full_lp(scaled);
  CHECK(b.c_prime == doctest::Approx(2.0 * a.c_prime).epsilon(1e-9));
  CHECK(a.lambda.support() == b.lambda.support());
}
