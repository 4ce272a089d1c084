#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <random>

#include "hdrelay/gaussian.hpp"
#include "hdrelay/submodular.hpp"

using namespace hdrelay;

namespace {

// Two-element fixture: g({1}) = 3, g({2}) = 4, g({1,2}) = 6.
SetFunctionOracle two_element() {
  SetFunctionOracle g;
  g.n = 2;
  g.normalized = true;
  g.eval = [](std::uint32_t m) {
    static const double v[4] = {0.0, 3.0, 4.0, 6.0};
    return v[m];
  };
  return g;
}

SetFunctionOracle modular(std::vector<double> c) {
  SetFunctionOracle g;
  g.n = static_cast<int>(c.size());
  g.normalized = true;
  g.eval = [c = std::move(c)](std::uint32_t m) {
    double acc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
      if ((m >> i) & 1u) acc += c[i];
    return acc;
  };
  return g;
}

// Normalized cut-information oracle of a random Gaussian net at a random
// sparse schedule; submodular by construction.
SetFunctionOracle gaussian_oracle(int n, std::uint64_t seed) {
  auto table = std::make_shared<CutValueTable>(
      CutValueTable::from_network(random_network(n, std::vector<int>(n, 1), seed)));
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  auto lambda = std::make_shared<Schedule>();
  lambda->probs.assign(table->num_states(), 0.0);
  double total = 0.0;
  for (int k = 0; k < n + 1; ++k) {
    const std::size_t s = rng() % table->num_states();
    const double w = 1.0 + static_cast<double>(rng() % 1000) / 1000.0;
    lambda->probs[s] += w;
    total += w;
  }
  for (double& p : lambda->probs) p /= total;

  SetFunctionOracle f;
  f.n = n;
  f.eval = [table, lambda](std::uint32_t m) { return i_fix(*table, *lambda, CutSet{m}); };
  return normalize(f);
}

}  // namespace

TEST_CASE("greedy vertex chain differences") {
  const SetFunctionOracle g = two_element();
  ChainPermutation pi;
  pi.pi = {0, 1};
  CHECK(greedy_vertex(g, pi) == std::vector<double>{3.0, 3.0});
  pi.pi = {1, 0};
  CHECK(greedy_vertex(g, pi) == std::vector<double>{2.0, 4.0});

  const SetFunctionOracle m = modular({1.5, -2.0, 0.25});
  for (auto order : {std::vector<int>{0, 1, 2}, {2, 0, 1}, {1, 2, 0}}) {
    ChainPermutation p;
    p.pi = order;
    CHECK(greedy_vertex(m, p) == std::vector<double>{1.5, -2.0, 0.25});
  }
}

TEST_CASE("extension values at vertices and fractional points") {
  const SetFunctionOracle g = two_element();
  CHECK(lovasz_extension(g, {1.0, 1.0}) == 6.0);
  CHECK(lovasz_extension(g, {1.0, 0.0}) == 3.0);
  CHECK(lovasz_extension(g, {0.0, 1.0}) == 4.0);
  CHECK(lovasz_extension(g, {0.5, 0.25}) == doctest::Approx(2.25).epsilon(1e-15));
  CHECK(lovasz_extension(g, {0.25, 0.5}) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("extension is convex and homogeneous on submodular oracles") {
  const SetFunctionOracle g = gaussian_oracle(4, 11);
  std::mt19937_64 rng(5);
  auto unif = [&rng]() { return static_cast<double>(rng() % 10000) / 10000.0; };
  for (int t = 0; t < 50; ++t) {
    std::vector<double> w1(4), w2(4), mix(4);
    const double theta = unif();
    for (int i = 0; i < 4; ++i) {
      w1[i] = unif();
      w2[i] = unif();
      mix[i] = theta * w1[i] + (1.0 - theta) * w2[i];
    }
    CHECK(lovasz_extension(g, mix) <= theta * lovasz_extension(g, w1) +
                                          (1.0 - theta) * lovasz_extension(g, w2) +
                                          1e-9);
    std::vector<double> scaled = w1;
    for (double& x : scaled) x *= 0.37;
    CHECK(lovasz_extension(g, scaled) ==
          doctest::Approx(0.37 * lovasz_extension(g, w1)).epsilon(1e-10));
  }
}

TEST_CASE("greedy vertex is feasible for the submodular polyhedron") {
  const SetFunctionOracle g = gaussian_oracle(5, 23);
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    std::mt19937_64 rng(seed);
    ChainPermutation pi = ChainPermutation::identity(5);
    std::shuffle(pi.pi.begin(), pi.pi.end(), rng);
    const std::vector<double> x = greedy_vertex(g, pi);
    for (std::uint32_t m = 0; m < 32; ++m) {
      double acc = 0.0;
      for (int i = 0; i < 5; ++i)
        if ((m >> i) & 1u) acc += x[static_cast<std::size_t>(i)];
      CHECK(acc <= g.eval(m) + 1e-9);
    }
  }
}

TEST_CASE("exhaustive minimization fixtures") {
  const ExhaustiveMinimum a = minimize_exhaustive(two_element());
  CHECK(a.min_value == 0.0);
  CHECK(a.minimizers.front() == 0u);

  SetFunctionOracle g;
  g.n = 2;
  g.normalized = true;
  g.eval = [](std::uint32_t m) {
    return static_cast<double>(std::popcount(m)) - 2.0 * ((m & 1u) ? 1.0 : 0.0);
  };
  const ExhaustiveMinimum b = minimize_exhaustive(g);
  CHECK(b.min_value == -1.0);
  CHECK(b.minimizers == std::vector<std::uint32_t>{1u});

  SetFunctionOracle big;
  big.n = 25;
  big.eval = [](std::uint32_t) { return 0.0; };
  CHECK_THROWS_AS(minimize_exhaustive(big, 20), RefusalError);
}

TEST_CASE("min-norm-point minimization fixtures") {
  const MinNormMinimum m = minimize_min_norm(modular({-1.0, 2.0}));
  CHECK(m.min_value == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(m.minimizer == 1u);

  const MinNormMinimum f = minimize_min_norm(two_element());
  CHECK(f.min_value == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(f.minimizer == 0u);
}

TEST_CASE("min-norm equals exhaustive on random submodular instances") {
  for (int n = 2; n <= 8; ++n)
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const SetFunctionOracle g = gaussian_oracle(n, seed * 101 + n);
      const ExhaustiveMinimum ex = minimize_exhaustive(g);
      const MinNormMinimum mn = minimize_min_norm(g);
      CHECK(mn.min_value == doctest::Approx(ex.min_value).epsilon(1e-7));
      CHECK(g.eval(mn.minimizer) == doctest::Approx(ex.min_value).epsilon(1e-7));
    }
}

TEST_CASE("cube minimum never beats the vertex minimum") {
  const SetFunctionOracle g = gaussian_oracle(6, 77);
  const double vertex_min = minimize_exhaustive(g).min_value;
  std::mt19937_64 rng(9);
  double best = 0.0;
  for (int t = 0; t < 200; ++t) {
    std::vector<double> w(6);
    for (double& x : w) x = static_cast<double>(rng() % 10000) / 10000.0;
    best = std::min(best, lovasz_extension(g, w));
  }
  CHECK(best >= vertex_min - 1e-9);
}

TEST_CASE("tight set lattices") {
  const TightSetLattice a = tight_sets(two_element(), 0.0, 1e-9);
  CHECK(a.members == std::vector<std::uint32_t>{0u});

  const TightSetLattice b = tight_sets(modular({0.0, 1.0}), 0.0, 1e-9);
  CHECK(b.members == std::vector<std::uint32_t>{0u, 1u});
  CHECK(b.closed_under_union_intersection);
  CHECK(b.minimal == 0u);
  CHECK(b.maximal == 1u);

  const SetFunctionOracle g = gaussian_oracle(5, 31);
  const double min_value = minimize_exhaustive(g).min_value;
  const TightSetLattice c = tight_sets(g, min_value, 1e-9);
  CHECK(c.closed_under_union_intersection);
}
