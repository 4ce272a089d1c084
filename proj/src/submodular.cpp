#include "hdrelay/submodular.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

namespace hdrelay {

SetFunctionOracle normalize(const SetFunctionOracle& f) {
  if (f.normalized) return f;
  const double offset = f.eval(0);
  SetFunctionOracle g;
  g.n = f.n;
  g.normalized = true;
  g.eval = [inner = f.eval, offset](std::uint32_t mask) {
    return inner(mask) - offset;
  };
  return g;
}

ChainPermutation ChainPermutation::identity(int n) {
  ChainPermutation p;
  p.pi.resize(static_cast<std::size_t>(n));
  std::iota(p.pi.begin(), p.pi.end(), 0);
  return p;
}

ChainPermutation ChainPermutation::from_weights(const std::vector<double>& w) {
  ChainPermutation p = identity(static_cast<int>(w.size()));
  std::stable_sort(p.pi.begin(), p.pi.end(),
                   [&w](int a, int b) { return w[static_cast<std::size_t>(a)] >
                                               w[static_cast<std::size_t>(b)]; });
  return p;
}

std::uint32_t ChainPermutation::prefix_mask(int k) const {
  std::uint32_t mask = 0;
  for (int i = 0; i < k; ++i) mask |= 1u << pi[static_cast<std::size_t>(i)];
  return mask;
}

std::vector<std::uint32_t> ChainPermutation::prefix_sets() const {
  std::vector<std::uint32_t> out(static_cast<std::size_t>(n()) + 1);
  for (int k = 0; k <= n(); ++k) out[static_cast<std::size_t>(k)] = prefix_mask(k);
  return out;
}

std::vector<double> greedy_vertex(const SetFunctionOracle& g, const ChainPermutation& pi) {
  if (!g.normalized) throw InvalidInputError("greedy_vertex requires a normalized oracle");
  std::vector<double> x(static_cast<std::size_t>(g.n), 0.0);
  std::uint32_t prefix = 0;
  double prev = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const int elem = pi.pi[static_cast<std::size_t>(i)];
    prefix |= 1u << elem;
    const double cur = g.eval(prefix);
    x[static_cast<std::size_t>(elem)] = cur - prev;
    prev = cur;
  }
  return x;
}

double lovasz_extension(const SetFunctionOracle& g, const std::vector<double>& w) {
  if (static_cast<int>(w.size()) != g.n)
    throw InvalidInputError("weight vector length must equal the ground-set size");
  const ChainPermutation pi = ChainPermutation::from_weights(w);
  const std::vector<double> x = greedy_vertex(g, pi);
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * x[i];
  return acc;
}

ExhaustiveMinimum minimize_exhaustive(const SetFunctionOracle& g, int exhaustive_limit) {
  if (g.n > exhaustive_limit)
    throw RefusalError("minimize_exhaustive: ground set too large");
  const std::uint32_t count = 1u << g.n;
  ExhaustiveMinimum out;
  out.min_value = std::numeric_limits<double>::infinity();
  std::vector<double> values(count);
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    values[mask] = g.eval(mask);
    out.min_value = std::min(out.min_value, values[mask]);
  }
  for (std::uint32_t mask = 0; mask < count; ++mask)
    if (values[mask] <= out.min_value + 1e-9) out.minimizers.push_back(mask);
  std::sort(out.minimizers.begin(), out.minimizers.end(),
            [](std::uint32_t a, std::uint32_t b) {
              const int ca = std::popcount(a), cb = std::popcount(b);
              return ca != cb ? ca < cb : a < b;
            });
  return out;
}

namespace {

constexpr double kPivotTol = 1e-12;

// Minimum-norm point of the affine hull of the columns of basis, as convex
// coordinates; solves the KKT system [B'B 1; 1' 0][a; mu] = [0; 1].
Eigen::VectorXd affine_minimizer(const Eigen::MatrixXd& basis) {
  const Eigen::Index k = basis.cols();
  Eigen::MatrixXd kkt(k + 1, k + 1);
  kkt.topLeftCorner(k, k) = basis.transpose() * basis;
  kkt.topRightCorner(k, 1).setOnes();
  kkt.bottomLeftCorner(1, k).setOnes();
  kkt(k, k) = 0.0;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
  rhs(k) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  lu.setThreshold(kPivotTol);
  return lu.solve(rhs).head(k);
}

ChainPermutation ascending_order(const std::vector<double>& x) {
  ChainPermutation p = ChainPermutation::identity(static_cast<int>(x.size()));
  std::stable_sort(p.pi.begin(), p.pi.end(),
                   [&x](int a, int b) { return x[static_cast<std::size_t>(a)] <
                                               x[static_cast<std::size_t>(b)]; });
  return p;
}

}  // namespace

MinNormMinimum minimize_min_norm(const SetFunctionOracle& g, double tol, int max_iter) {
  if (!g.normalized)
    throw InvalidInputError("minimize_min_norm requires a normalized oracle");
  const int n = g.n;
  if (max_iter <= 0) max_iter = 10 * n * n + 50;

  double best_value = 0.0;  // g(empty) = 0 is always available
  std::uint32_t best_set = 0;
  auto consider = [&](std::uint32_t mask, double value) {
    if (value < best_value - 1e-15 ||
        (value <= best_value + 1e-15 &&
         (std::popcount(mask) < std::popcount(best_set) ||
          (std::popcount(mask) == std::popcount(best_set) && mask < best_set)))) {
      best_value = value;
      best_set = mask;
    }
  };
  auto scan_chain = [&](const ChainPermutation& order) {
    std::uint32_t prefix = 0;
    for (int i = 0; i < n; ++i) {
      prefix |= 1u << order.pi[static_cast<std::size_t>(i)];
      consider(prefix, g.eval(prefix));
    }
  };

  // Working set of base-polytope vertices (columns) and convex weights.
  Eigen::MatrixXd basis(n, 1);
  {
    const std::vector<double> v0 = greedy_vertex(g, ChainPermutation::identity(n));
    for (int i = 0; i < n; ++i) basis(i, 0) = v0[static_cast<std::size_t>(i)];
  }
  Eigen::VectorXd weights = Eigen::VectorXd::Ones(1);
  Eigen::VectorXd x = basis.col(0);

  int major = 0;
  for (; major < max_iter; ++major) {
    std::vector<double> xv(x.data(), x.data() + n);
    const ChainPermutation order = ascending_order(xv);
    scan_chain(order);
    const std::vector<double> qv = greedy_vertex(g, order);
    Eigen::VectorXd q = Eigen::Map<const Eigen::VectorXd>(qv.data(), n);

    double lower = 0.0;
    for (int i = 0; i < n; ++i) lower += std::min(x(i), 0.0);
    if (best_value - lower <= tol * (std::abs(best_value) + 1.0)) break;

    const double scale = 1.0 + x.squaredNorm();
    if (x.squaredNorm() - x.dot(q) <= kPivotTol * scale) break;

    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = q;
    weights.conservativeResize(weights.size() + 1);
    weights(weights.size() - 1) = 0.0;

    // Minor cycles: project onto the affine hull, stepping back to the convex
    // hull boundary and dropping vertices until the projection is interior.
    for (int minor = 0; minor < max_iter; ++minor) {
      const Eigen::VectorXd alpha = affine_minimizer(basis);
      if (alpha.minCoeff() >= kPivotTol) {
        weights = alpha;
        x = basis * weights;
        break;
      }
      double theta = 1.0;
      for (Eigen::Index i = 0; i < alpha.size(); ++i)
        if (alpha(i) < kPivotTol) {
          const double denom = weights(i) - alpha(i);
          if (denom > kPivotTol) theta = std::min(theta, weights(i) / denom);
        }
      weights = (1.0 - theta) * weights + theta * alpha;
      // Drop vertices whose weight hit zero.
      std::vector<Eigen::Index> keep;
      for (Eigen::Index i = 0; i < weights.size(); ++i)
        if (weights(i) > kPivotTol) keep.push_back(i);
      if (keep.empty()) keep.push_back(0);
      Eigen::MatrixXd nb(n, static_cast<Eigen::Index>(keep.size()));
      Eigen::VectorXd nw(static_cast<Eigen::Index>(keep.size()));
      for (std::size_t i = 0; i < keep.size(); ++i) {
        nb.col(static_cast<Eigen::Index>(i)) = basis.col(keep[i]);
        nw(static_cast<Eigen::Index>(i)) = weights(keep[i]);
      }
      basis = std::move(nb);
      weights = nw / nw.sum();
      x = basis * weights;
    }
  }

  MinNormMinimum out;
  for (int i = 0; i < n; ++i) {
    if (x(i) < -kSupportEpsilon) out.minimizer |= 1u << i;
    if (x(i) <= kSupportEpsilon) out.maximal_minimizer |= 1u << i;
  }
  consider(out.minimizer, g.eval(out.minimizer));
  consider(out.maximal_minimizer, g.eval(out.maximal_minimizer));
  out.base_point.assign(x.data(), x.data() + n);
  out.major_cycles = major;

  double lower = 0.0;
  for (int i = 0; i < n; ++i) lower += std::min(x(i), 0.0);
  if (best_value - lower > tol * (std::abs(best_value) + 1.0) && major >= max_iter)
    throw ConvergenceError("minimize_min_norm: no convergence after max_iter cycles",
                           best_value);

  out.min_value = best_value;
  if (g.eval(out.minimizer) > best_value + tol * (std::abs(best_value) + 1.0))
    out.minimizer = best_set;
  return out;
}

TightSetLattice tight_sets(const SetFunctionOracle& g, double level, double tol,
                           int exhaustive_limit) {
  if (g.n > exhaustive_limit) throw RefusalError("tight_sets: ground set too large");
  TightSetLattice out;
  const std::uint32_t count = 1u << g.n;
  std::vector<bool> member(count, false);
  for (std::uint32_t mask = 0; mask < count; ++mask)
    if (g.eval(mask) <= level + tol) {
      member[mask] = true;
      out.members.push_back(mask);
    }
  if (out.members.empty()) return out;
  out.minimal = out.members.front();
  out.maximal = 0;
  for (std::uint32_t mask : out.members) {
    out.minimal &= mask;
    out.maximal |= mask;
  }
  for (std::size_t i = 0; i < out.members.size(); ++i)
    for (std::size_t j = i + 1; j < out.members.size(); ++j) {
      if (!member[out.members[i] | out.members[j]] ||
          !member[out.members[i] & out.members[j]]) {
        out.closed_under_union_intersection = false;
        return out;
      }
    }
  return out;
}

}  // namespace hdrelay
