#include "hdrelay/scheduler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

namespace hdrelay {

namespace {

// Master LP of the constraint generation: maximize tau subject to
// tau <= i_fix(lambda, A_k) for every working cut, lambda on the simplex.
P2Solution max_min_over_cuts(const CutValueTable& table,
                             const std::vector<CutSet>& cuts) {
  FPiMatrix f;  // not a chain; solve_p2 only reads the row matrix
  f.pi = ChainPermutation::identity(table.n_relays());
  f.rows = Eigen::MatrixXd(static_cast<Eigen::Index>(cuts.size()),
                           static_cast<Eigen::Index>(table.num_states()));
  for (std::size_t k = 0; k < cuts.size(); ++k)
    for (std::size_t s = 0; s < table.num_states(); ++s)
      f.rows(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(s)) =
          table.value(s, cuts[k]);
  return solve_p2(f);
}

struct Separation {
  double min_value = 0.0;
  CutSet minimizer;
};

Separation separate(const CutValueTable& table, const Schedule& lambda,
                    int exhaustive_limit) {
  SetFunctionOracle f;
  f.n = table.n_relays();
  f.eval = [&table, &lambda](std::uint32_t mask) {
    return i_fix(table, lambda, CutSet{mask});
  };
  Separation out;
  if (f.n <= exhaustive_limit) {
    const ExhaustiveMinimum em = minimize_exhaustive(f, exhaustive_limit);
    out.min_value = em.min_value;
    out.minimizer = CutSet{em.minimizers.front()};
  } else {
    const double offset = f.eval(0);
    const MinNormMinimum mm = minimize_min_norm(normalize(f));
    out.min_value = mm.min_value + offset;
    out.minimizer = CutSet{mm.minimizer};
  }
  return out;
}

// Chain LP restricted to a state subset; probabilities of excluded states are
// pinned to zero by dropping their columns.
P2Solution solve_p2_restricted(const FPiMatrix& f,
                               const std::vector<std::size_t>& states) {
  FPiMatrix sub;
  sub.pi = f.pi;
  sub.rows = Eigen::MatrixXd(f.rows.rows(), static_cast<Eigen::Index>(states.size()));
  for (std::size_t j = 0; j < states.size(); ++j)
    sub.rows.col(static_cast<Eigen::Index>(j)) =
        f.rows.col(static_cast<Eigen::Index>(states[j]));
  P2Solution inner = solve_p2(sub);
  P2Solution out;
  out.tau = inner.tau;
  out.lp = inner.lp;
  out.lambda.probs.assign(static_cast<std::size_t>(f.rows.cols()), 0.0);
  for (std::size_t j = 0; j < states.size(); ++j)
    out.lambda.probs[states[j]] = inner.lambda.probs[j];
  return out;
}

// Drops support states one at a time (ascending state index) whenever the
// remaining support still attains c_prime - tol over all cuts.
Schedule prune_support(const CutValueTable& table, const FPiMatrix& f,
                       const Schedule& lambda, double c_prime, double tol,
                       int exhaustive_limit) {
  std::vector<std::size_t> support = lambda.support();
  Schedule best = lambda;
  bool changed = true;
  while (changed && support.size() > 1) {
    changed = false;
    for (std::size_t i = 0; i < support.size(); ++i) {
      std::vector<std::size_t> trial = support;
      trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
      P2Solution restricted = solve_p2_restricted(f, trial);
      if (restricted.tau < c_prime - tol) continue;
      const Separation check = separate(table, restricted.lambda, exhaustive_limit);
      if (check.min_value >= c_prime - tol) {
        best = restricted.lambda;
        support = best.support();
        changed = true;
        break;
      }
    }
  }
  return best;
}

ChainPermutation permutation_through_chain(const std::vector<std::uint32_t>& chain,
                                           int n) {
  ChainPermutation pi;
  std::uint32_t placed = 0;
  auto append_mask = [&](std::uint32_t mask) {
    for (int k = 0; k < n; ++k)
      if ((mask >> k) & 1u && !((placed >> k) & 1u)) {
        pi.pi.push_back(k);
        placed |= 1u << k;
      }
  };
  for (std::uint32_t member : chain) append_mask(member);
  append_mask((1u << n) - 1);
  return pi;
}

}  // namespace

SolveResult solve_saddle(const CutValueTable& table, double tol, int exhaustive_limit) {
  const int n = table.n_relays();
  const std::size_t num_cuts = table.num_cuts();

  std::vector<CutSet> working{{0u}, {static_cast<std::uint32_t>(num_cuts - 1)}};
  for (int k = 0; k < n; ++k) working.push_back(CutSet{1u << k});
  std::set<std::uint32_t> seen;
  for (CutSet c : working) seen.insert(c.mask);

  SolveResult result;
  double prev_master = std::numeric_limits<double>::infinity();
  for (;;) {
    P2Solution master = max_min_over_cuts(table, working);
    if (master.tau > prev_master + 1e-9 * (std::abs(prev_master) + 1.0))
      throw ConvergenceError("solve_saddle: master value increased after adding a cut",
                             master.tau);
    prev_master = master.tau;

    const Separation sep = separate(table, master.lambda, exhaustive_limit);
    ++result.iterations;
    IterationRecord rec;
    rec.master_value = master.tau;
    rec.violated_cut = sep.minimizer;
    rec.violation = std::max(0.0, master.tau - sep.min_value);
    result.trace.push_back(rec);

    const double scaled_tol = tol * (std::abs(master.tau) + 1.0);
    if (sep.min_value >= master.tau - scaled_tol) {
      result.rate = master.tau;
      result.schedule = master.lambda;
      result.min_cut_value_at_schedule = sep.min_value;
      result.gap_to_master = master.tau - sep.min_value;
      return result;
    }
    if (!seen.insert(sep.minimizer.mask).second)
      throw ConvergenceError("solve_saddle: separation regenerated a working cut",
                             master.tau);
    working.push_back(sep.minimizer);
  }
}

SimpleScheduleResult extract_simple_schedule(const CutValueTable& table,
                                             const Schedule& lambda_raw,
                                             double c_prime, double tol) {
  const int n = table.n_relays();
  // Wide window for *detecting* tight cuts, narrow one for *accepting* a
  // rebuilt schedule, so the output rate stays within a couple of tol of
  // the master value.
  const double tol_tight = 10.0 * tol * (std::abs(c_prime) + 1.0);
  const double tol_accept = 2.0 * tol * (std::abs(c_prime) + 1.0);
  const int exhaustive_limit = 12;

  SetFunctionOracle cut_fn;
  cut_fn.n = n;
  cut_fn.eval = [&table, &lambda_raw](std::uint32_t mask) {
    return i_fix(table, lambda_raw, CutSet{mask});
  };
  const TightSetLattice lattice = tight_sets(cut_fn, c_prime, tol_tight, 20);

  SimpleScheduleResult out;
  for (std::uint32_t mask : lattice.members) out.tight_cuts.push_back(CutSet{mask});

  // Lattice closure of the tight family.
  std::set<std::uint32_t> closure(lattice.members.begin(), lattice.members.end());
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<std::uint32_t> snapshot(closure.begin(), closure.end());
    for (std::size_t i = 0; i < snapshot.size(); ++i)
      for (std::size_t j = i + 1; j < snapshot.size(); ++j) {
        grew |= closure.insert(snapshot[i] | snapshot[j]).second;
        grew |= closure.insert(snapshot[i] & snapshot[j]).second;
      }
  }

  // Maximal chain from the minimal to the maximal member: repeatedly take the
  // smallest-cardinality strict superset (ties on mask value).
  std::vector<std::uint32_t> chain;
  if (!closure.empty()) {
    std::uint32_t cur = lattice.minimal;
    chain.push_back(cur);
    while (cur != lattice.maximal) {
      std::uint32_t next = lattice.maximal;
      for (std::uint32_t cand : closure) {
        if (cand == cur || (cand & cur) != cur) continue;
        if (std::popcount(cand) < std::popcount(next) ||
            (std::popcount(cand) == std::popcount(next) && cand < next))
          next = cand;
      }
      chain.push_back(next);
      cur = next;
    }
  }

  auto attempt = [&](const ChainPermutation& pi, SimpleScheduleResult& res) {
    const FPiMatrix f = build_f_pi(table, pi);
    P2Solution p2 = solve_p2(f);
    const Separation check = separate(table, p2.lambda, exhaustive_limit);
    if (check.min_value < c_prime - tol_accept) return false;
    res.schedule =
        prune_support(table, f, p2.lambda, c_prime, tol_accept, exhaustive_limit)
            .pruned();
    res.permutation = pi;
    res.tau = p2.tau;
    res.simple = res.schedule.is_simple(n);
    return res.simple;
  };

  if (attempt(permutation_through_chain(chain, n), out)) return out;

  // Fallback: enumerate permutations (small N) until one verifies.
  if (n <= 8) {
    ChainPermutation pi = ChainPermutation::identity(n);
    std::vector<int> order = pi.pi;
    do {
      pi.pi = order;
      SimpleScheduleResult trial;
      trial.tight_cuts = out.tight_cuts;
      if (attempt(pi, trial)) {
        trial.used_permutation_fallback = true;
        return trial;
      }
    } while (std::next_permutation(order.begin(), order.end()));
  }

  out.schedule = lambda_raw.pruned();
  out.permutation = permutation_through_chain(chain, n);
  out.tau = c_prime;
  out.simple = false;
  out.used_permutation_fallback = true;
  return out;
}

VerifyResult verify_schedule(const CutValueTable& table, const Schedule& lambda,
                             int exhaustive_limit) {
  const Separation sep = separate(table, lambda, exhaustive_limit);
  return VerifyResult{sep.min_value, sep.minimizer};
}

SolveResult solve(const CutValueTable& table, double tol, int exhaustive_limit) {
  SolveResult result = solve_saddle(table, tol, exhaustive_limit);
  SimpleScheduleResult simple =
      extract_simple_schedule(table, result.schedule, result.rate, tol);
  result.schedule = simple.schedule;
  result.simple = simple.simple;
  result.tight_cuts = simple.tight_cuts;
  result.permutation = simple.permutation;
  result.used_permutation_fallback = simple.used_permutation_fallback;
  const VerifyResult verify = verify_schedule(table, result.schedule, exhaustive_limit);
  result.min_cut_value_at_schedule = verify.achieved_rate;
  result.gap_to_master = result.rate - verify.achieved_rate;
  return result;
}

}  // namespace hdrelay
