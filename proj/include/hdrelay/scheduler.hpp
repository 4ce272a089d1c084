#pragma once

#include <vector>

#include "hdrelay/core_model.hpp"
#include "hdrelay/lp.hpp"
#include "hdrelay/submodular.hpp"

namespace hdrelay {

struct IterationRecord {
  double master_value = 0.0;
  CutSet violated_cut;
  double violation = 0.0;  // master_value - separation minimum, 0 at convergence
};

struct SolveResult {
  double rate = 0.0;  // C' in bits per channel use
  Schedule schedule;  // simple unless simple == false
  bool simple = true;
  std::vector<CutSet> tight_cuts;
  ChainPermutation permutation;  // permutation of the final chain LP
  int iterations = 0;
  std::vector<IterationRecord> trace;
  double min_cut_value_at_schedule = 0.0;
  double gap_to_master = 0.0;
  bool used_permutation_fallback = false;
};

/// Constraint-generation saddle solve of max_lambda min_A i_fix(lambda, A):
/// alternates an LP master over a working set of cuts with a submodular
/// separation minimization, growing the working set until no cut is violated
/// by more than tol. Terminates after at most 2^N generated cuts.
SolveResult solve_saddle(const CutValueTable& table, double tol = 1e-7,
                         int exhaustive_limit = 12);

struct SimpleScheduleResult {
  Schedule schedule;
  ChainPermutation permutation;
  double tau = 0.0;
  bool simple = true;
  bool used_permutation_fallback = false;
  std::vector<CutSet> tight_cuts;
};

/// Rebuilds a simple (support <= N+1) schedule achieving C' - tol from any
/// optimal lambda: reads the tight-cut lattice at level C', threads a chain
/// through it, extends the chain to a permutation, and re-solves the chain LP.
/// Falls back to permutation enumeration (N <= 8), and as a last resort
/// returns lambda_raw flagged non-simple.
SimpleScheduleResult extract_simple_schedule(const CutValueTable& table,
                                             const Schedule& lambda_raw,
                                             double c_prime, double tol);

struct VerifyResult {
  double achieved_rate = 0.0;
  CutSet worst_cut;
};

/// min_A i_fix(lambda, A) with a minimizing cut.
VerifyResult verify_schedule(const CutValueTable& table, const Schedule& lambda,
                             int exhaustive_limit = 12);

/// End-to-end solve: saddle point then simple-schedule extraction.
SolveResult solve(const CutValueTable& table, double tol = 1e-7,
                  int exhaustive_limit = 12);

}  // namespace hdrelay
