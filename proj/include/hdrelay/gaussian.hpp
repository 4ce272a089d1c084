#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "hdrelay/core_model.hpp"
#include "hdrelay/scheduler.hpp"

namespace hdrelay {

/// Two-antenna single-relay line network: the source reaches only the relay
/// and the relay reaches only the destination (no direct link).
struct LineNetworkGains {
  std::complex<double> h_rs[2];  // source -> relay antennas 1,2
  std::complex<double> h_dr[2];  // relay antennas 1,2 -> destination

  /// All four gain magnitudes squared equal to gamma.
  static LineNetworkGains symmetric(double gamma);
};

/// NetworkSpec for the line network (N=1, m_relay={2}); Independent switching
/// gives the 4-state per-antenna model, Lockstep the 2-state one.
NetworkSpec line_network(const LineNetworkGains& g, Switching sw);

struct LineFixedPower {
  double c_case_i = 0.0;   // per-antenna switching, 4-state max-min LP
  Schedule lambda_i;       // its schedule (support-pruned)
  double c_case_ii = 0.0;  // both antennas switched together, closed form
  double lambda_ii = 0.5;  // listening fraction of the case-(ii) optimum
};

/// Unit-power-per-state rates of the line network. The transmit row of the
/// case-(i) table uses the coherent both-antennas entry (|h1|+|h2|)^2.
LineFixedPower line_fixed_power(const LineNetworkGains& g);

struct LineWaterfill {
  double c_case_i = 0.0;
  double lambda_star = 0.0;  // optimal total weight of the 01/10 states
  double c_case_ii = 0.0;
};

/// Rates with per-state water-filling power allocation. Case (i) restricts to
/// the symmetric family lambda_01 = lambda_10 = l/2, lambda_00 = lambda_11 =
/// (1-l)/2 and maximizes over l by grid search plus golden-section refinement;
/// case (ii) equates the listen/transmit expressions by bisection.
LineWaterfill line_waterfill(const LineNetworkGains& g, int grid = 200);

struct CrossoverPoint {
  double gamma = 0.0;  // gain where the one-state branch overtakes the two-state one
  double value = 0.0;  // common rate of the two branches at the crossing, in bits
};

/// Crossover of the symmetric line network where the one-state schedule
/// overtakes the two-state schedule, located by bisection on the gain axis.
CrossoverPoint line_case_i_crossover(double lo = 0.1, double hi = 2.0,
                                     double tol = 1e-6);

/// Parses the network JSON schema. Errors name the offending field path.
NetworkSpec parse_network(const std::string& json_text);
std::string serialize_network(const NetworkSpec& net);

/// Deterministic complex-Gaussian network: every channel entry has unit
/// variance, independent real/imaginary parts, fully determined by the seed.
NetworkSpec random_network(int n_relays, const std::vector<int>& m_relay,
                           std::uint64_t seed, int m_source = 1, int m_dest = 1,
                           Switching sw = Switching::Lockstep);

/// Noisy-network-coding lower bound at a fixed schedule: min over cuts of the
/// quantized cut value minus the per-antenna quantization penalty, clamped
/// at zero.
double nnc_rate(const NetworkSpec& net, const Schedule& lambda, double sigma2 = 1.0);

struct GapCertificate {
  double upper = 0.0;   // fixed-power max-min rate
  double lower = 0.0;   // best NNC rate found
  double bound = 0.0;   // 1.96 * total antenna count
  double sigma2 = 1.0;  // quantization noise variance of the lower bound
};

/// Certifies upper - lower <= bound; retries sigma2 in {0.5, 2} before
/// failing, and a failure carries the serialized witness network.
GapCertificate gap_certificate(const NetworkSpec& net, double tol = 1e-7);

struct SandwichReport {
  LineFixedPower fixed;
  LineWaterfill wf;
  double slack_low_i = 0.0;   // c_wf_i - (c_fixed_i - 1)
  double slack_high_i = 0.0;  // (c_fixed_i + 2) - c_wf_i
  double slack_low_ii = 0.0;
  double slack_high_ii = 0.0;
  bool ok = true;
};

/// Checks the water-filled rate lies within [fixed - 1, fixed + 2] bits for
/// both antenna policies; a violation throws with both values.
SandwichReport sandwich_check(const LineNetworkGains& g);

struct SweepRow {
  double gamma = 0.0;
  double c_fixed_i = 0.0;
  double c_fixed_ii = 0.0;
  double c_wf_i = 0.0;
  double c_wf_ii = 0.0;
  int active_states_i = 0;
};

/// Log-spaced symmetric-gamma sweep of the four line-network curves.
std::vector<SweepRow> sweep_line(double gamma_min, double gamma_max, int points);

/// CSV with header `gamma, c_fixed_i, c_fixed_ii, c_wf_i, c_wf_ii,
/// active_states_i` and 10-significant-digit values.
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace hdrelay
