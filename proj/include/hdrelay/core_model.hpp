#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "hdrelay/errors.hpp"

namespace hdrelay {

using ComplexMatrix = Eigen::MatrixXcd;

enum class Switching { Lockstep, Independent };

/// Antenna layout of a half-duplex N-relay network. With Lockstep switching
/// every antenna of a relay shares the relay's listen/transmit bit and the
/// state space has 2^N states; with Independent switching each relay antenna
/// carries its own bit, for 2^(m_tot) states.
struct NodeLayout {
  int n_relays = 0;
  int m_source = 1;
  std::vector<int> m_relay;
  int m_dest = 1;
  Switching switching = Switching::Lockstep;

  int m_tot() const;
  /// Length of a state bit vector: N (Lockstep) or m_tot (Independent).
  int state_bits() const;
  std::size_t num_states() const { return std::size_t{1} << state_bits(); }
  std::size_t num_cuts() const { return std::size_t{1} << n_relays; }
  /// Relay owning global antenna index j in [0, m_tot).
  int relay_of_antenna(int j) const;
  void validate() const;
};

/// Network channel. Row order: relay antennas (relay 1 first) then destination
/// antennas; column order: relay antennas then source antennas. The diagonal
/// relay-to-itself blocks are never read: an HD relay cannot hear itself.
struct NetworkSpec {
  NodeLayout layout;
  ComplexMatrix H;  // (m_dest + m_tot) x (m_source + m_tot)

  void validate() const;
};

/// Joint listen/transmit configuration. Bit j = 1 means relay/antenna j+1
/// transmits; bit j = 0 means it listens. The index is the plain binary value
/// with relay/antenna 1 in the least significant bit.
struct RelayState {
  std::uint32_t index = 0;
  int n_bits = 0;

  bool transmits(int bit) const { return (index >> bit) & 1u; }
  /// Bits printed with relay/antenna 1 first, e.g. index 2 with 2 bits -> "01".
  std::string bit_string() const;
};

/// Subset of relays grouped with the destination side of a cut. Cuts always
/// index relays, never individual antennas.
struct CutSet {
  std::uint32_t mask = 0;

  bool contains(int relay_bit) const { return (mask >> relay_bit) & 1u; }
  int cardinality() const;
  std::string to_string(int n_relays) const;  // e.g. "{1,3}"
};

constexpr double kSupportEpsilon = 1e-9;
constexpr double kProbSumTol = 1e-12;

/// Probability mass function over relay states.
struct Schedule {
  std::vector<double> probs;

  static Schedule point_mass(std::size_t state, std::size_t num_states);
  static Schedule uniform(std::size_t num_states);

  std::vector<std::size_t> support(double eps = kSupportEpsilon) const;
  bool is_simple(int n_relays) const;
  void validate() const;
  /// Zeroes entries below eps and renormalizes.
  Schedule pruned(double eps = kSupportEpsilon) const;
};

/// Submatrix of H seen across cut A in state s: rows are the listening
/// antennas of relays in A followed by the destination antennas; columns are
/// the transmitting antennas of relays outside A followed by the source
/// antennas.
ComplexMatrix effective_channel(const NetworkSpec& net, const RelayState& s, CutSet a);

/// Per-state cut value log2 det(I + G G^H) in bits per channel use, with unit
/// power per transmit antenna and independent inputs (identity covariance).
double cut_value(const NetworkSpec& net, const RelayState& s, CutSet a);

/// f_s(A) for all states s and relay cuts A. Eagerly materialized for small
/// state spaces, lazily memoized above that.
class CutValueTable {
 public:
  static CutValueTable from_network(NetworkSpec net);
  /// values[state][cut_mask]; state_bits distinguishes per-antenna states.
  static CutValueTable from_values(int n_relays, int state_bits,
                                   std::vector<std::vector<double>> values);

  double value(std::size_t state, CutSet a) const;
  int n_relays() const { return n_relays_; }
  int state_bits() const { return state_bits_; }
  std::size_t num_states() const { return std::size_t{1} << state_bits_; }
  std::size_t num_cuts() const { return std::size_t{1} << n_relays_; }
  bool is_gaussian() const { return gaussian_; }
  const NetworkSpec& network() const;

 private:
  CutValueTable() = default;

  int n_relays_ = 0;
  int state_bits_ = 0;
  bool gaussian_ = false;
  NetworkSpec net_;
  bool eager_ = true;
  std::vector<std::vector<double>> values_;  // [state][cut]
  mutable std::vector<std::vector<double>> cache_;
  mutable std::vector<std::vector<bool>> cached_;
};

/// I_A^(fix)(lambda) = sum_s lambda_s f_s(A), evaluated over the support only.
double i_fix(const CutValueTable& table, const Schedule& lambda, CutSet a);

struct SubmodularityReport {
  bool is_submodular = true;
  double worst_violation = 0.0;  // max of -(slack), 0 if none
  CutSet witness_a1, witness_a2;
};

/// Tests f(A1)+f(A2) >= f(A1 u A2)+f(A1 n A2) over all unordered cut pairs
/// for a fixed state. Slack below -1e-9 counts as a violation.
SubmodularityReport check_submodular(const CutValueTable& table, std::size_t state,
                                     int exhaustive_limit = 12);

}  // namespace hdrelay
