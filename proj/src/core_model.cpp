#include "hdrelay/core_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

namespace hdrelay {

int NodeLayout::m_tot() const {
  return std::accumulate(m_relay.begin(), m_relay.end(), 0);
}

int NodeLayout::state_bits() const {
  return switching == Switching::Lockstep ? n_relays : m_tot();
}

int NodeLayout::relay_of_antenna(int j) const {
  int acc = 0;
  for (int k = 0; k < n_relays; ++k) {
    acc += m_relay[k];
    if (j < acc) return k;
  }
  throw InvalidInputError("antenna index out of range");
}

void NodeLayout::validate() const {
  if (n_relays < 1) throw InvalidInputError("n_relays must be >= 1");
  if (m_source < 1) throw InvalidInputError("m_source must be >= 1");
  if (m_dest < 1) throw InvalidInputError("m_dest must be >= 1");
  if (static_cast<int>(m_relay.size()) != n_relays)
    throw InvalidInputError("m_relay length must equal n_relays");
  for (int m : m_relay)
    if (m < 1) throw InvalidInputError("every relay antenna count must be >= 1");
  if (state_bits() > 30) throw InvalidInputError("state space too large");
}

void NetworkSpec::validate() const {
  layout.validate();
  const int rows = layout.m_tot() + layout.m_dest;
  const int cols = layout.m_tot() + layout.m_source;
  if (H.rows() != rows || H.cols() != cols) {
    std::ostringstream os;
    os << "channel matrix must be " << rows << "x" << cols << ", got "
       << H.rows() << "x" << H.cols();
    throw InvalidInputError(os.str());
  }
  if (!H.allFinite()) throw InvalidInputError("channel matrix has non-finite entries");
}

std::string RelayState::bit_string() const {
  std::string out(static_cast<std::size_t>(n_bits), '0');
  for (int j = 0; j < n_bits; ++j)
    if (transmits(j)) out[static_cast<std::size_t>(j)] = '1';
  return out;
}

int CutSet::cardinality() const { return std::popcount(mask); }

std::string CutSet::to_string(int n_relays) const {
  std::string out = "{";
  bool first = true;
  for (int k = 0; k < n_relays; ++k) {
    if (!contains(k)) continue;
    if (!first) out += ",";
    out += std::to_string(k + 1);
    first = false;
  }
  return out + "}";
}

Schedule Schedule::point_mass(std::size_t state, std::size_t num_states) {
  Schedule sched;
  sched.probs.assign(num_states, 0.0);
  sched.probs.at(state) = 1.0;
  return sched;
}

Schedule Schedule::uniform(std::size_t num_states) {
  Schedule sched;
  sched.probs.assign(num_states, 1.0 / static_cast<double>(num_states));
  return sched;
}

std::vector<std::size_t> Schedule::support(double eps) const {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < probs.size(); ++s)
    if (probs[s] > eps) out.push_back(s);
  return out;
}

bool Schedule::is_simple(int n_relays) const {
  return support().size() <= static_cast<std::size_t>(n_relays) + 1;
}

void Schedule::validate() const {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw InvalidInputError("schedule entries must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw InvalidInputError("schedule probabilities must sum to 1");
}

Schedule Schedule::pruned(double eps) const {
  Schedule out;
  out.probs.assign(probs.size(), 0.0);
  double sum = 0.0;
  for (std::size_t s = 0; s < probs.size(); ++s)
    if (probs[s] > eps) sum += probs[s];
  if (sum <= 0.0) return *this;
  for (std::size_t s = 0; s < probs.size(); ++s)
    if (probs[s] > eps) out.probs[s] = probs[s] / sum;
  return out;
}

namespace {

// Global antenna indices selected for the rows (listening, relay in A) and
// columns (transmitting, relay outside A) of the effective channel.
void select_antennas(const NodeLayout& layout, const RelayState& s, CutSet a,
                     std::vector<int>& row_antennas, std::vector<int>& col_antennas) {
  const int m_tot = layout.m_tot();
  for (int j = 0; j < m_tot; ++j) {
    const int relay = layout.relay_of_antenna(j);
    const int bit = layout.switching == Switching::Lockstep ? relay : j;
    const bool transmitting = s.transmits(bit);
    if (a.contains(relay)) {
      if (!transmitting) row_antennas.push_back(j);
    } else {
      if (transmitting) col_antennas.push_back(j);
    }
  }
}

}  // namespace

ComplexMatrix effective_channel(const NetworkSpec& net, const RelayState& s, CutSet a) {
  const NodeLayout& layout = net.layout;
  if (s.n_bits != layout.state_bits())
    throw InvalidInputError("state length does not match the network layout");
  if (s.index >> s.n_bits)
    throw InvalidInputError("state index exceeds the state space");
  if (a.mask >> layout.n_relays)
    throw InvalidInputError("cut mask exceeds the relay set");

  std::vector<int> rows, cols;
  select_antennas(layout, s, a, rows, cols);
  const int m_tot = layout.m_tot();
  for (int d = 0; d < layout.m_dest; ++d) rows.push_back(m_tot + d);
  for (int q = 0; q < layout.m_source; ++q) cols.push_back(m_tot + q);

  ComplexMatrix g(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          net.H(rows[i], cols[j]);
  return g;
}

double cut_value(const NetworkSpec& net, const RelayState& s, CutSet a) {
  if (!net.H.allFinite())
    throw InvalidInputError("channel matrix has non-finite entries");
  const ComplexMatrix g = effective_channel(net, s, a);
  if (g.rows() == 0 || g.cols() == 0) return 0.0;
  // log2 det(I + G G^H) via the Cholesky factor of the Hermitian PD matrix.
  ComplexMatrix m = ComplexMatrix::Identity(g.rows(), g.rows());
  m.noalias() += g * g.adjoint();
  Eigen::LLT<ComplexMatrix> llt(m);
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    logdet += 2.0 * std::log2(std::real(llt.matrixL()(i, i)));
  return logdet;
}

CutValueTable CutValueTable::from_network(NetworkSpec net) {
  net.validate();
  CutValueTable table;
  table.n_relays_ = net.layout.n_relays;
  table.state_bits_ = net.layout.state_bits();
  table.gaussian_ = true;
  table.net_ = std::move(net);
  const std::size_t entries = table.num_states() * table.num_cuts();
  table.eager_ = entries <= (std::size_t{1} << 20);
  if (table.eager_) {
    table.values_.assign(table.num_states(),
                         std::vector<double>(table.num_cuts(), 0.0));
    for (std::size_t s = 0; s < table.num_states(); ++s) {
      RelayState state{static_cast<std::uint32_t>(s), table.state_bits_};
      for (std::size_t a = 0; a < table.num_cuts(); ++a)
        table.values_[s][a] =
            cut_value(table.net_, state, CutSet{static_cast<std::uint32_t>(a)});
    }
  } else {
    table.cache_.assign(table.num_states(), {});
    table.cached_.assign(table.num_states(), {});
  }
  return table;
}

CutValueTable CutValueTable::from_values(int n_relays, int state_bits,
                                         std::vector<std::vector<double>> values) {
  CutValueTable table;
  table.n_relays_ = n_relays;
  table.state_bits_ = state_bits;
  table.gaussian_ = false;
  if (values.size() != table.num_states())
    throw InvalidInputError("value table must cover all states");
  for (const auto& row : values) {
    if (row.size() != table.num_cuts())
      throw InvalidInputError("value table must cover all cuts");
    for (double v : row)
      if (!std::isfinite(v) || v < 0.0)
        throw InvalidInputError("cut values must be finite and >= 0");
  }
  table.values_ = std::move(values);
  return table;
}

double CutValueTable::value(std::size_t state, CutSet a) const {
  if (state >= num_states()) throw InvalidInputError("state out of range");
  if (a.mask >= num_cuts()) throw InvalidInputError("cut out of range");
  if (eager_) return values_[state][a.mask];
  auto& row_cache = cache_[state];
  auto& row_flag = cached_[state];
  if (row_cache.empty()) {
    row_cache.assign(num_cuts(), 0.0);
    row_flag.assign(num_cuts(), false);
  }
  if (!row_flag[a.mask]) {
    RelayState s{static_cast<std::uint32_t>(state), state_bits_};
    row_cache[a.mask] = cut_value(net_, s, a);
    row_flag[a.mask] = true;
  }
  return row_cache[a.mask];
}

const NetworkSpec& CutValueTable::network() const {
  if (!gaussian_) throw InvalidInputError("table is not backed by a network");
  return net_;
}

double i_fix(const CutValueTable& table, const Schedule& lambda, CutSet a) {
  if (lambda.probs.size() != table.num_states())
    throw InvalidInputError("schedule dimension does not match the table");
  double acc = 0.0;
  for (std::size_t s = 0; s < lambda.probs.size(); ++s)
    if (lambda.probs[s] > 0.0) acc += lambda.probs[s] * table.value(s, a);
  return acc;
}

SubmodularityReport check_submodular(const CutValueTable& table, std::size_t state,
                                     int exhaustive_limit) {
  if (table.n_relays() > exhaustive_limit)
    throw RefusalError("check_submodular: too many relays for exhaustive pair check");
  const std::uint32_t num_cuts = static_cast<std::uint32_t>(table.num_cuts());
  SubmodularityReport report;
  for (std::uint32_t a1 = 0; a1 < num_cuts; ++a1) {
    const double v1 = table.value(state, CutSet{a1});
    for (std::uint32_t a2 = a1 + 1; a2 < num_cuts; ++a2) {
      const double slack = v1 + table.value(state, CutSet{a2}) -
                           table.value(state, CutSet{a1 | a2}) -
                           table.value(state, CutSet{a1 & a2});
      if (-slack > report.worst_violation) {
        report.worst_violation = -slack;
        report.witness_a1 = CutSet{a1};
        report.witness_a2 = CutSet{a2};
      }
    }
  }
  report.is_submodular = report.worst_violation <= 1e-9;
  return report;
}

}  // namespace hdrelay
