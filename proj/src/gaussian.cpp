#include "hdrelay/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "hdrelay/lp.hpp"
#include "json.hpp"

namespace hdrelay {

namespace {

double log2p(double x) { return x > 1.0 ? std::log2(x) : 0.0; }

double sq(std::complex<double> z) { return std::norm(z); }

// max_lambda min_k rows.row(k).dot(lambda) over the probability simplex.
P2Solution max_min_rows(const Eigen::MatrixXd& rows) {
  FPiMatrix f;
  f.pi = ChainPermutation::identity(static_cast<int>(rows.rows()) - 1);
  f.rows = rows;
  return solve_p2(f);
}

P2Solution max_min_rows_restricted(const Eigen::MatrixXd& rows,
                                   const std::vector<std::size_t>& states) {
  Eigen::MatrixXd sub(rows.rows(), static_cast<Eigen::Index>(states.size()));
  for (std::size_t j = 0; j < states.size(); ++j)
    sub.col(static_cast<Eigen::Index>(j)) =
        rows.col(static_cast<Eigen::Index>(states[j]));
  P2Solution inner = max_min_rows(sub);
  P2Solution out;
  out.tau = inner.tau;
  out.lp = inner.lp;
  out.lambda.probs.assign(static_cast<std::size_t>(rows.cols()), 0.0);
  for (std::size_t j = 0; j < states.size(); ++j)
    out.lambda.probs[states[j]] = inner.lambda.probs[j];
  return out;
}

// Minimal-support optimum: drop support states while the max-min value holds.
Schedule prune_rows_support(const Eigen::MatrixXd& rows, const Schedule& lambda,
                            double value, double tol) {
  std::vector<std::size_t> support = lambda.support();
  Schedule best = lambda;
  bool changed = true;
  while (changed && support.size() > 1) {
    changed = false;
    for (std::size_t i = 0; i < support.size(); ++i) {
      std::vector<std::size_t> trial = support;
      trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
      P2Solution restricted = max_min_rows_restricted(rows, trial);
      if (restricted.tau >= value - tol) {
        best = restricted.lambda;
        support = best.support();
        changed = true;
        break;
      }
    }
  }
  return best.pruned();
}

struct WfTerm {
  double weight;
  double gain;
};

// Water level nu with sum_k w_k (nu - 1/g_k)^+ = 1; the left side is
// piecewise-linear increasing, so bisection always brackets.
double water_level(const std::vector<WfTerm>& terms) {
  double total_weight = 0.0, max_inv_gain = 0.0;
  for (const WfTerm& t : terms) {
    if (t.weight <= 0.0 || t.gain <= 0.0) continue;
    total_weight += t.weight;
    max_inv_gain = std::max(max_inv_gain, 1.0 / t.gain);
  }
  if (total_weight <= 0.0) return 0.0;
  auto residual = [&](double nu) {
    double acc = -1.0;
    for (const WfTerm& t : terms)
      if (t.weight > 0.0 && t.gain > 0.0)
        acc += t.weight * std::max(0.0, nu - 1.0 / t.gain);
    return acc;
  };
  // The exact endpoint can round to a residual of -1e-16; widen it a touch.
  double lo = 0.0, hi = (1.0 / total_weight + max_inv_gain) * (1.0 + 1e-9) + 1e-12;
  if (residual(hi) < 0.0)
    throw ConvergenceError("water_level: bisection bracket failed", hi);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double waterfill_value(const std::vector<WfTerm>& terms) {
  const double nu = water_level(terms);
  double acc = 0.0;
  for (const WfTerm& t : terms)
    if (t.weight > 0.0 && t.gain > 0.0) acc += t.weight * log2p(nu * t.gain);
  return acc;
}

}  // namespace

LineNetworkGains LineNetworkGains::symmetric(double gamma) {
  const double g = std::sqrt(gamma);
  LineNetworkGains out;
  out.h_rs[0] = out.h_rs[1] = out.h_dr[0] = out.h_dr[1] = g;
  return out;
}

NetworkSpec line_network(const LineNetworkGains& g, Switching sw) {
  NetworkSpec net;
  net.layout.n_relays = 1;
  net.layout.m_source = 1;
  net.layout.m_relay = {2};
  net.layout.m_dest = 1;
  net.layout.switching = sw;
  net.H = ComplexMatrix::Zero(3, 3);
  net.H(0, 2) = g.h_rs[0];
  net.H(1, 2) = g.h_rs[1];
  net.H(2, 0) = g.h_dr[0];
  net.H(2, 1) = g.h_dr[1];
  net.validate();
  return net;
}

LineFixedPower line_fixed_power(const LineNetworkGains& g) {
  const double r1 = sq(g.h_rs[0]), r2 = sq(g.h_rs[1]);
  const double d1 = sq(g.h_dr[0]), d2 = sq(g.h_dr[1]);

  // States in index order 00, 10, 01, 11 (antenna 1 is the low bit). The
  // both-transmit entry is the coherent beamforming gain (|h1|+|h2|)^2.
  Eigen::MatrixXd rows(2, 4);
  const double coherent = std::pow(std::sqrt(d1) + std::sqrt(d2), 2);
  rows << 0.0, std::log2(1.0 + d1), std::log2(1.0 + d2), std::log2(1.0 + coherent),
      std::log2(1.0 + r1 + r2), std::log2(1.0 + r2), std::log2(1.0 + r1), 0.0;

  LineFixedPower out;
  const P2Solution p2 = max_min_rows(rows);
  out.c_case_i = p2.tau;
  out.lambda_i =
      prune_rows_support(rows, p2.lambda, p2.tau, 1e-9 * (std::abs(p2.tau) + 1.0));

  const double lr = std::log2(1.0 + r1 + r2);
  const double ld = std::log2(1.0 + coherent);
  if (lr + ld > 0.0) {
    out.c_case_ii = lr * ld / (lr + ld);
    out.lambda_ii = ld / (lr + ld);
  }
  if (out.c_case_i < out.c_case_ii - 1e-9)
    throw CertificateError("line_fixed_power: per-antenna switching fell below the "
                           "joint-switching rate");
  return out;
}

LineWaterfill line_waterfill(const LineNetworkGains& g, int grid) {
  if (grid < 100) throw InvalidInputError("line_waterfill: grid resolution < 100");
  const double r1 = sq(g.h_rs[0]), r2 = sq(g.h_rs[1]);
  const double d1 = sq(g.h_dr[0]), d2 = sq(g.h_dr[1]);

  // Symmetric schedule family lambda_01 = lambda_10 = l/2, lambda_00 =
  // lambda_11 = (1-l)/2, with per-state water-filling on each side.
  auto value_at = [&](double l) {
    const double half = 0.5 * (1.0 - l);
    const double i0 = waterfill_value({{0.5 * l, d2}, {0.5 * l, d1}, {half, d1 + d2}});
    const double i1 = waterfill_value({{half, r1 + r2}, {0.5 * l, r1}, {0.5 * l, r2}});
    return std::min(i0, i1);
  };

  LineWaterfill out;
  double best_l = 0.0, best_v = -1.0;
  for (int k = 0; k < grid; ++k) {
    const double l = static_cast<double>(k) / (grid - 1);
    const double v = value_at(l);
    if (v > best_v) {
      best_v = v;
      best_l = l;
    }
  }
  // Golden-section refinement around the best grid point.
  {
    const double step = 1.0 / (grid - 1);
    double a = std::max(0.0, best_l - step), b = std::min(1.0, best_l + step);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = value_at(x1), f2 = value_at(x2);
    while (b - a > 1e-8) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + phi * (b - a);
        f2 = value_at(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - phi * (b - a);
        f1 = value_at(x1);
      }
    }
    best_l = 0.5 * (a + b);
    best_v = std::max(best_v, value_at(best_l));
  }
  out.c_case_i = best_v;
  out.lambda_star = best_l;

  // Joint switching: t log2(1 + R/t) rises, (1-t) log2(1 + D/(1-t)) falls;
  // the max-min sits at the crossing.
  const double cap_r = r1 + r2, cap_d = d1 + d2;
  if (cap_r > 0.0 && cap_d > 0.0) {
    auto diff = [&](double t) {
      return t * std::log2(1.0 + cap_r / t) -
             (1.0 - t) * std::log2(1.0 + cap_d / (1.0 - t));
    };
    double lo = 1e-12, hi = 1.0 - 1e-12;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (diff(mid) < 0.0 ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    out.c_case_ii = t * std::log2(1.0 + cap_r / t);
  }
  return out;
}

CrossoverPoint line_case_i_crossover(double lo, double hi, double tol) {
  auto diff = [](double gamma) {
    const double l2 = std::log2(1.0 + 2.0 * gamma);
    const double l4 = std::log2(1.0 + 4.0 * gamma);
    return std::log2(1.0 + gamma) - l2 * l4 / (l2 + l4);
  };
  if (diff(lo) >= 0.0 || diff(hi) <= 0.0)
    throw InvalidInputError("line_case_i_crossover: bracket does not straddle the root");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (diff(mid) < 0.0 ? lo : hi) = mid;
  }
  CrossoverPoint out;
  out.gamma = 0.5 * (lo + hi);
  out.value = std::log2(1.0 + out.gamma);
  return out;
}

namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw InvalidInputError(path + ": " + what);
}

int require_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) field_error(path, "expected an integer");
  return j.get<int>();
}

}  // namespace

NetworkSpec parse_network(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidInputError(std::string("network JSON: ") + e.what());
  }
  for (const char* key : {"n_relays", "m_source", "m_relay", "m_dest", "switching", "H"})
    if (!j.contains(key)) field_error(key, "missing field");

  NetworkSpec net;
  net.layout.n_relays = require_int(j["n_relays"], "n_relays");
  net.layout.m_source = require_int(j["m_source"], "m_source");
  net.layout.m_dest = require_int(j["m_dest"], "m_dest");
  if (!j["m_relay"].is_array()) field_error("m_relay", "expected an array");
  for (std::size_t k = 0; k < j["m_relay"].size(); ++k)
    net.layout.m_relay.push_back(
        require_int(j["m_relay"][k], "m_relay[" + std::to_string(k) + "]"));
  const std::string sw = j["switching"].is_string() ? j["switching"].get<std::string>()
                                                    : std::string();
  if (sw == "lockstep")
    net.layout.switching = Switching::Lockstep;
  else if (sw == "independent")
    net.layout.switching = Switching::Independent;
  else
    field_error("switching", "expected \"lockstep\" or \"independent\"");
  net.layout.validate();

  const int nrows = net.layout.m_dest + net.layout.m_tot();
  const int ncols = net.layout.m_source + net.layout.m_tot();
  if (!j["H"].is_array() || static_cast<int>(j["H"].size()) != nrows)
    field_error("H", "expected " + std::to_string(nrows) + " rows");
  net.H = ComplexMatrix::Zero(nrows, ncols);
  for (int r = 0; r < nrows; ++r) {
    const json& row = j["H"][static_cast<std::size_t>(r)];
    const std::string rpath = "H[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != ncols)
      field_error(rpath, "expected " + std::to_string(ncols) + " entries");
    for (int c = 0; c < ncols; ++c) {
      const json& cell = row[static_cast<std::size_t>(c)];
      const std::string cpath = rpath + "[" + std::to_string(c) + "]";
      if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() ||
          !cell[1].is_number())
        field_error(cpath, "expected a [re, im] pair");
      const double re = cell[0].get<double>(), im = cell[1].get<double>();
      if (!std::isfinite(re) || !std::isfinite(im))
        field_error(cpath, "non-finite entry");
      net.H(r, c) = std::complex<double>(re, im);
    }
  }
  net.validate();
  return net;
}

std::string serialize_network(const NetworkSpec& net) {
  json j;
  j["n_relays"] = net.layout.n_relays;
  j["m_source"] = net.layout.m_source;
  j["m_relay"] = net.layout.m_relay;
  j["m_dest"] = net.layout.m_dest;
  j["switching"] =
      net.layout.switching == Switching::Lockstep ? "lockstep" : "independent";
  json rows = json::array();
  for (Eigen::Index r = 0; r < net.H.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < net.H.cols(); ++c)
      row.push_back({net.H(r, c).real(), net.H(r, c).imag()});
    rows.push_back(std::move(row));
  }
  j["H"] = std::move(rows);
  return j.dump(2) + "\n";
}

NetworkSpec random_network(int n_relays, const std::vector<int>& m_relay,
                           std::uint64_t seed, int m_source, int m_dest,
                           Switching sw) {
  NetworkSpec net;
  net.layout.n_relays = n_relays;
  net.layout.m_source = m_source;
  net.layout.m_relay = m_relay;
  net.layout.m_dest = m_dest;
  net.layout.switching = sw;
  net.layout.validate();

  std::mt19937_64 rng(seed);
  // Box-Muller on explicit 53-bit uniforms keeps the stream identical across
  // standard-library implementations.
  auto uniform = [&rng]() {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  };
  auto normal_pair = [&]() {
    const double u1 = uniform(), u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return std::complex<double>(r * std::cos(2.0 * M_PI * u2),
                                r * std::sin(2.0 * M_PI * u2));
  };
  const int nrows = m_dest + net.layout.m_tot();
  const int ncols = m_source + net.layout.m_tot();
  net.H = ComplexMatrix::Zero(nrows, ncols);
  for (int r = 0; r < nrows; ++r)
    for (int c = 0; c < ncols; ++c)
      net.H(r, c) = normal_pair() / std::sqrt(2.0);  // unit-variance complex
  net.validate();
  return net;
}

namespace {

// log2 det(I + scale * G G^H) via Cholesky; Hermitian positive definite.
double scaled_logdet(const ComplexMatrix& g, double scale) {
  const Eigen::Index m = g.rows();
  if (m == 0 || g.cols() == 0) return 0.0;
  ComplexMatrix a = ComplexMatrix::Identity(m, m) + scale * g * g.adjoint();
  Eigen::LLT<ComplexMatrix> llt(a);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    acc += 2.0 * std::log2(llt.matrixL()(i, i).real());
  return acc;
}

}  // namespace

double nnc_rate(const NetworkSpec& net, const Schedule& lambda, double sigma2) {
  if (!(sigma2 > 0.0)) throw InvalidInputError("nnc_rate: sigma2 must be positive");
  const double scale = 1.0 / (1.0 + sigma2);
  const double penalty_per_antenna = std::log2(1.0 + 1.0 / sigma2);
  const int n = net.layout.n_relays;
  const int bits = net.layout.state_bits();
  const std::vector<std::size_t> support = lambda.support();

  double worst = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const CutSet a{mask};
    double flow = 0.0;
    for (std::size_t s : support) {
      const RelayState state{static_cast<std::uint32_t>(s), bits};
      flow += lambda.probs[s] * scaled_logdet(effective_channel(net, state, a), scale);
    }
    // Quantization penalty: one term per receive antenna of the relays that
    // stay on the source side of the cut.
    int penalized = 0;
    for (int k = 0; k < n; ++k)
      if (!a.contains(k)) penalized += net.layout.m_relay[static_cast<std::size_t>(k)];
    worst = std::min(worst, flow - penalized * penalty_per_antenna);
  }
  return std::max(0.0, worst);
}

GapCertificate gap_certificate(const NetworkSpec& net, double tol) {
  const CutValueTable table = CutValueTable::from_network(net);
  const SolveResult upper = solve_saddle(table, tol);
  const Schedule uniform = Schedule::uniform(table.num_states());

  GapCertificate cert;
  cert.upper = upper.rate;
  cert.bound = 1.96 * (net.layout.m_source + net.layout.m_tot() + net.layout.m_dest);
  cert.lower = std::max(nnc_rate(net, upper.schedule, 1.0), nnc_rate(net, uniform, 1.0));
  cert.sigma2 = 1.0;
  if (cert.upper - cert.lower > cert.bound) {
    for (double sigma2 : {0.5, 2.0}) {
      const double lower =
          std::max(nnc_rate(net, upper.schedule, sigma2), nnc_rate(net, uniform, sigma2));
      if (lower > cert.lower) {
        cert.lower = lower;
        cert.sigma2 = sigma2;
      }
    }
  }
  if (cert.upper - cert.lower > cert.bound)
    throw CertificateError("gap certificate failed: upper " + std::to_string(cert.upper) +
                           " lower " + std::to_string(cert.lower) + " bound " +
                           std::to_string(cert.bound) + " on network\n" +
                           serialize_network(net));
  return cert;
}

SandwichReport sandwich_check(const LineNetworkGains& g) {
  SandwichReport rep;
  rep.fixed = line_fixed_power(g);
  rep.wf = line_waterfill(g);
  rep.slack_low_i = rep.wf.c_case_i - (rep.fixed.c_case_i - 1.0);
  rep.slack_high_i = (rep.fixed.c_case_i + 2.0) - rep.wf.c_case_i;
  rep.slack_low_ii = rep.wf.c_case_ii - (rep.fixed.c_case_ii - 1.0);
  rep.slack_high_ii = (rep.fixed.c_case_ii + 2.0) - rep.wf.c_case_ii;
  rep.ok = rep.slack_low_i >= 0.0 && rep.slack_high_i >= 0.0 &&
           rep.slack_low_ii >= 0.0 && rep.slack_high_ii >= 0.0;
  if (!rep.ok)
    throw CertificateError(
        "water-filling rate escaped the fixed-power bracket: fixed_i " +
        std::to_string(rep.fixed.c_case_i) + " wf_i " + std::to_string(rep.wf.c_case_i) +
        " fixed_ii " + std::to_string(rep.fixed.c_case_ii) + " wf_ii " +
        std::to_string(rep.wf.c_case_ii));
  return rep;
}

std::vector<SweepRow> sweep_line(double gamma_min, double gamma_max, int points) {
  if (!(gamma_min > 0.0) || !(gamma_max > gamma_min) || points < 2)
    throw InvalidInputError("sweep_line: need 0 < gamma_min < gamma_max, points >= 2");
  std::vector<SweepRow> rows;
  rows.reserve(static_cast<std::size_t>(points));
  const double ratio = gamma_max / gamma_min;
  for (int k = 0; k < points; ++k) {
    const double gamma =
        gamma_min * std::pow(ratio, static_cast<double>(k) / (points - 1));
    const LineNetworkGains g = LineNetworkGains::symmetric(gamma);
    const LineFixedPower fixed = line_fixed_power(g);
    const LineWaterfill wf = line_waterfill(g);
    SweepRow row;
    row.gamma = gamma;
    row.c_fixed_i = fixed.c_case_i;
    row.c_fixed_ii = fixed.c_case_ii;
    row.c_wf_i = wf.c_case_i;
    row.c_wf_ii = wf.c_case_ii;
    row.active_states_i = static_cast<int>(fixed.lambda_i.support().size());
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "gamma,c_fixed_i,c_fixed_ii,c_wf_i,c_wf_ii,active_states_i\n";
  char buf[192];
  for (const SweepRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%.10g,%.10g,%d\n", r.gamma,
                  r.c_fixed_i, r.c_fixed_ii, r.c_wf_i, r.c_wf_ii, r.active_states_i);
    out += buf;
  }
  return out;
}

}  // namespace hdrelay
