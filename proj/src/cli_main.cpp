// Command-line driver: solve / oracle / sweep-line / verify / gen-random.
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hdrelay/gaussian.hpp"
#include "hdrelay/lp.hpp"
#include "hdrelay/scheduler.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;
using namespace hdrelay;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitCertificate = 2;
constexpr int kExitRefusal = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot write " + out_path);
  out << text;
}

json schedule_to_json(const Schedule& schedule, int state_bits) {
  json arr = json::array();
  for (std::size_t s : schedule.support())
    arr.push_back({{"state_bits",
                    RelayState{static_cast<std::uint32_t>(s), state_bits}.bit_string()},
                   {"prob", schedule.probs[s]}});
  return arr;
}

int cmd_solve(const std::string& input, double tol, const std::string& out_path) {
  const NetworkSpec net = parse_network(read_file(input));
  const CutValueTable table = CutValueTable::from_network(net);
  const SolveResult result = solve(table, tol);

  json cuts = json::array();
  for (CutSet a : result.tight_cuts) cuts.push_back(a.to_string(net.layout.n_relays));
  json j{{"rate_bits", result.rate},
         {"schedule", schedule_to_json(result.schedule, net.layout.state_bits())},
         {"simple", result.simple},
         {"tight_cuts", std::move(cuts)},
         {"iterations", result.iterations},
         {"certificate",
          {{"min_cut_value", result.min_cut_value_at_schedule},
           {"gap_to_master", result.gap_to_master},
           {"worst_cut",
            verify_schedule(table, result.schedule).worst_cut.to_string(
                net.layout.n_relays)}}}};
  write_output(out_path, j.dump(2) + "\n");
  if (result.gap_to_master > 10.0 * tol * (std::abs(result.rate) + 1.0)) {
    std::cerr << "certificate failure: schedule achieves "
              << result.min_cut_value_at_schedule << " < rate " << result.rate << "\n";
    return kExitCertificate;
  }
  return kExitOk;
}

int cmd_oracle(const std::string& input, const std::string& out_path) {
  const NetworkSpec net = parse_network(read_file(input));
  if (net.layout.n_relays > 10)
    throw RefusalError("oracle refuses networks with more than 10 relays");
  const CutValueTable table = CutValueTable::from_network(net);
  const FullLpSolution exact = solve_full_lp(table);
  const SolveResult solver = solve_saddle(table);
  const bool matches = std::abs(exact.c_prime - solver.rate) <= 1e-6;
  json j{{"c_prime_exact", exact.c_prime},
         {"solver_rate", solver.rate},
         {"matches_solver", matches}};
  write_output(out_path, j.dump(2) + "\n");
  return matches ? kExitOk : kExitCertificate;
}

int cmd_sweep_line(double gamma_min, double gamma_max, int points,
                   const std::string& out_path) {
  write_output(out_path, sweep_csv(sweep_line(gamma_min, gamma_max, points)));
  return kExitOk;
}

std::vector<int> antenna_counts(const std::vector<int>& antennas, int n) {
  if (antennas.empty()) return std::vector<int>(static_cast<std::size_t>(n), 1);
  if (antennas.size() == 1)
    return std::vector<int>(static_cast<std::size_t>(n), antennas[0]);
  if (static_cast<int>(antennas.size()) != n)
    throw InvalidInputError("--antennas needs 1 value or one per relay");
  return antennas;
}

int cmd_gen_random(int n, const std::vector<int>& antennas, std::uint64_t seed,
                   const std::string& switching, const std::string& out_path) {
  if (n < 1) throw InvalidInputError("--n must be at least 1");
  Switching sw;
  if (switching == "lockstep")
    sw = Switching::Lockstep;
  else if (switching == "independent")
    sw = Switching::Independent;
  else
    throw InvalidInputError("--switching must be lockstep or independent");
  const NetworkSpec net = random_network(n, antenna_counts(antennas, n), seed, 1, 1, sw);
  write_output(out_path, serialize_network(net));
  return kExitOk;
}

int cmd_verify(const std::string& suite, int n, int trials, std::uint64_t seed,
               const std::string& out_path) {
  int failures = 0;
  std::string witness;

  for (int t = 0; t < trials && failures == 0; ++t) {
    const std::uint64_t trial_seed = seed * 1000003ULL + static_cast<std::uint64_t>(t);
    if (suite == "submodularity") {
      // Alternate single-antenna lockstep and multi-antenna independent nets.
      const bool multi = (t % 2) == 1;
      std::vector<int> antennas(static_cast<std::size_t>(n), 1);
      if (multi && n >= 1) antennas[0] = 2;
      const NetworkSpec net =
          random_network(n, antennas, trial_seed, 1, 1,
                         multi ? Switching::Independent : Switching::Lockstep);
      const CutValueTable table = CutValueTable::from_network(net);
      for (std::size_t s = 0; s < table.num_states(); ++s) {
        const SubmodularityReport rep = check_submodular(table, s);
        if (!rep.is_submodular) {
          ++failures;
          witness = serialize_network(net);
          break;
        }
      }
    } else if (suite == "gap") {
      const NetworkSpec net =
          random_network(n, std::vector<int>(static_cast<std::size_t>(n), 1),
                         trial_seed);
      try {
        gap_certificate(net);
      } catch (const CertificateError& e) {
        ++failures;
        witness = e.what();
      }
    } else if (suite == "sparsity") {
      if (n > 8) throw RefusalError("sparsity suite limited to 8 relays");
      const NetworkSpec net =
          random_network(n, std::vector<int>(static_cast<std::size_t>(n), 1),
                         trial_seed);
      const CutValueTable table = CutValueTable::from_network(net);
      const SolveResult result = solve(table, 1e-7);
      const VerifyResult check = verify_schedule(table, result.schedule);
      if (!result.schedule.is_simple(n) || check.achieved_rate < result.rate - 1e-6) {
        ++failures;
        witness = serialize_network(net);
      }
    } else {
      throw InvalidInputError("unknown suite " + suite);
    }
  }

  json j{{"suite", suite}, {"n", n}, {"trials", trials}, {"failures", failures}};
  std::cout << j.dump(2) << "\n";
  if (failures > 0) {
    const std::string path = out_path.empty() ? "witness.json" : out_path;
    write_output(path, witness);
    std::cerr << "witness written to " << path << "\n";
    return kExitCertificate;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Half-duplex relay schedule solver"};
  app.require_subcommand(1);

  std::string input, out_path, switching = "lockstep", suite;
  double tol = 1e-7, gamma_min = 0.1, gamma_max = 10.0;
  int points = 50, n = 2, trials = 100;
  std::uint64_t seed = 1;
  std::vector<int> antennas;

  CLI::App* solve_cmd = app.add_subcommand("solve", "Best simple schedule and rate");
  solve_cmd->add_option("input", input, "network JSON file")->required();
  solve_cmd->add_option("--tol", tol, "convergence tolerance");
  solve_cmd->add_option("--out", out_path, "output JSON path (default stdout)");

  CLI::App* oracle_cmd = app.add_subcommand("oracle", "Exact full-LP cross-check");
  oracle_cmd->add_option("input", input, "network JSON file")->required();
  oracle_cmd->add_option("--out", out_path, "output JSON path (default stdout)");

  CLI::App* sweep_cmd = app.add_subcommand("sweep-line", "Symmetric line-network sweep");
  sweep_cmd->add_option("--gamma-min", gamma_min, "smallest gain");
  sweep_cmd->add_option("--gamma-max", gamma_max, "largest gain");
  sweep_cmd->add_option("--points", points, "number of log-spaced points");
  sweep_cmd->add_option("--out", out_path, "output CSV path (default stdout)");

  CLI::App* verify_cmd = app.add_subcommand("verify", "Property suites on random nets");
  verify_cmd->add_option("--suite", suite, "submodularity|gap|sparsity")->required();
  verify_cmd->add_option("--n", n, "number of relays");
  verify_cmd->add_option("--trials", trials, "number of random instances");
  verify_cmd->add_option("--seed", seed, "base seed");
  verify_cmd->add_option("--out", out_path, "witness path on failure");

  CLI::App* gen_cmd = app.add_subcommand("gen-random", "Random network file");
  gen_cmd->add_option("--n", n, "number of relays")->required();
  gen_cmd->add_option("--antennas", antennas, "antennas per relay (1 value or per relay)");
  gen_cmd->add_option("--seed", seed, "generator seed");
  gen_cmd->add_option("--switching", switching, "lockstep|independent");
  gen_cmd->add_option("--out", out_path, "output JSON path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) return cmd_solve(input, tol, out_path);
    if (oracle_cmd->parsed()) return cmd_oracle(input, out_path);
    if (sweep_cmd->parsed())
      return cmd_sweep_line(gamma_min, gamma_max, points, out_path);
    if (verify_cmd->parsed()) return cmd_verify(suite, n, trials, seed, out_path);
    if (gen_cmd->parsed())
      return cmd_gen_random(n, antennas, seed, switching, out_path);
  } catch (const RefusalError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitRefusal;
  } catch (const CertificateError& e) {
    std::cerr << "certificate failure: " << e.what() << "\n";
    return kExitCertificate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
