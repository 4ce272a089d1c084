#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "hdrelay/gaussian.hpp"
#include "hdrelay/scheduler.hpp"

using namespace hdrelay;

namespace {

LineNetworkGains crossing_links(double gamma) {
  LineNetworkGains g;
  g.h_rs[0] = std::sqrt(gamma);
  g.h_rs[1] = 0.0;
  g.h_dr[0] = 0.0;
  g.h_dr[1] = std::sqrt(gamma);
  return g;
}

}  // namespace

TEST_CASE("network json parsing and round trip") {
  const NetworkSpec net = line_network(LineNetworkGains::symmetric(2.0),
                                       Switching::Independent);
  const std::string text = serialize_network(net);
  const NetworkSpec back = parse_network(text);
  CHECK(back.layout.num_states() == 4);
  CHECK((back.H - net.H).cwiseAbs().maxCoeff() == 0.0);

  NetworkSpec lock = net;
  lock.layout.switching = Switching::Lockstep;
  CHECK(parse_network(serialize_network(lock)).layout.num_states() == 2);

  // Truncated H: drop the last row and expect the error to name the field.
  std::string bad = text;
  const auto pos = bad.rfind("],");
  (void)pos;
  try {
    parse_network(R"({"n_relays":1,"m_source":1,"m_relay":[2],"m_dest":1,
                      "switching":"independent","H":[[[0,0],[0,0],[1,0]]]})");
    FAIL("expected a parse error");
  } catch (const InvalidInputError& e) {
    CHECK(std::string(e.what()).find("H") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_network("{\"n_relays\":1}"), InvalidInputError);
}

TEST_CASE("fixed-power line rates: crossing links") {
  const LineFixedPower fp = line_fixed_power(crossing_links(3.0));
  CHECK(fp.c_case_i == doctest::Approx(2.0).epsilon(1e-9));
  REQUIRE(fp.lambda_i.support() == std::vector<std::size_t>{2});  // state "01"
  CHECK(fp.c_case_ii == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fp.lambda_ii == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("fixed-power line rates: symmetric gains") {
  const LineFixedPower at1 = line_fixed_power(LineNetworkGains::symmetric(1.0));
  CHECK(at1.c_case_i == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(at1.lambda_i.support().size() == 1);

  const LineFixedPower at_half = line_fixed_power(LineNetworkGains::symmetric(0.5));
  const double expect = std::log2(3.0) / (1.0 + std::log2(3.0));
  CHECK(at_half.c_case_i == doctest::Approx(expect).epsilon(1e-9));
  CHECK(at_half.lambda_i.support() == std::vector<std::size_t>{0, 3});

  for (double gamma : {0.1, 0.7, 2.0, 9.0}) {
    const LineFixedPower fp = line_fixed_power(LineNetworkGains::symmetric(gamma));
    CHECK(fp.c_case_i >= fp.c_case_ii - 1e-9);
  }
}

TEST_CASE("pre-log doubling at high gain") {
  for (double gamma : {1e2, 1e4, 1e6}) {
    const LineFixedPower fp = line_fixed_power(crossing_links(gamma));
    const double ratio = fp.c_case_i / fp.c_case_ii;
    if (gamma == 1e6) CHECK(ratio == doctest::Approx(2.0).epsilon(0.05));
    CHECK(ratio > 1.0);
  }
}

TEST_CASE("water-filling closed forms and ordering") {
  const LineWaterfill wf = line_waterfill(LineNetworkGains::symmetric(1.0));
  CHECK(wf.c_case_ii == doctest::Approx(0.5 * std::log2(5.0)).epsilon(1e-8));
  for (double gamma : {0.1, 0.5, 2.0, 10.0}) {
    const LineWaterfill w = line_waterfill(LineNetworkGains::symmetric(gamma));
    CHECK(w.c_case_i >= w.c_case_ii - 1e-9);
    CHECK(w.c_case_ii ==
          doctest::Approx(0.5 * std::log2(1.0 + 4.0 * gamma)).epsilon(1e-8));
  }
  CHECK_THROWS_AS(line_waterfill(LineNetworkGains::symmetric(1.0), 50),
                  InvalidInputError);
}

TEST_CASE("branch crossover location and level") {
  const CrossoverPoint cp = line_case_i_crossover();
  CHECK(cp.gamma == doctest::Approx(0.68401).epsilon(1e-3));
  CHECK(cp.value == doctest::Approx(0.752).epsilon(0.0015));
  // On either side of the crossing the better branch wins.
  const double l2 = std::log2(1.0 + 2.0 * 0.6), l4 = std::log2(1.0 + 4.0 * 0.6);
  CHECK(std::log2(1.6) < l2 * l4 / (l2 + l4));
  const double m2 = std::log2(1.0 + 2.0 * 0.8), m4 = std::log2(1.0 + 4.0 * 0.8);
  CHECK(std::log2(1.8) > m2 * m4 / (m2 + m4));
}

TEST_CASE("nnc rate basics") {
  NetworkSpec zero;
  zero.layout.n_relays = 1;
  zero.layout.m_relay = {1};
  zero.H = ComplexMatrix::Zero(2, 2);
  zero.validate();
  CHECK(nnc_rate(zero, Schedule::uniform(2)) == 0.0);

  const NetworkSpec net = random_network(2, {1, 1}, 17);
  const CutValueTable table = CutValueTable::from_network(net);
  const SolveResult r = solve(table);
  const double m_tot = 4.0;  // source + two relays + destination
  CHECK(nnc_rate(net, r.schedule) >= r.rate - 1.96 * m_tot);
  CHECK_THROWS_AS(nnc_rate(net, r.schedule, 0.0), InvalidInputError);
}

TEST_CASE("gap certificates hold on random networks") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const int n = 1 + static_cast<int>(seed % 4);
    const GapCertificate cert =
        gap_certificate(random_network(n, std::vector<int>(n, 1), seed * 7919));
    CHECK(cert.upper - cert.lower <= cert.bound);
    CHECK(cert.bound == doctest::Approx(1.96 * (n + 2)));
  }
  NetworkSpec zero;
  zero.layout.n_relays = 1;
  zero.layout.m_relay = {1};
  zero.H = ComplexMatrix::Zero(2, 2);
  zero.validate();
  const GapCertificate cert = gap_certificate(zero);
  CHECK(cert.upper == doctest::Approx(0.0));
  CHECK(cert.lower == doctest::Approx(0.0));
}

TEST_CASE("fixed-power versus water-filling sandwich") {
  const SandwichReport rep = sandwich_check(LineNetworkGains::symmetric(1.0));
  CHECK(rep.ok);
  CHECK(rep.wf.c_case_i - rep.fixed.c_case_i >= -1e-9);
  CHECK(rep.wf.c_case_i - rep.fixed.c_case_i <= 0.3);
  const SandwichReport tiny = sandwich_check(LineNetworkGains::symmetric(1e-4));
  CHECK(tiny.ok);
}

TEST_CASE("sweep output and formatting") {
  const std::vector<SweepRow> rows = sweep_line(0.5, 2.0, 3);
  REQUIRE(rows.size() == 3);
  CHECK(rows.front().gamma == doctest::Approx(0.5));
  CHECK(rows.back().gamma == doctest::Approx(2.0));
  CHECK(rows[1].gamma == doctest::Approx(1.0));
  const std::string csv = sweep_csv(rows);
  CHECK(csv.rfind("gamma,c_fixed_i,c_fixed_ii,c_wf_i,c_wf_ii,active_states_i\n", 0) ==
        0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK_THROWS_AS(sweep_line(2.0, 0.5, 3), InvalidInputError);
  CHECK_THROWS_AS(sweep_line(0.5, 2.0, 1), InvalidInputError);
}

TEST_CASE("random networks are deterministic in the seed") {
  const NetworkSpec a = random_network(3, {2, 1, 1}, 99, 2, 1, Switching::Independent);
  const NetworkSpec b = random_network(3, {2, 1, 1}, 99, 2, 1, Switching::Independent);
  CHECK(serialize_network(a) == serialize_network(b));
  const NetworkSpec c = random_network(3, {2, 1, 1}, 100, 2, 1, Switching::Independent);
  CHECK(serialize_network(a) != serialize_network(c));
  CHECK(a.layout.m_tot() == 4);
}
