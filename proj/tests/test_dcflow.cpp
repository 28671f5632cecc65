#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles/oracles.hpp"
#include "support.hpp"
#include "tpart/caseio.hpp"
#include "tpart/dcflow.hpp"
#include "tpart/error.hpp"

using namespace tpart;

namespace {

// Lines (1,2), (1,3), (3,2); bus 3 is the reference.
Network triangle(std::vector<double> p = {1.0, -1.0, 0.0}) {
  return support::plain_network(3, {{0, 1}, {0, 2}, {2, 1}}, p, 2);
}

std::vector<oracle::DcLine> dc_lines(const Network& g) {
  std::vector<oracle::DcLine> out;
  for (const Line& l : g.lines()) out.push_back({l.from, l.to, l.b});
  return out;
}

double own_residual(const Network& g, const std::vector<double>& f) {
  std::vector<double> net(static_cast<std::size_t>(g.bus_count()), 0.0);
  for (int l = 0; l < g.line_count(); ++l) {
    net[static_cast<std::size_t>(g.line(l).from)] += f[static_cast<std::size_t>(l)];
    net[static_cast<std::size_t>(g.line(l).to)] -= f[static_cast<std::size_t>(l)];
  }
  double worst = 0.0;
  for (int i = 0; i < g.bus_count(); ++i) worst = std::max(worst, std::abs(net[static_cast<std::size_t>(i)] - g.bus(i).p));
  return worst;
}

}  // namespace

TEST_SUITE("dcflow") {

TEST_CASE("triangle flows and angles") {
  Network g = triangle();
  DcSolution s = solve_dc(g);
  CHECK(s.angles[0] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(s.angles[1] == doctest::Approx(-1.0 / 3).epsilon(1e-12));
  CHECK(s.angles[2] == 0.0);
  CHECK(std::abs(s.flows[0] - 2.0 / 3) < 1e-12);
  CHECK(std::abs(s.flows[1] - 1.0 / 3) < 1e-12);
  CHECK(std::abs(s.flows[2] - 1.0 / 3) < 1e-12);
  oracle::DcResult o = oracle::dense_dc(3, dc_lines(g), g.injections(), 2);
  for (int l = 0; l < 3; ++l) CHECK(std::abs(s.flows[static_cast<std::size_t>(l)] - o.flows[static_cast<std::size_t>(l)]) < 1e-12);
}

TEST_CASE("triangle congestion") {
  Network g = triangle();
  CongestionReport c = congestion_dc(solve_dc(g), g);
  CHECK(c.gamma == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(to_int(c.argmax) == 1);
  // Without line (3,2) the whole injection runs over (1,2).
  CHECK(gamma_of_switch(g, SwitchSet({line_id(3)})) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero injections give zero flows, angles and congestion") {
  Network g = triangle({0.0, 0.0, 0.0});
  DcSolution s = solve_dc(g);
  for (double f : s.flows) CHECK(f == 0.0);
  for (double a : s.angles) CHECK(a == 0.0);
  CHECK(congestion_dc(s, g).gamma == 0.0);
}

TEST_CASE("a line loaded exactly to capacity has level one") {
  Network g = support::plain_network(2, {{0, 1}}, {1.0, -1.0});
  CongestionReport c = congestion_dc(solve_dc(g), g);
  CHECK(c.levels[0] == 1.0);
  CHECK(c.gamma == 1.0);
}

TEST_CASE("scaling every susceptance keeps flows and scales angles") {
  std::mt19937_64 rng(21);
  Network g = support::random_network(rng, 12, support::random_connected_edges(rng, 12, 20));
  DcSolution a = solve_dc(g);
  DcSolution b = solve_dc(g.with_scaled_susceptance(4.0));
  for (std::size_t l = 0; l < a.flows.size(); ++l) CHECK(b.flows[l] == doctest::Approx(a.flows[l]).epsilon(1e-10));
  for (std::size_t i = 0; i < a.angles.size(); ++i) CHECK(b.angles[i] == doctest::Approx(a.angles[i] / 4.0).epsilon(1e-10));
}

TEST_CASE("removing a zero-flow line leaves the congestion unchanged") {
  // 4-cycle with a chord between the two symmetric buses.
  Network g = support::plain_network(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {1, 3}}, {1.0, 0.0, -1.0, 0.0});
  DcSolution s = solve_dc(g);
  CHECK(std::abs(s.flows[4]) < 1e-14);
  CHECK(gamma_of_switch(g, SwitchSet({line_id(5)})) == doctest::Approx(congestion_dc(s, g).gamma).epsilon(1e-12));
}

TEST_CASE("random networks: oracle agreement, uniqueness, conservation, superposition") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    int n = std::uniform_int_distribution<int>(2, 40)(rng);
    auto edges = support::random_connected_edges(rng, n, n - 1 + std::uniform_int_distribution<int>(0, n)(rng));
    Network g = support::random_network(rng, n, edges);
    DcSolution s = solve_dc(g);
    oracle::DcResult o = oracle::dense_dc(n, dc_lines(g), g.injections(), g.reference_bus());
    for (std::size_t l = 0; l < s.flows.size(); ++l) CHECK(std::abs(s.flows[l] - o.flows[l]) < 1e-9);
    CHECK(own_residual(g, s.flows) <= 1e-8);
    CHECK(s.residual <= 1e-8);
    CHECK(solve_dc(g).flows == s.flows);

    auto p2 = support::random_injections(rng, n);
    std::vector<double> sum(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) sum[static_cast<std::size_t>(i)] = g.bus(i).p + p2[static_cast<std::size_t>(i)];
    DcSolution s2 = solve_dc(g.with_injections(p2));
    DcSolution s12 = solve_dc(g.with_injections(sum));
    for (std::size_t l = 0; l < s.flows.size(); ++l) CHECK(std::abs(s12.flows[l] - s.flows[l] - s2.flows[l]) < 1e-9);
  }
}

TEST_CASE("flows do not depend on the reference bus") {
  std::mt19937_64 rng(23);
  auto edges = support::random_connected_edges(rng, 15, 25);
  Network g = support::random_network(rng, 15, edges);
  DcSolution a = solve_dc(g);
  Network h = Network::create(g.buses(), g.lines(), 9);
  DcSolution b = solve_dc(h);
  for (std::size_t l = 0; l < a.flows.size(); ++l) CHECK(std::abs(a.flows[l] - b.flows[l]) < 1e-10);
}

TEST_CASE("doubling capacities halves the congestion") {
  std::mt19937_64 rng(24);
  Network g = support::random_network(rng, 10, support::random_connected_edges(rng, 10, 16));
  double gamma = congestion_dc(solve_dc(g), g).gamma;
  Network h = g.with_scaled_capacity(2.0);
  CHECK(congestion_dc(solve_dc(h), h).gamma == gamma / 2.0);
}

TEST_CASE("OPF-tight snapshots are congested to exactly one") {
  // activ200's DC-OPF binds no line (gamma 0.7075), so it is not listed.
  for (const char* name : {"ieee30", "ieee118", "goc179", "ieee300", "goc500", "epri39"}) {
    std::string label = name;
    CAPTURE(label);
    Network g = to_network(load_case(support::data_path(std::string("snapshots/") + name + "_dc.json")), Engine::kDC);
    CHECK(gamma_of_switch(g, SwitchSet{}) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("errors") {
  Network open = support::plain_network(2, {{0, 1}}, {1.0, -1.0});
  std::vector<Line> lines = open.lines();
  lines[0].unlimited = true;
  lines[0].capacity = kInfinity;
  Network free = Network::create(open.buses(), lines, 0);
  try {
    congestion_dc(solve_dc(free), free);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUndefinedCongestion);
  }
  try {
    solve_dc(open.with_injections(std::vector<double>{1.0, 0.0}));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnbalanced);
  }
}

}  // TEST_SUITE
