#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "support.hpp"
#include "tpart/acflow.hpp"
#include "tpart/caseio.hpp"
#include "tpart/dcflow.hpp"
#include "tpart/error.hpp"

using namespace tpart;

namespace {

Network ieee30_ac() { return to_network(load_case(support::data_path("snapshots/ieee30_ac.json")), Engine::kAC); }

double worst_mismatch(const Network& g, const AcSolution& s) {
  auto inj = bus_injections(g, s.voltages);
  double worst = 0.0;
  for (int i = 0; i < g.bus_count(); ++i) {
    const Bus& b = g.bus(i);
    if (b.type == BusType::kSlack) continue;
    worst = std::max(worst, std::abs(inj[static_cast<std::size_t>(i)].real() - b.p));
    if (b.type == BusType::kPQ) worst = std::max(worst, std::abs(inj[static_cast<std::size_t>(i)].imag() - b.q));
  }
  return worst;
}

}  // namespace

TEST_SUITE("acflow") {

TEST_CASE("lossless two-bus line without load is solved by the flat start") {
  Network g = support::plain_network(2, {{0, 1}}, {0.0, 0.0});
  AcSolution s = solve_ac(g);
  CHECK(s.iterations == 0);
  for (const auto& v : s.voltages) {
    CHECK(std::abs(v - std::complex<double>(1.0, 0.0)) < 1e-12);
  }
  CHECK(congestion_ac(s, g).gamma < 1e-12);
}

TEST_CASE("IEEE-30 converges from a flat start within ten iterations") {
  Network g = ieee30_ac();
  AcSolution s = solve_ac(g);
  CHECK(s.iterations <= 10);
  CHECK(s.residual <= 1e-6);
  // PV buses turned PQ carry their limit as the new setpoint, so check the
  // non-slack active balance, which is never altered.
  auto inj = bus_injections(g, s.voltages);
  for (int i = 0; i < g.bus_count(); ++i) {
    if (g.bus(i).type != BusType::kSlack) CHECK(std::abs(inj[static_cast<std::size_t>(i)].real() - g.bus(i).p) <= 1e-6);
  }
}

TEST_CASE("IEEE-30 solution agrees with the stored operating point") {
  Snapshot snap = load_case(support::data_path("snapshots/ieee30_ac.json"));
  Network g = to_network(snap, Engine::kAC);
  AcSolution s = solve_ac(g);
  for (int i = 0; i < g.bus_count(); ++i) {
    CAPTURE(i);
    CHECK(std::abs(s.voltages[static_cast<std::size_t>(i)]) == doctest::Approx(snap.buses[static_cast<std::size_t>(i)].vm).epsilon(1e-4));
    CHECK(std::arg(s.voltages[static_cast<std::size_t>(i)]) - std::arg(s.voltages[static_cast<std::size_t>(g.reference_bus())]) ==
          doctest::Approx(snap.buses[static_cast<std::size_t>(i)].va - snap.buses[static_cast<std::size_t>(g.reference_bus())].va).epsilon(1e-4));
  }
}

TEST_CASE("generation equals load plus losses") {
  Network g = ieee30_ac();
  AcSolution s = solve_ac(g);
  auto inj = bus_injections(g, s.voltages);
  double net = 0.0;
  for (const auto& x : inj) net += x.real();
  CHECK(std::abs(net - total_active_losses(s, g)) <= 1e-5);
  CHECK(total_active_losses(s, g) > 0.0);
}

TEST_CASE("zero-load network carries only charging flows") {
  Network base = ieee30_ac();
  std::vector<Bus> buses = base.buses();
  for (Bus& b : buses) {
    b.p = 0.0;
    b.q = 0.0;
    b.vm = 1.0;
    b.gs = 0.0;
    b.bs = 0.0;
  }
  std::vector<Line> lines = base.lines();
  for (Line& l : lines) {
    l.tap = 1.0;
    l.shift = 0.0;
  }
  Network g = Network::create(buses, lines, base.reference_bus());
  AcOptions opt;
  opt.enforce_q_limits = false;
  CongestionReport c = congestion_ac(solve_ac(g, nullptr, opt), g);
  CHECK(c.gamma < 0.15);
}

TEST_CASE("lossless small-angle AC flows match DC flows") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    int n = std::uniform_int_distribution<int>(3, 20)(rng);
    Network g = support::random_network(rng, n, support::random_connected_edges(rng, n, n + 4));
    std::vector<double> p = g.injections();
    for (double& x : p) x *= 0.05;
    Network small = g.with_injections(p);
    AcSolution ac = solve_ac(small);
    DcSolution dc = solve_dc(small);
    CHECK(worst_mismatch(small, ac) <= 1e-6);
    double top = 0.0;
    for (double f : dc.flows) top = std::max(top, std::abs(f));
    for (std::size_t l = 0; l < dc.flows.size(); ++l) {
      CHECK(std::abs(ac.s_from[l].real() - dc.flows[l]) <= 0.05 * std::max(std::abs(dc.flows[l]), 0.1 * top));
    }
  }
}

TEST_CASE("warm start converges in fewer iterations than the flat start") {
  Network g = ieee30_ac();
  AcSolution flat = solve_ac(g);
  AcSolution warm = solve_ac(g, &flat);
  CHECK(warm.iterations <= 1);
  CHECK(congestion_ac(warm, g).gamma == doctest::Approx(congestion_ac(flat, g).gamma).epsilon(1e-8));
}

TEST_CASE("an impossible load fails with NotConvergedError") {
  Network base = ieee30_ac();
  std::vector<double> p = base.injections();
  for (double& x : p) x *= 40.0;
  CHECK_THROWS_AS(solve_ac(base.with_injections(p)), NotConvergedError);
}

TEST_CASE("congestion takes the larger end") {
  Network g = ieee30_ac();
  AcSolution s = solve_ac(g);
  CongestionReport c = congestion_ac(s, g);
  for (int l = 0; l < g.line_count(); ++l) {
    const Line& line = g.line(l);
    if (line.unlimited) continue;
    double expect = std::max(std::abs(s.s_from[static_cast<std::size_t>(l)]), std::abs(s.s_to[static_cast<std::size_t>(l)])) / line.capacity;
    CHECK(c.levels[static_cast<std::size_t>(l)] == doctest::Approx(expect).epsilon(1e-14));
  }
}

}  // TEST_SUITE
