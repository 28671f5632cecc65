#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles/oracles.hpp"
#include "support.hpp"
#include "tpart/caseio.hpp"
#include "tpart/error.hpp"
#include "tpart/obs.hpp"

using namespace tpart;

namespace {

Network three_areas() { return to_network(load_case(support::data_path("fixtures/three_areas.m")), Engine::kDC); }

const Partition kAreas({0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2}, 3);

int row_index(const LinearModel& m, const std::string& name) {
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    if (m.rows[r].name == name) return static_cast<int>(r);
  }
  return -1;
}

bool switched_are_cross(const ObsInstance& inst, const SwitchSet& s) {
  for (LineId id : s.lines()) {
    bool found = false;
    for (const ReducedEdge& e : inst.reduced.edges) found = found || e.id == id;
    if (!found) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("obs") {

TEST_CASE("instances validate their partition") {
  Network g = three_areas();
  CHECK_THROWS_AS(ObsInstance::make(g, Partition::single(12), Engine::kDC), Error);
  CHECK_THROWS_AS(ObsInstance::make(g, Partition({0, 1}, 2), Engine::kDC), Error);
  // Cluster 0 = {0, 6} is not connected inside.
  std::vector<int> bad = kAreas.assignment();
  bad[6] = 0;
  CHECK_THROWS_AS(ObsInstance::make(g, Partition(bad, 3), Engine::kDC), Error);
}

TEST_CASE("k = 2 evaluates one tree per cross edge") {
  Network g = support::plain_network(4, {{0, 1}, {2, 3}, {0, 2}, {1, 3}, {1, 2}}, {1.0, 0.0, 0.0, -1.0});
  ObsInstance inst = ObsInstance::make(g, Partition({0, 0, 1, 1}, 2), Engine::kDC);
  CHECK(inst.reduced.edges.size() == 3);
  ObsSolution s = solve_bruteforce(inst);
  CHECK(s.stats.trees_evaluated == 3);
  CHECK(s.switched.size() == 2);
}

TEST_CASE("triangle of singletons: every tree has gamma 1, the first one wins") {
  Network g = support::plain_network(3, {{0, 1}, {0, 2}, {2, 1}}, {1.0, -1.0, 0.0}, 2);
  ObsInstance inst = ObsInstance::make(g, Partition({0, 1, 2}, 3), Engine::kDC);
  ObsSolution s = solve_bruteforce(inst);
  CHECK(s.gamma == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.stats.trees_evaluated == 3);
  CHECK(s.switched == SwitchSet({line_id(3)}));
  CHECK(s.kept_tree == std::vector<LineId>{line_id(1), line_id(2)});
  CHECK(solve_bruteforce(inst, {1}).switched == s.switched);
}

TEST_CASE("a reduced graph that is already a tree needs no switching") {
  Network g = to_network(load_case(support::data_path("fixtures/two_cycles.m")), Engine::kDC);
  ObsInstance inst = ObsInstance::make(g, Partition({0, 0, 0, 0, 1, 1, 1, 1}, 2), Engine::kDC);
  double gamma0 = gamma_of_switch(g, SwitchSet{});
  ObsSolution bf = solve_bruteforce(inst);
  CHECK(bf.switched.empty());
  CHECK(bf.gamma == gamma0);
  ObsSolution mi = solve_obs_milp(inst);
  CHECK(mi.switched.empty());
  CHECK(mi.gamma == doctest::Approx(gamma0).epsilon(1e-12));
}

TEST_CASE("brute force is independent of the thread count") {
  std::mt19937_64 rng(51);
  auto edges = support::random_connected_edges(rng, 20, 34);
  Network g = support::random_network(rng, 20, edges);
  ObsInstance inst = ObsInstance::make(g, support::random_connected_partition(rng, 20, edges, 4), Engine::kDC);
  ObsSolution a = solve_bruteforce(inst, {1});
  ObsSolution b = solve_bruteforce(inst, {4});
  CHECK(a.switched == b.switched);
  CHECK(a.gamma == b.gamma);
}

TEST_CASE("MILP size and rows") {
  Network g = support::plain_network(3, {{0, 1}, {1, 2}, {2, 0}}, {1.0, -1.0, 0.0});
  ObsInstance inst = ObsInstance::make(g, Partition({0, 1, 2}, 3), Engine::kDC);
  MilpModel mm = build_milp(inst);
  CHECK(mm.model.integer_count() == 3);
  CHECK(static_cast<int>(mm.model.variables.size()) - mm.model.integer_count() == 3 + 3 + 3 + 1);
  const auto& tree = mm.model.rows[static_cast<std::size_t>(row_index(mm.model, "tree_size"))];
  CHECK(tree.lower == 2.0);
  CHECK(tree.upper == 2.0);
  CHECK(tree.terms.size() == 3);
  for (auto [j, a] : tree.terms) {
    CHECK(a == 1.0);
    CHECK(mm.model.variables[static_cast<std::size_t>(j)].integer);
  }
  const auto& source = mm.model.rows[static_cast<std::size_t>(row_index(mm.model, "commodity0"))];
  CHECK(source.lower == 2.0);
  std::string lp = mm.model.to_lp();
  CHECK(lp.find("Binary") != std::string::npos);
  CHECK(lp.find("tree_size: y1 + y2 + y3 = 2") != std::string::npos);
}

TEST_CASE("the four-times-capacity rule gives M = 3.2 for c = 0.8") {
  Network base = support::plain_network(2, {{0, 1}, {1, 0}}, {0.5, -0.5});
  std::vector<Line> lines = base.lines();
  lines[0].capacity = 0.8;
  Network g = Network::create(base.buses(), lines, 0);
  CHECK(big_m_for(g, 0) == doctest::Approx(3.2).epsilon(1e-15));
  ObsInstance inst = ObsInstance::make(g, Partition({0, 1}, 2), Engine::kDC);
  CHECK(build_milp(inst, BigMRule::kFourTimesCapacity).big_m[0] == doctest::Approx(3.2).epsilon(1e-15));
  std::vector<double> safe = safe_big_m(inst);
  CHECK(safe[0] >= 3.2);
  CHECK(safe[1] >= 4.0);
}

TEST_CASE("MILP equals brute force on the three-area toy and on random instances") {
  {
    ObsInstance inst = ObsInstance::make(three_areas(), kAreas, Engine::kDC);
    ObsSolution bf = solve_bruteforce(inst);
    ObsSolution mi = solve_obs_milp(inst);
    CHECK(mi.gamma == doctest::Approx(bf.gamma).epsilon(1e-6));
    CHECK(mi.big_m->violations == 0);
    CHECK(switched_are_cross(inst, mi.switched));
  }
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 10; ++trial) {
    int n = std::uniform_int_distribution<int>(6, 20)(rng);
    auto edges = support::random_connected_edges(rng, n, n + std::uniform_int_distribution<int>(2, n)(rng));
    Network g = support::random_network(rng, n, edges);
    int k = std::uniform_int_distribution<int>(2, 4)(rng);
    ObsInstance inst = ObsInstance::make(g, support::random_connected_partition(rng, n, edges, k), Engine::kDC);
    ObsSolution bf = solve_bruteforce(inst);
    ObsSolution mi = solve_obs_milp(inst);
    CAPTURE(trial);
    CHECK(std::abs(mi.gamma - bf.gamma) <= 1e-6);
    CHECK(mi.optimal);
    CHECK(mi.big_m->violations == 0);
    CHECK(switched_are_cross(inst, mi.switched));
    CHECK(switched_are_cross(inst, bf.switched));
    Network post = apply_switch(g, mi.switched);
    CHECK(is_tree_partition(post, inst.partition));
  }
}

TEST_CASE("the decoded MILP tree spans the reduced graph") {
  ObsInstance inst = ObsInstance::make(three_areas(), kAreas, Engine::kDC);
  ObsSolution mi = solve_obs_milp(inst);
  CHECK(static_cast<int>(mi.kept_tree.size()) == inst.reduced.k - 1);
  oracle::Edges kept;
  for (const ReducedEdge& e : inst.reduced.edges) {
    if (std::find(mi.kept_tree.begin(), mi.kept_tree.end(), e.id) != mi.kept_tree.end()) kept.emplace_back(e.u, e.v);
  }
  CHECK(oracle::connected(inst.reduced.k, kept));
  CHECK(mi.switched.size() + mi.kept_tree.size() == inst.reduced.edges.size());
}

TEST_CASE("AC brute force visits every tree once") {
  Network g = to_network(load_case(support::data_path("fixtures/three_areas.m")), Engine::kAC);
  ObsInstance inst = ObsInstance::make(g, kAreas, Engine::kAC);
  ObsSolution s = solve_bruteforce(inst);
  CHECK(static_cast<double>(s.stats.trees_evaluated + s.stats.trees_skipped) == matrix_tree_count(inst.reduced));
  REQUIRE(s.ac.has_value());
  Network post = apply_switch(g, s.switched);
  CHECK(congestion_ac(*s.ac, post).gamma == doctest::Approx(s.gamma).epsilon(1e-12));
  CHECK_THROWS_AS(build_milp(inst), Error);
}

}  // TEST_SUITE
