#include <doctest.h>

#include <set>

#include "support.hpp"
#include "tpart/caseio.hpp"
#include "tpart/error.hpp"
#include "tpart/pipeline.hpp"

using namespace tpart;

namespace {

Network load(const std::string& rel, Engine engine = Engine::kDC) {
  return to_network(load_case(support::data_path(rel)), engine);
}

// Contract shared by every successful run.
void check_contract(const Network& g, const TreePartitionReport& r) {
  Network post = apply_switch(g, r.switched);
  CHECK(is_tree_partition(post, r.partition));
  BridgeBlockDecomposition bbd = bridge_block_decomposition(post);
  for (const auto& block : bbd.blocks) {
    std::set<int> owners;
    for (int v : block) owners.insert(r.partition.cluster_of(v));
    CHECK(owners.size() == 1);
  }
  CHECK(static_cast<int>(bbd.blocks.size()) >= r.partition.k());
  CHECK(BbdSummary::of(bbd) == r.bbd_post);
  const Engine engine = engine_of(r.method);
  Evaluation e = evaluate_only(g, r.switched, engine);
  CHECK(std::abs(e.gamma - r.gamma_post) <= (engine == Engine::kDC ? 1e-9 : 1e-6));
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("two-stage on the three-area toy yields a tree partition at least as coarse as the blocks") {
  Network g = load("fixtures/three_areas.m");
  for (Method m : {Method::kTwoStageMilp, Method::kTwoStageBfDc}) {
    for (Clusterer c : {Clusterer::kFastgreedy, Clusterer::kSpectralLN, Clusterer::kSpectralBN}) {
      TreePartitionReport r = two_stage(g, 3, c, m);
      CHECK(r.partition.k() == 3);
      CHECK(r.bbd_post.nontrivial == std::vector<int>{4, 4, 4});
      check_contract(g, r);
    }
  }
}

TEST_CASE("recursive reaches the same blocks as two-stage with a different switching") {
  Network g = load("fixtures/three_areas.m");
  TreePartitionReport two = two_stage(g, 3, Clusterer::kSpectralLN, Method::kTwoStageBfDc);
  TreePartitionReport rec = recursive(g, 3, Engine::kDC, Clusterer::kSpectralLN);
  check_contract(g, rec);
  CHECK(rec.bbd_post == two.bbd_post);
  CHECK(rec.switched != two.switched);
  CHECK(rec.iterations.size() == 2);
  CHECK_FALSE(rec.partial);
}

TEST_CASE("a clustering that already matches the blocks switches nothing") {
  Network g = load("fixtures/two_cycles.m");
  for (Method m : {Method::kTwoStageMilp, Method::kTwoStageBfDc}) {
    TreePartitionReport r = run_method(g, 2, m, Clusterer::kSpectralLN);
    CHECK(r.switched.empty());
    CHECK(r.gamma_post == doctest::Approx(r.gamma_pre).epsilon(1e-12));
    CHECK(r.bbd_post == r.bbd_pre);
  }
}

TEST_CASE("recursive with k = 2 equals brute force on its own bipartition") {
  for (const char* rel : {"snapshots/ieee30_dc.json", "snapshots/ieee118_dc.json", "fixtures/three_areas.m"}) {
    CAPTURE(rel);
    Network g = load(rel);
    for (Clusterer c : {Clusterer::kFastgreedy, Clusterer::kSpectralLN, Clusterer::kSpectralBN}) {
      TreePartitionReport rec = recursive(g, 2, Engine::kDC, c);
      REQUIRE(rec.iterations.size() == 1);
      ObsInstance inst = ObsInstance::make(g, rec.partition, Engine::kDC);
      CHECK(static_cast<int>(inst.reduced.edges.size()) == rec.iterations[0].candidates);
      ObsSolution bf = solve_bruteforce(inst);
      CHECK(bf.switched == rec.switched);
      CHECK(std::abs(bf.gamma - rec.gamma_post) <= 1e-9);
    }
  }
}

TEST_CASE("recursive runs k - 1 rounds, each on the largest block") {
  Network g = load("snapshots/ieee118_dc.json");
  TreePartitionReport r = recursive(g, 6, Engine::kDC, Clusterer::kSpectralBN);
  CHECK(r.iterations.size() == 5);
  CHECK(r.partition.k() == 6);
  CHECK(r.iterations[0].block_size == 109);
  for (const auto& it : r.iterations) CHECK(static_cast<int>(it.switched.size()) == it.candidates - 1);
  check_contract(g, r);
}

TEST_CASE("IEEE-30 with k = 5 through every method keeps the contract") {
  Network g = load("snapshots/ieee30_dc.json");
  for (Method m : {Method::kTwoStageMilp, Method::kTwoStageBfDc, Method::kRecursiveDc}) {
    for (Clusterer c : {Clusterer::kFastgreedy, Clusterer::kSpectralLN, Clusterer::kSpectralBN}) {
      CAPTURE(to_string(m));
      CAPTURE(to_string(c));
      TreePartitionReport r = run_method(g, 5, m, c);
      check_contract(g, r);
      CHECK(r.bbd_pre.nontrivial == std::vector<int>{27});
    }
  }
}

TEST_CASE("AC methods keep the contract on IEEE-30") {
  Network g = load("snapshots/ieee30_ac.json", Engine::kAC);
  for (Method m : {Method::kTwoStageBfAc, Method::kRecursiveAc}) {
    TreePartitionReport r = run_method(g, 3, m, Clusterer::kSpectralLN);
    check_contract(g, r);
  }
}

TEST_CASE("evaluate_only") {
  Network g = load("snapshots/ieee30_dc.json");
  Evaluation e = evaluate_only(g, SwitchSet{}, Engine::kDC);
  CHECK(e.gamma == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(e.bbd.nontrivial_sizes() == std::vector<int>{27});
  try {
    evaluate_only(g, SwitchSet(find_bridges(g)), Engine::kDC);
    FAIL("expected an error");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::kDisconnected);
  }
}

TEST_CASE("identical configurations give byte-identical reports") {
  Network g = load("snapshots/ieee118_dc.json");
  for (Method m : {Method::kTwoStageMilp, Method::kTwoStageBfDc, Method::kRecursiveDc}) {
    PipelineOptions one;
    one.seed = 3;
    one.threads = 1;
    PipelineOptions many = one;
    many.threads = 4;
    std::string a = write_report_json(run_method(g, 5, m, Clusterer::kSpectralLN, one), false);
    std::string b = write_report_json(run_method(g, 5, m, Clusterer::kSpectralLN, one), false);
    std::string c = write_report_json(run_method(g, 5, m, Clusterer::kSpectralLN, many), false);
    CHECK(a == b);
    CHECK(a == c);
  }
}

TEST_CASE("argument checks") {
  Network g = load("fixtures/three_areas.m");
  CHECK_THROWS_AS(two_stage(g, 1, Clusterer::kSpectralLN, Method::kTwoStageBfDc), Error);
  CHECK_THROWS_AS(two_stage(g, 13, Clusterer::kSpectralLN, Method::kTwoStageBfDc), Error);
  CHECK_THROWS_AS(two_stage(g, 3, Clusterer::kSpectralLN, Method::kRecursiveDc), Error);
  CHECK_THROWS_AS(recursive(g, 1, Engine::kDC, Clusterer::kSpectralLN), Error);
}

}  // TEST_SUITE
