#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracles/oracles.hpp"
#include "support.hpp"
#include "tpart/caseio.hpp"
#include "tpart/error.hpp"
#include "tpart/grid.hpp"

using namespace tpart;

namespace {

std::vector<int> as_ints(const std::vector<LineId>& ids) {
  std::vector<int> out;
  for (LineId id : ids) out.push_back(to_int(id));
  return out;
}

ReducedGraph reduced_of(int k, const std::vector<std::pair<int, int>>& edges) {
  ReducedGraph r;
  r.k = k;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    r.edges.push_back({edges[e].first, edges[e].second, static_cast<int>(e), line_id(static_cast<std::int32_t>(e + 1))});
  }
  return r;
}

std::vector<std::vector<int>> all_trees(const ReducedGraph& r) {
  std::vector<std::vector<int>> out;
  enumerate_spanning_trees(r, [&](std::span<const int> t) {
    out.emplace_back(t.begin(), t.end());
    return true;
  });
  return out;
}

}  // namespace

TEST_SUITE("grid") {

TEST_CASE("bridges of small graphs") {
  CHECK(as_ints(find_bridges(support::plain_network(3, {{0, 1}, {1, 2}}))) == std::vector<int>{1, 2});
  CHECK(find_bridges(support::plain_network(3, {{0, 1}, {1, 2}, {2, 0}})).empty());
  Network two = to_network(load_case(support::data_path("fixtures/two_cycles.m")), Engine::kDC);
  CHECK(as_ints(find_bridges(two)) == std::vector<int>{5});
}

TEST_CASE("parallel lines are never bridges") {
  CHECK(find_bridges(support::plain_network(2, {{0, 1}, {1, 0}})).empty());
}

TEST_CASE("bridges agree with the removal oracle on random graphs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    int n = std::uniform_int_distribution<int>(2, 40)(rng);
    int m = std::uniform_int_distribution<int>(n - 1, std::min(200, 2 * n))(rng);
    auto edges = support::random_connected_edges(rng, n, m);
    CHECK(find_bridge_edges(n, edges) == oracle::bridges_by_removal(n, edges));
  }
}

TEST_CASE("bridge-block decomposition of trees, cycles and IEEE-73") {
  BridgeBlockDecomposition t = bridge_block_decomposition(support::plain_network(5, {{0, 1}, {1, 2}, {1, 3}, {3, 4}}));
  CHECK(t.blocks.size() == 5);
  CHECK(t.bridges.size() == 4);
  CHECK(t.nontrivial_sizes().empty());

  BridgeBlockDecomposition c = bridge_block_decomposition(support::plain_network(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}));
  CHECK(c.blocks.size() == 1);
  CHECK(c.bridges.empty());

  Network g = to_network(load_case(support::data_path("snapshots/ieee73_dc.json")), Engine::kDC);
  BridgeBlockDecomposition b = bridge_block_decomposition(g);
  CHECK(b.nontrivial_sizes() == std::vector<int>{71});
  CHECK(b.blocks.size() == 3);
}

TEST_CASE("blocks are the components left after deleting all bridges") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    int n = std::uniform_int_distribution<int>(2, 30)(rng);
    auto edges = support::random_connected_edges(rng, n, n - 1 + std::uniform_int_distribution<int>(0, n)(rng));
    Network g = support::plain_network(n, edges);
    BridgeBlockDecomposition bbd = bridge_block_decomposition(g);
    std::vector<bool> skip(edges.size(), false);
    for (int e : oracle::bridges_by_removal(n, edges)) skip[static_cast<std::size_t>(e)] = true;
    for (const auto& block : bbd.blocks) {
      auto seen = oracle::reachable(n, edges, block.front(), skip);
      for (int v = 0; v < n; ++v) {
        bool in = std::find(block.begin(), block.end(), v) != block.end();
        CHECK(seen[static_cast<std::size_t>(v)] == in);
      }
    }
    CHECK(is_tree_partition(g, bbd.as_partition()));
  }
}

TEST_CASE("the decomposition is at least as fine as any tree partition") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    int n = std::uniform_int_distribution<int>(4, 25)(rng);
    auto edges = support::random_connected_edges(rng, n, n + 2);
    Network g = support::plain_network(n, edges);
    BridgeBlockDecomposition bbd = bridge_block_decomposition(g);
    // Coarsen by merging the blocks on both sides of random bridges.
    std::vector<int> label = bbd.block_of;
    for (LineId id : bbd.bridges) {
      if (rng() % 2) continue;
      const Line& l = g.line(*g.line_index(id));
      int a = label[static_cast<std::size_t>(l.from)], b = label[static_cast<std::size_t>(l.to)];
      for (int& x : label) {
        if (x == b) x = a;
      }
    }
    Partition p = Partition::canonical(label);
    REQUIRE(is_tree_partition(g, p));
    for (const auto& block : bbd.blocks) {
      std::set<int> owners;
      for (int v : block) owners.insert(p.cluster_of(v));
      CHECK(owners.size() == 1);
    }
  }
}

TEST_CASE("cross edges and reduced graphs") {
  Network g = to_network(load_case(support::data_path("fixtures/three_areas.m")), Engine::kDC);
  CHECK(cross_edges(g, Partition::single(g.bus_count())).edges.empty());
  std::vector<int> own(static_cast<std::size_t>(g.bus_count()));
  for (int i = 0; i < g.bus_count(); ++i) own[static_cast<std::size_t>(i)] = i;
  CHECK(cross_edges(g, Partition(own, g.bus_count())).edges.size() == static_cast<std::size_t>(g.line_count()));

  Partition areas({0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2}, 3);
  ReducedGraph r = cross_edges(g, areas);
  CHECK(r.edges.size() == 5);
  CHECK(r.internal_lines.size() == 15);
  CHECK(r.connected());
  for (const ReducedEdge& e : r.edges) {
    CHECK(e.u != e.v);
    CHECK(g.line(e.line).id == e.id);
  }
  // Two lines between areas 0 and 1 plus a cycle through area 2.
  CHECK_FALSE(is_tree_partition(g, areas));
  CHECK(clusters_connected(g, areas));
}

TEST_CASE("tree partition checks") {
  Network joined = support::plain_network(4, {{0, 1}, {2, 3}, {1, 2}});
  CHECK(is_tree_partition(joined, Partition({0, 0, 1, 1}, 2)));
  Network doubled = support::plain_network(4, {{0, 1}, {2, 3}, {1, 2}, {0, 3}});
  CHECK_FALSE(is_tree_partition(doubled, Partition({0, 0, 1, 1}, 2)));
  // Reduced graph is a tree but cluster 0 = {0, 2} is not connected inside.
  Network path = support::plain_network(3, {{0, 1}, {1, 2}});
  CHECK_FALSE(is_tree_partition(path, Partition({0, 1, 0}, 2)));
  Network two = to_network(load_case(support::data_path("fixtures/two_cycles.m")), Engine::kDC);
  CHECK(is_tree_partition(two, bridge_block_decomposition(two).as_partition()));
}

TEST_CASE("spanning tree counts of small multigraphs") {
  CHECK(all_trees(reduced_of(2, {{0, 1}, {0, 1}, {1, 0}})).size() == 3);
  CHECK(all_trees(reduced_of(3, {{0, 1}, {1, 2}, {2, 0}})).size() == 3);
  ReducedGraph k4 = reduced_of(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  CHECK(all_trees(k4).size() == 16);
  CHECK(matrix_tree_count(k4) == doctest::Approx(16.0));
  CHECK(oracle::kirchhoff_count(4, k4.edge_list()) == 16);
}

TEST_CASE("enumeration matches the matrix-tree theorem and yields distinct spanning trees") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 25; ++trial) {
    int k = std::uniform_int_distribution<int>(1, 8)(rng);
    int m = std::uniform_int_distribution<int>(k - 1, k + 8)(rng);
    ReducedGraph r = reduced_of(k, support::random_connected_edges(rng, k, m));
    auto trees = all_trees(r);
    CHECK(static_cast<std::int64_t>(trees.size()) == oracle::kirchhoff_count(k, r.edge_list()));
    CHECK(matrix_tree_count(r) == doctest::Approx(static_cast<double>(trees.size())));
    std::set<std::vector<int>> unique(trees.begin(), trees.end());
    CHECK(unique.size() == trees.size());
    CHECK(std::is_sorted(trees.begin(), trees.end()));
    for (const auto& t : trees) {
      CHECK(std::is_sorted(t.begin(), t.end()));
      oracle::Edges sub;
      for (int e : t) sub.emplace_back(r.edges[static_cast<std::size_t>(e)].u, r.edges[static_cast<std::size_t>(e)].v);
      CHECK(static_cast<int>(t.size()) == k - 1);
      CHECK(oracle::connected(k, sub));
    }
    CHECK(all_trees(r) == trees);
  }
}

TEST_CASE("enumeration stops when the visitor returns false") {
  ReducedGraph k4 = reduced_of(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  int seen = 0;
  enumerate_spanning_trees(k4, [&](std::span<const int>) { return ++seen < 5; });
  CHECK(seen == 5);
}

TEST_CASE("switching lines off") {
  Network tri = support::plain_network(3, {{0, 1}, {1, 2}, {2, 0}});
  Network same = apply_switch(tri, SwitchSet{});
  CHECK(same.line_count() == 3);
  Network path = apply_switch(tri, SwitchSet({line_id(2)}));
  CHECK(path.line_count() == 2);
  CHECK_FALSE(path.line_index(line_id(2)).has_value());
  CHECK(path.bus(0).p == tri.bus(0).p);
  CHECK(find_bridges(path).size() == 2);
  try {
    apply_switch(path, SwitchSet({line_id(1)}));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDisconnected);
  }
}

TEST_CASE("partition validation") {
  CHECK_THROWS_AS(Partition({0, 2}, 2), Error);
  CHECK_THROWS_AS(Partition({0, 0}, 2), Error);
  CHECK(Partition::canonical(std::vector<int>{7, 3, 7, 9}).assignment() == std::vector<int>{0, 1, 0, 2});
}

}  // TEST_SUITE
