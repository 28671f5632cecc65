#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracles/oracles.hpp"
#include "support.hpp"
#include "tpart/caseio.hpp"
#include "tpart/dcflow.hpp"
#include "tpart/error.hpp"
#include "tpart/obi.hpp"

using namespace tpart;

namespace {

// Two triangles {0,1,2} and {3,4,5} joined by the edge (2,3).
WeightedGraph two_triangles(double bridge = 1.0) {
  return WeightedGraph::from_edges(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}, {2, 3}},
                                   {1, 1, 1, 1, 1, 1, bridge});
}

// Two 4-cliques joined by one weak edge.
WeightedGraph two_cliques() {
  std::vector<std::pair<int, int>> e;
  std::vector<double> w;
  for (int base : {0, 4}) {
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        e.emplace_back(base + i, base + j);
        w.push_back(1.0);
      }
    }
  }
  e.emplace_back(3, 4);
  w.push_back(0.1);
  return WeightedGraph::from_edges(8, e, w);
}

WeightedGraph random_weighted(std::mt19937_64& rng, int n, int m) {
  auto edges = support::random_connected_edges(rng, n, m);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  std::vector<double> w(edges.size());
  for (double& x : w) x = u(rng);
  return WeightedGraph::from_edges(n, edges, w);
}

bool clusters_are_connected(const WeightedGraph& g, const Partition& p) {
  for (const auto& members : p.clusters()) {
    std::vector<bool> skip(g.edges.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      skip[e] = p.cluster_of(g.edges[e].first) != p.cluster_of(members.front()) ||
                p.cluster_of(g.edges[e].second) != p.cluster_of(members.front());
    }
    auto seen = oracle::reachable(g.n, g.edges, members.front(), skip);
    for (int v : members) {
      if (!seen[static_cast<std::size_t>(v)]) return false;
    }
  }
  return true;
}

// Replays a greedy trace: every merge must be a best merge of two adjacent
// communities at that moment, with dQ measured from scratch.
void replay(const WeightedGraph& g, const std::vector<GreedyMerge>& trace, const Partition& result) {
  std::vector<int> label(static_cast<std::size_t>(g.n));
  for (int v = 0; v < g.n; ++v) label[static_cast<std::size_t>(v)] = v;
  for (const GreedyMerge& step : trace) {
    double q0 = oracle::modularity(g.n, g.edges, g.weights, label);
    std::set<std::pair<int, int>> pairs;
    for (auto [a, b] : g.edges) {
      int x = label[static_cast<std::size_t>(a)], y = label[static_cast<std::size_t>(b)];
      if (x != y) pairs.emplace(std::min(x, y), std::max(x, y));
    }
    double best = -1e300;
    for (auto [x, y] : pairs) {
      std::vector<int> trial = label;
      for (int& l : trial) {
        if (l == y) l = x;
      }
      best = std::max(best, oracle::modularity(g.n, g.edges, g.weights, trial) - q0);
    }
    REQUIRE(pairs.count({step.into, step.from}) == 1);
    CHECK(step.into < step.from);
    for (int& l : label) {
      if (l == step.from) l = step.into;
    }
    double actual = oracle::modularity(g.n, g.edges, g.weights, label) - q0;
    CHECK(actual == doctest::Approx(step.delta_q).epsilon(1e-9));
    CHECK(actual >= best - 1e-12);
  }
  CHECK(Partition::canonical(label) == Partition::canonical(result.assignment()));
}

}  // namespace

TEST_SUITE("obi") {

TEST_CASE("modularity matches the definition") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    WeightedGraph g = random_weighted(rng, 12, 20);
    std::vector<int> label(12);
    for (int& l : label) l = static_cast<int>(rng() % 3);
    Partition p = Partition::canonical(label);
    CHECK(modularity(g, p) == doctest::Approx(oracle::modularity(12, g.edges, g.weights, p.assignment())).epsilon(1e-12));
  }
}

TEST_CASE("weights come from absolute flows with a floor") {
  Network g = support::plain_network(3, {{0, 1}, {1, 2}, {2, 0}}, {1.0, -1.0, 0.0});
  WeightedGraph w = WeightedGraph::from_flows(g, std::vector<double>{-2.0, 0.0, 1.0});
  CHECK(w.weights == std::vector<double>{2.0, 2e-6, 1.0});
  CHECK(w.total == doctest::Approx(3.0 + 2e-6));
  CHECK(w.degree[1] == doctest::Approx(2.0 + 2e-6));
}

TEST_CASE("spectral clustering splits two triangles like the minimum normalized cut") {
  WeightedGraph g = two_triangles();
  std::vector<int> cut = oracle::min_normalized_cut(6, g.edges, g.weights);
  for (SpectralMode mode : {SpectralMode::kLN, SpectralMode::kBN}) {
    Partition p = spectral_partition(g, 2, mode, 1);
    CHECK(p == Partition::canonical(cut));
    CHECK(p.assignment() == std::vector<int>{0, 0, 0, 1, 1, 1});
  }
}

TEST_CASE("spectral clustering of k = n gives singletons; same seed gives the same answer") {
  WeightedGraph g = two_triangles();
  Partition single = spectral_partition(g, 6, SpectralMode::kLN, 3);
  CHECK(single.k() == 6);
  std::mt19937_64 rng(42);
  WeightedGraph r = random_weighted(rng, 40, 70);
  for (SpectralMode mode : {SpectralMode::kLN, SpectralMode::kBN}) {
    CHECK(spectral_partition(r, 5, mode, 9) == spectral_partition(r, 5, mode, 9));
  }
}

TEST_CASE("k-means separates well-separated blobs") {
  std::vector<double> pts;
  std::mt19937_64 rng(43);
  std::normal_distribution<double> noise(0.0, 0.05);
  const double centres[3][2] = {{0, 0}, {5, 5}, {-5, 5}};
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 10; ++i) {
      pts.push_back(centres[c][0] + noise(rng));
      pts.push_back(centres[c][1] + noise(rng));
    }
  }
  std::vector<int> label = kmeans(pts, 2, 3, 5);
  for (int c = 0; c < 3; ++c) {
    for (int i = 1; i < 10; ++i) CHECK(label[static_cast<std::size_t>(c * 10 + i)] == label[static_cast<std::size_t>(c * 10)]);
  }
  CHECK(std::set<int>(label.begin(), label.end()).size() == 3);
  CHECK(kmeans(pts, 2, 3, 5) == label);
}

TEST_CASE("fastgreedy finds two cliques, the best 2-split by exhaustive search") {
  WeightedGraph g = two_cliques();
  Partition p = fastgreedy_partition(g, 2);
  CHECK(p.assignment() == std::vector<int>{0, 0, 0, 0, 1, 1, 1, 1});
  double q = modularity(g, p);
  for (unsigned mask = 1; mask < (1u << 7); ++mask) {
    std::vector<int> label(8, 0);
    for (int i = 1; i < 8; ++i) label[static_cast<std::size_t>(i)] = static_cast<int>((mask >> (i - 1)) & 1u);
    CHECK(oracle::modularity(8, g.edges, g.weights, label) <= q + 1e-12);
  }
}

TEST_CASE("fastgreedy with k = 1 keeps everything together") {
  CHECK(fastgreedy_partition(two_cliques(), 1).k() == 1);
}

TEST_CASE("fastgreedy on a star splits one community off the hub") {
  std::vector<std::pair<int, int>> e;
  std::vector<double> w;
  for (int leaf = 1; leaf <= 6; ++leaf) {
    e.emplace_back(0, leaf);
    w.push_back(1.0 + 0.1 * leaf);
  }
  WeightedGraph g = WeightedGraph::from_edges(7, e, w);
  std::vector<GreedyMerge> trace;
  Partition p = fastgreedy_partition(g, 2, &trace);
  CHECK(p.k() == 2);
  CHECK(trace.size() == 5);
  replay(g, trace, p);
  int hub = p.cluster_of(0);
  CHECK(std::count(p.assignment().begin(), p.assignment().end(), hub) >= 2);
}

TEST_CASE("fastgreedy ties go to the lexicographically first pair") {
  // Unit 4-cycle: every first merge has the same dQ.
  WeightedGraph g = WeightedGraph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}, {1, 1, 1, 1});
  std::vector<GreedyMerge> trace;
  fastgreedy_partition(g, 3, &trace);
  REQUIRE(trace.size() == 1);
  CHECK(trace[0].into == 0);
  CHECK(trace[0].from == 1);
}

TEST_CASE("fastgreedy merges are greedy-optimal on random graphs") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 15; ++trial) {
    int n = std::uniform_int_distribution<int>(4, 14)(rng);
    WeightedGraph g = random_weighted(rng, n, n + std::uniform_int_distribution<int>(0, n)(rng));
    int k = std::uniform_int_distribution<int>(1, n)(rng);
    std::vector<GreedyMerge> trace;
    Partition p = fastgreedy_partition(g, k, &trace);
    CHECK(p.k() == k);
    CHECK(static_cast<int>(trace.size()) == n - k);
    replay(g, trace, p);
  }
}

TEST_CASE("repair leaves connected clusters alone") {
  WeightedGraph g = two_triangles();
  Partition p({0, 0, 0, 1, 1, 1}, 2);
  RepairResult r = ensure_connected_clusters(g, p);
  CHECK(r.partition == p);
  CHECK(r.moved_buses == 0);
  CHECK(r.added_clusters == 0);
}

TEST_CASE("repair moves a stray fragment to the most strongly coupled neighbour") {
  // Path 0-1-2-3-4; cluster 0 = {0, 4} is split, cluster 1 = {1, 2}, cluster 2 = {3}.
  WeightedGraph g = WeightedGraph::from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}, {1.0, 1.0, 1.0, 2.0});
  RepairResult r = ensure_connected_clusters(g, Partition({0, 1, 1, 2, 0}, 3));
  CHECK(r.partition.assignment() == std::vector<int>{0, 1, 1, 2, 2});
  CHECK(r.moved_buses == 1);
  CHECK(r.added_clusters == 0);
}

TEST_CASE("repaired random partitions always have connected clusters") {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 50; ++trial) {
    int n = std::uniform_int_distribution<int>(2, 50)(rng);
    WeightedGraph g = random_weighted(rng, n, n - 1 + std::uniform_int_distribution<int>(0, n / 2)(rng));
    int k = std::uniform_int_distribution<int>(1, std::min(n, 8))(rng);
    std::vector<int> label(static_cast<std::size_t>(n));
    for (int& l : label) l = static_cast<int>(rng() % static_cast<unsigned>(k));
    Partition p = Partition::canonical(label);
    RepairResult r = ensure_connected_clusters(g, p);
    CHECK(clusters_are_connected(g, r.partition));
    CHECK(r.partition.k() == p.k() + r.added_clusters);
    CHECK(r.partition.size() == n);
  }
}

TEST_CASE("every clusterer returns k connected clusters on IEEE-30 flows") {
  Network g = to_network(load_case(support::data_path("snapshots/ieee30_dc.json")), Engine::kDC);
  WeightedGraph w = WeightedGraph::from_flows(g, solve_dc(g).flows);
  for (Clusterer c : {Clusterer::kFastgreedy, Clusterer::kSpectralLN, Clusterer::kSpectralBN}) {
    CAPTURE(to_string(c));
    Partition p = cluster_graph(w, 5, c, 1);
    CHECK(p.k() == 5);
    RepairResult r = ensure_connected_clusters(w, p);
    CHECK(clusters_are_connected(w, r.partition));
    CHECK(r.partition.k() >= 5);
  }
}

TEST_CASE("induced subgraphs keep weights and renumber vertices") {
  WeightedGraph g = two_triangles(0.5);
  std::vector<int> keep{3, 2, 4};
  WeightedGraph s = g.induced(keep);
  CHECK(s.n == 3);
  CHECK(s.edges.size() == 2);
  CHECK(s.total == doctest::Approx(1.5));
}

}  // TEST_SUITE
