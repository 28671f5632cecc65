#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "tpart/grid.hpp"

namespace tpart {

enum class Clusterer { kFastgreedy, kSpectralLN, kSpectralBN };

std::string_view to_string(Clusterer clusterer);

/// Undirected weighted multigraph used for clustering.  One edge per line;
/// parallel lines stay separate edges.
struct WeightedGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<double> weights;
  std::vector<double> degree;
  double total = 0.0;  // sum of edge weights

  /// Weights |flow| per line.  Lines carrying (almost) nothing get
  /// `floor * max|flow|` so the graph stays connected for the embedding.
  static WeightedGraph from_flows(const Network& network, std::span<const double> flows,
                                  double floor = 1e-6);
  static WeightedGraph from_edges(int n, std::vector<std::pair<int, int>> edges,
                                  std::vector<double> weights);

  /// Subgraph induced by `vertices` (renumbered in the given order).
  WeightedGraph induced(std::span<const int> vertices) const;
};

/// Weighted modularity sum_c (e_cc - a_c^2).
double modularity(const WeightedGraph& graph, const Partition& partition);

enum class SpectralMode { kLN, kBN };

struct KMeansOptions {
  int restarts = 10;
  int iterations = 100;
  int max_restarts = 100;  // restarts that end with an empty cluster are retried up to here
};

/// Seeded k-means++ / Lloyd on the rows of `points` (row-major, `dim` columns).
/// Best inertia over restarts; ties go to the earlier restart.
std::vector<int> kmeans(std::span<const double> points, int dim, int k, std::uint64_t seed,
                        const KMeansOptions& options = {});

Partition spectral_partition(const WeightedGraph& graph, int k, SpectralMode mode,
                             std::uint64_t seed, const KMeansOptions& options = {});

/// One agglomeration step of the greedy modularity heuristic.
struct GreedyMerge {
  int into = 0;  // surviving community id (the smaller one)
  int from = 0;
  double delta_q = 0.0;
};

/// Clauset-Newman-Moore agglomeration stopped at exactly k communities.
/// Ties on delta Q go to the lexicographically smallest (i, j) pair.
Partition fastgreedy_partition(const WeightedGraph& graph, int k,
                               std::vector<GreedyMerge>* trace = nullptr);

Partition cluster_graph(const WeightedGraph& graph, int k, Clusterer clusterer, std::uint64_t seed);

struct RepairResult {
  Partition partition;
  int moved_buses = 0;
  int added_clusters = 0;  // fragments with no neighbouring cluster
};

/// Makes every cluster induce a connected subgraph.  Each cluster keeps its
/// largest fragment; the other fragments join the neighbouring cluster with
/// the largest weight coupling to the already settled buses.
RepairResult ensure_connected_clusters(const WeightedGraph& graph, const Partition& partition);
RepairResult ensure_connected_clusters(const Network& network, const Partition& partition,
                                       std::span<const double> line_weights);

}  // namespace tpart
