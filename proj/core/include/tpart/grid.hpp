#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tpart/types.hpp"

namespace tpart {

struct Bus {
  int id = 0;  // external bus number
  BusType type = BusType::kPQ;
  double p = 0.0;  // net active injection, per-unit
  double q = 0.0;  // net reactive injection, per-unit (AC only)
  double vm = 1.0;  // voltage magnitude setpoint / initial guess
  double va = 0.0;  // angle, radians
  double gs = 0.0;  // shunt conductance, per-unit
  double bs = 0.0;  // shunt susceptance, per-unit
  std::optional<double> qmin;  // net reactive injection limits (PV/slack)
  std::optional<double> qmax;
};

struct Line {
  LineId id{};
  int from = 0;  // bus index
  int to = 0;    // bus index
  double b = 1.0;  // DC susceptance 1/x
  double capacity = kInfinity;
  bool unlimited = true;
  double r = 0.0;
  double x = 1.0;
  double charging = 0.0;
  double tap = 1.0;
  double shift = 0.0;  // radians
};

/// Incidence view of an undirected multigraph: for each vertex, the
/// (neighbour, edge index) pairs.
struct Adjacency {
  std::vector<std::vector<std::pair<int, int>>> neighbours;

  Adjacency(int vertex_count, std::span<const std::pair<int, int>> edges);
  int vertex_count() const noexcept { return static_cast<int>(neighbours.size()); }
};

/// Connected components of a multigraph; edges flagged in `skip` are ignored.
/// Returns the component index of each vertex, numbered by smallest vertex.
std::vector<int> connected_components(int vertex_count,
                                      std::span<const std::pair<int, int>> edges,
                                      const std::vector<bool>& skip = {});

/// Immutable transmission network.  Always connected, every susceptance
/// positive and the reference bus in range; `create` enforces this.
class Network {
 public:
  static Network create(std::vector<Bus> buses, std::vector<Line> lines, int reference_bus);

  int bus_count() const noexcept { return static_cast<int>(buses_.size()); }
  int line_count() const noexcept { return static_cast<int>(lines_.size()); }
  const std::vector<Bus>& buses() const noexcept { return buses_; }
  const std::vector<Line>& lines() const noexcept { return lines_; }
  const Bus& bus(int i) const { return buses_[static_cast<std::size_t>(i)]; }
  const Line& line(int i) const { return lines_[static_cast<std::size_t>(i)]; }
  int reference_bus() const noexcept { return reference_; }

  std::optional<int> line_index(LineId id) const;
  std::optional<int> bus_index(int external_id) const;
  std::vector<std::pair<int, int>> edge_list() const;
  std::vector<double> injections() const;

  /// Same topology, new active injections.
  Network with_injections(std::span<const double> p) const;
  /// Same topology and injections, every susceptance multiplied by `factor`.
  Network with_scaled_susceptance(double factor) const;
  /// Same topology and injections, every finite capacity multiplied by `factor`.
  Network with_scaled_capacity(double factor) const;

 private:
  Network(std::vector<Bus> buses, std::vector<Line> lines, int reference_bus);

  std::vector<Bus> buses_;
  std::vector<Line> lines_;
  int reference_;
};

/// Assignment of buses to clusters 0..k-1.  Clusters are non-empty.
class Partition {
 public:
  Partition() = default;
  /// Validates that ids are dense in [0, k) and every cluster is non-empty.
  Partition(std::vector<int> assignment, int k);
  /// Relabels arbitrary labels to 0..k-1 in order of first appearance.
  static Partition canonical(std::span<const int> labels);
  static Partition single(int bus_count);

  int k() const noexcept { return k_; }
  int size() const noexcept { return static_cast<int>(assignment_.size()); }
  int cluster_of(int bus) const { return assignment_[static_cast<std::size_t>(bus)]; }
  const std::vector<int>& assignment() const noexcept { return assignment_; }
  std::vector<std::vector<int>> clusters() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<int> assignment_;
  int k_ = 0;
};

struct ReducedEdge {
  int u = 0;  // cluster of the line's from bus
  int v = 0;  // cluster of the line's to bus
  int line = 0;  // line index in the network
  LineId id{};
};

/// Multigraph on clusters with one edge per cross edge.
struct ReducedGraph {
  int k = 0;
  std::vector<ReducedEdge> edges;
  std::vector<int> internal_lines;  // line indices inside clusters

  std::vector<std::pair<int, int>> edge_list() const;
  bool connected() const;
};

struct BridgeBlockDecomposition {
  std::vector<std::vector<int>> blocks;  // bus indices, each sorted; ordered by smallest bus
  std::vector<LineId> bridges;           // sorted by id
  std::vector<int> block_of;

  /// Sizes of blocks with at least two buses, largest first.
  std::vector<int> nontrivial_sizes() const;
  Partition as_partition() const;
};

std::vector<int> find_bridge_edges(int vertex_count, std::span<const std::pair<int, int>> edges);
std::vector<LineId> find_bridges(const Network& network);
BridgeBlockDecomposition bridge_block_decomposition(const Network& network);

ReducedGraph cross_edges(const Network& network, const Partition& partition);
bool is_tree_partition(const Network& network, const Partition& partition);
/// True when every cluster induces a connected subgraph.
bool clusters_connected(const Network& network, const Partition& partition);

/// Visits every spanning tree of a connected multigraph exactly once.  The
/// callback receives indices into `reduced.edges` in increasing order and
/// returns false to stop early.  Returns the number of trees visited.
std::size_t enumerate_spanning_trees(const ReducedGraph& reduced,
                                     const std::function<bool(std::span<const int>)>& visit);

/// Matrix-tree count (floating point); used to size brute-force work.
double matrix_tree_count(const ReducedGraph& reduced);

/// Post-switching network G minus the switched lines.  Throws if disconnected.
Network apply_switch(const Network& network, const SwitchSet& switched);

}  // namespace tpart
