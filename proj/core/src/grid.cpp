#include "tpart/grid.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "tpart/error.hpp"

namespace tpart {

namespace {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)), rank_(static_cast<std::size_t>(n), 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) const {
    while (parent_[static_cast<std::size_t>(x)] != x) x = parent_[static_cast<std::size_t>(x)];
    return x;
  }

  // Union by rank without path compression so that `undo` can restore state.
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    auto ua = static_cast<std::size_t>(a);
    auto ub = static_cast<std::size_t>(b);
    if (rank_[ua] < rank_[ub]) std::swap(ua, ub);
    history_.push_back({static_cast<int>(ub), rank_[ua] == rank_[ub]});
    parent_[ub] = static_cast<int>(ua);
    if (rank_[ua] == rank_[ub]) ++rank_[ua];
    return true;
  }

  void undo() {
    auto [child, bumped] = history_.back();
    history_.pop_back();
    auto c = static_cast<std::size_t>(child);
    auto root = static_cast<std::size_t>(parent_[c]);
    if (bumped) --rank_[root];
    parent_[c] = child;
  }

 private:
  std::vector<int> parent_;
  std::vector<int> rank_;
  std::vector<std::pair<int, bool>> history_;
};

std::string describe_components(const std::vector<int>& comp, const std::vector<Bus>& buses) {
  int count = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
  std::vector<std::vector<int>> members(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < comp.size(); ++i) {
    members[static_cast<std::size_t>(comp[i])].push_back(buses[i].id);
  }
  std::ostringstream os;
  os << count << " components:";
  for (const auto& m : members) {
    os << " {";
    for (std::size_t j = 0; j < m.size() && j < 8; ++j) os << (j ? "," : "") << m[j];
    if (m.size() > 8) os << ",... (" << m.size() << " buses)";
    os << "}";
  }
  return os.str();
}

}  // namespace

Adjacency::Adjacency(int vertex_count, std::span<const std::pair<int, int>> edges)
    : neighbours(static_cast<std::size_t>(vertex_count)) {
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto [a, b] = edges[e];
    neighbours[static_cast<std::size_t>(a)].emplace_back(b, static_cast<int>(e));
    neighbours[static_cast<std::size_t>(b)].emplace_back(a, static_cast<int>(e));
  }
}

std::vector<int> connected_components(int vertex_count, std::span<const std::pair<int, int>> edges,
                                      const std::vector<bool>& skip) {
  Adjacency adj(vertex_count, edges);
  std::vector<int> comp(static_cast<std::size_t>(vertex_count), -1);
  std::vector<int> stack;
  int next = 0;
  for (int s = 0; s < vertex_count; ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    comp[static_cast<std::size_t>(s)] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (auto [w, e] : adj.neighbours[static_cast<std::size_t>(v)]) {
        if (!skip.empty() && skip[static_cast<std::size_t>(e)]) continue;
        if (comp[static_cast<std::size_t>(w)] < 0) {
          comp[static_cast<std::size_t>(w)] = next;
          stack.push_back(w);
        }
      }
    }
    ++next;
  }
  return comp;
}

// ---------------------------------------------------------------- Network

Network::Network(std::vector<Bus> buses, std::vector<Line> lines, int reference_bus)
    : buses_(std::move(buses)), lines_(std::move(lines)), reference_(reference_bus) {}

Network Network::create(std::vector<Bus> buses, std::vector<Line> lines, int reference_bus) {
  const int n = static_cast<int>(buses.size());
  if (n == 0) throw Error(ErrorCode::kInvalidCase, "network has no buses");
  if (reference_bus < 0 || reference_bus >= n) {
    throw Error(ErrorCode::kInvalidCase, "reference bus index out of range");
  }
  for (const Line& l : lines) {
    if (l.from < 0 || l.from >= n || l.to < 0 || l.to >= n) {
      throw Error(ErrorCode::kInvalidCase, "line " + std::to_string(to_int(l.id)) + " references an unknown bus");
    }
    if (l.from == l.to) {
      throw Error(ErrorCode::kInvalidCase, "line " + std::to_string(to_int(l.id)) + " is a self loop");
    }
    if (!(l.b > 0.0) || !std::isfinite(l.b)) {
      throw Error(ErrorCode::kInvalidCase,
                  "line " + std::to_string(to_int(l.id)) + " must have a finite positive susceptance");
    }
    if (!l.unlimited && !(l.capacity > 0.0)) {
      throw Error(ErrorCode::kInvalidCase, "line " + std::to_string(to_int(l.id)) + " has non-positive capacity");
    }
  }
  std::vector<std::pair<int, int>> edges;
  edges.reserve(lines.size());
  for (const Line& l : lines) edges.emplace_back(l.from, l.to);
  auto comp = connected_components(n, edges);
  if (std::any_of(comp.begin(), comp.end(), [](int c) { return c != 0; })) {
    throw Error(ErrorCode::kDisconnected, "network is disconnected, " + describe_components(comp, buses));
  }
  return Network(std::move(buses), std::move(lines), reference_bus);
}

std::optional<int> Network::line_index(LineId id) const {
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    if (lines_[i].id == id) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::optional<int> Network::bus_index(int external_id) const {
  for (std::size_t i = 0; i < buses_.size(); ++i) {
    if (buses_[i].id == external_id) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::vector<std::pair<int, int>> Network::edge_list() const {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(lines_.size());
  for (const Line& l : lines_) edges.emplace_back(l.from, l.to);
  return edges;
}

std::vector<double> Network::injections() const {
  std::vector<double> p;
  p.reserve(buses_.size());
  for (const Bus& b : buses_) p.push_back(b.p);
  return p;
}

Network Network::with_injections(std::span<const double> p) const {
  if (p.size() != buses_.size()) throw Error(ErrorCode::kInvalidArgument, "injection vector has wrong length");
  Network copy = *this;
  for (std::size_t i = 0; i < p.size(); ++i) copy.buses_[i].p = p[i];
  return copy;
}

Network Network::with_scaled_susceptance(double factor) const {
  if (!(factor > 0.0)) throw Error(ErrorCode::kInvalidArgument, "susceptance scale must be positive");
  Network copy = *this;
  for (Line& l : copy.lines_) {
    l.b *= factor;
    l.x /= factor;
  }
  return copy;
}

Network Network::with_scaled_capacity(double factor) const {
  if (!(factor > 0.0)) throw Error(ErrorCode::kInvalidArgument, "capacity scale must be positive");
  Network copy = *this;
  for (Line& l : copy.lines_) {
    if (!l.unlimited) l.capacity *= factor;
  }
  return copy;
}

// -------------------------------------------------------------- Partition

Partition::Partition(std::vector<int> assignment, int k) : assignment_(std::move(assignment)), k_(k) {
  if (k_ < 1) throw Error(ErrorCode::kInvalidArgument, "partition needs at least one cluster");
  std::vector<int> count(static_cast<std::size_t>(k_), 0);
  for (int c : assignment_) {
    if (c < 0 || c >= k_) throw Error(ErrorCode::kInvalidArgument, "cluster id out of range");
    ++count[static_cast<std::size_t>(c)];
  }
  if (std::find(count.begin(), count.end(), 0) != count.end()) {
    throw Error(ErrorCode::kInvalidArgument, "partition has an empty cluster");
  }
}

Partition Partition::canonical(std::span<const int> labels) {
  std::unordered_map<int, int> relabel;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int label : labels) {
    auto [it, inserted] = relabel.try_emplace(label, static_cast<int>(relabel.size()));
    out.push_back(it->second);
  }
  return Partition(std::move(out), static_cast<int>(relabel.size()));
}

Partition Partition::single(int bus_count) {
  return Partition(std::vector<int>(static_cast<std::size_t>(bus_count), 0), 1);
}

std::vector<std::vector<int>> Partition::clusters() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(k_));
  for (std::size_t i = 0; i < assignment_.size(); ++i) {
    out[static_cast<std::size_t>(assignment_[i])].push_back(static_cast<int>(i));
  }
  return out;
}

// ----------------------------------------------------------- ReducedGraph

std::vector<std::pair<int, int>> ReducedGraph::edge_list() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(edges.size());
  for (const auto& e : edges) out.emplace_back(e.u, e.v);
  return out;
}

bool ReducedGraph::connected() const {
  if (k <= 1) return true;
  auto list = edge_list();
  auto comp = connected_components(k, list);
  return std::all_of(comp.begin(), comp.end(), [](int c) { return c == 0; });
}

// ---------------------------------------------------------------- Bridges

std::vector<int> find_bridge_edges(int vertex_count, std::span<const std::pair<int, int>> edges) {
  Adjacency adj(vertex_count, edges);
  const auto n = static_cast<std::size_t>(vertex_count);
  std::vector<int> disc(n, -1);
  std::vector<int> low(n, 0);
  std::vector<int> bridges;

  struct Frame {
    int vertex;
    int parent_edge;
    std::size_t next;
  };
  std::vector<Frame> stack;
  int timer = 0;
  for (int root = 0; root < vertex_count; ++root) {
    if (disc[static_cast<std::size_t>(root)] >= 0) continue;
    disc[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = timer++;
    stack.push_back({root, -1, 0});
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto v = static_cast<std::size_t>(f.vertex);
      if (f.next < adj.neighbours[v].size()) {
        auto [w, e] = adj.neighbours[v][f.next++];
        if (e == f.parent_edge) continue;  // parallel edges have distinct indices
        const auto wi = static_cast<std::size_t>(w);
        if (disc[wi] < 0) {
          disc[wi] = low[wi] = timer++;
          stack.push_back({w, e, 0});
        } else {
          low[v] = std::min(low[v], disc[wi]);
        }
      } else {
        const int child = f.vertex;
        const int via = f.parent_edge;
        stack.pop_back();
        if (!stack.empty()) {
          const auto p = static_cast<std::size_t>(stack.back().vertex);
          const auto c = static_cast<std::size_t>(child);
          low[p] = std::min(low[p], low[c]);
          if (low[c] > disc[p]) bridges.push_back(via);
        }
      }
    }
  }
  std::sort(bridges.begin(), bridges.end());
  return bridges;
}

std::vector<LineId> find_bridges(const Network& network) {
  auto edges = network.edge_list();
  std::vector<LineId> out;
  for (int e : find_bridge_edges(network.bus_count(), edges)) out.push_back(network.line(e).id);
  std::sort(out.begin(), out.end());
  return out;
}

BridgeBlockDecomposition bridge_block_decomposition(const Network& network) {
  auto edges = network.edge_list();
  auto bridge_idx = find_bridge_edges(network.bus_count(), edges);
  std::vector<bool> skip(edges.size(), false);
  BridgeBlockDecomposition bbd;
  for (int e : bridge_idx) {
    skip[static_cast<std::size_t>(e)] = true;
    bbd.bridges.push_back(network.line(e).id);
  }
  std::sort(bbd.bridges.begin(), bbd.bridges.end());
  bbd.block_of = connected_components(network.bus_count(), edges, skip);
  int count = *std::max_element(bbd.block_of.begin(), bbd.block_of.end()) + 1;
  bbd.blocks.resize(static_cast<std::size_t>(count));
  for (int i = 0; i < network.bus_count(); ++i) {
    bbd.blocks[static_cast<std::size_t>(bbd.block_of[static_cast<std::size_t>(i)])].push_back(i);
  }
  return bbd;
}

std::vector<int> BridgeBlockDecomposition::nontrivial_sizes() const {
  std::vector<int> sizes;
  for (const auto& b : blocks) {
    if (b.size() >= 2) sizes.push_back(static_cast<int>(b.size()));
  }
  std::sort(sizes.rbegin(), sizes.rend());
  return sizes;
}

Partition BridgeBlockDecomposition::as_partition() const {
  return Partition(block_of, static_cast<int>(blocks.size()));
}

// ------------------------------------------------------------- Partitions

ReducedGraph cross_edges(const Network& network, const Partition& partition) {
  if (partition.size() != network.bus_count()) {
    throw Error(ErrorCode::kInvalidArgument, "partition size does not match the network");
  }
  ReducedGraph rg;
  rg.k = partition.k();
  for (int i = 0; i < network.line_count(); ++i) {
    const Line& l = network.line(i);
    int u = partition.cluster_of(l.from);
    int v = partition.cluster_of(l.to);
    if (u == v) {
      rg.internal_lines.push_back(i);
    } else {
      rg.edges.push_back({u, v, i, l.id});
    }
  }
  return rg;
}

bool clusters_connected(const Network& network, const Partition& partition) {
  auto edges = network.edge_list();
  std::vector<bool> skip(edges.size(), false);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    skip[e] = partition.cluster_of(edges[e].first) != partition.cluster_of(edges[e].second);
  }
  auto comp = connected_components(network.bus_count(), edges, skip);
  std::vector<int> seen(static_cast<std::size_t>(partition.k()), -1);
  for (int i = 0; i < network.bus_count(); ++i) {
    auto c = static_cast<std::size_t>(partition.cluster_of(i));
    if (seen[c] < 0) {
      seen[c] = comp[static_cast<std::size_t>(i)];
    } else if (seen[c] != comp[static_cast<std::size_t>(i)]) {
      return false;
    }
  }
  return true;
}

bool is_tree_partition(const Network& network, const Partition& partition) {
  ReducedGraph rg = cross_edges(network, partition);
  if (static_cast<int>(rg.edges.size()) != rg.k - 1) return false;
  if (!rg.connected()) return false;
  return clusters_connected(network, partition);
}

// --------------------------------------------------------- Spanning trees

std::size_t enumerate_spanning_trees(const ReducedGraph& reduced,
                                     const std::function<bool(std::span<const int>)>& visit) {
  const int k = reduced.k;
  const int m = static_cast<int>(reduced.edges.size());
  if (!reduced.connected()) {
    throw Error(ErrorCode::kDisconnected, "reduced graph is disconnected");
  }
  std::size_t visited = 0;
  if (k <= 1) {
    visit({});
    return 1;
  }

  UnionFind uf(k);
  std::vector<int> chosen;
  chosen.reserve(static_cast<std::size_t>(k - 1));
  bool stop = false;

  // Can the chosen edges plus edges[from..] still span all clusters?
  auto still_spannable = [&](int from) {
    UnionFind probe(k);
    int merges = 0;
    for (int e : chosen) merges += probe.unite(reduced.edges[static_cast<std::size_t>(e)].u,
                                               reduced.edges[static_cast<std::size_t>(e)].v);
    for (int e = from; e < m && merges < k - 1; ++e) {
      merges += probe.unite(reduced.edges[static_cast<std::size_t>(e)].u, reduced.edges[static_cast<std::size_t>(e)].v);
    }
    return merges == k - 1;
  };

  std::function<void(int)> recurse = [&](int idx) {
    if (stop) return;
    if (static_cast<int>(chosen.size()) == k - 1) {
      ++visited;
      if (!visit(chosen)) stop = true;
      return;
    }
    if (idx >= m) return;
    const auto& e = reduced.edges[static_cast<std::size_t>(idx)];
    if (uf.unite(e.u, e.v)) {
      chosen.push_back(idx);
      recurse(idx + 1);
      chosen.pop_back();
      uf.undo();
    }
    if (!stop && still_spannable(idx + 1)) recurse(idx + 1);
  };
  recurse(0);
  return visited;
}

double matrix_tree_count(const ReducedGraph& reduced) {
  const int k = reduced.k;
  if (k <= 1) return 1.0;
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(k, k);
  for (const auto& e : reduced.edges) {
    if (e.u == e.v) continue;
    lap(e.u, e.u) += 1.0;
    lap(e.v, e.v) += 1.0;
    lap(e.u, e.v) -= 1.0;
    lap(e.v, e.u) -= 1.0;
  }
  Eigen::MatrixXd minor = lap.bottomRightCorner(k - 1, k - 1);
  return std::max(0.0, std::round(minor.partialPivLu().determinant()));
}

// -------------------------------------------------------------- Switching

Network apply_switch(const Network& network, const SwitchSet& switched) {
  if (switched.empty()) return network;
  std::vector<Line> kept;
  kept.reserve(network.lines().size());
  std::size_t removed = 0;
  for (const Line& l : network.lines()) {
    if (switched.contains(l.id)) {
      ++removed;
    } else {
      kept.push_back(l);
    }
  }
  if (removed != switched.size()) {
    throw Error(ErrorCode::kInvalidArgument, "switch set names lines that are not in the network");
  }
  try {
    return Network::create(network.buses(), std::move(kept), network.reference_bus());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDisconnected) {
      throw Error(ErrorCode::kDisconnected, std::string("post-switching ") + e.what());
    }
    throw;
  }
}

}  // namespace tpart
