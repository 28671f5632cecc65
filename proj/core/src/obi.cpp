#include "tpart/obi.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "tpart/error.hpp"

namespace tpart {

std::string_view to_string(Clusterer clusterer) {
  switch (clusterer) {
    case Clusterer::kFastgreedy: return "fastgreedy";
    case Clusterer::kSpectralLN: return "spectral-ln";
    case Clusterer::kSpectralBN: return "spectral-bn";
  }
  return "?";
}

WeightedGraph WeightedGraph::from_edges(int n, std::vector<std::pair<int, int>> edges,
                                        std::vector<double> weights) {
  if (edges.size() != weights.size()) {
    throw Error(ErrorCode::kInvalidArgument, "edge and weight counts differ");
  }
  WeightedGraph g;
  g.n = n;
  g.degree.assign(static_cast<std::size_t>(n), 0.0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto [u, v] = edges[e];
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw Error(ErrorCode::kInvalidArgument, "edge endpoint out of range");
    }
    if (!(weights[e] >= 0.0) || !std::isfinite(weights[e])) {
      throw Error(ErrorCode::kInvalidArgument, "edge weights must be finite and non-negative");
    }
    if (u == v) continue;
    g.degree[static_cast<std::size_t>(u)] += weights[e];
    g.degree[static_cast<std::size_t>(v)] += weights[e];
    g.total += weights[e];
  }
  g.edges = std::move(edges);
  g.weights = std::move(weights);
  return g;
}

WeightedGraph WeightedGraph::from_flows(const Network& network, std::span<const double> flows,
                                        double floor) {
  if (flows.size() != static_cast<std::size_t>(network.line_count())) {
    throw Error(ErrorCode::kInvalidArgument, "one flow per line expected");
  }
  std::vector<double> w(flows.size());
  double top = 0.0;
  for (std::size_t e = 0; e < flows.size(); ++e) {
    w[e] = std::abs(flows[e]);
    top = std::max(top, w[e]);
  }
  const double low = top > 0.0 ? floor * top : 1.0;
  for (double& x : w) x = std::max(x, low);
  return from_edges(network.bus_count(), network.edge_list(), std::move(w));
}

WeightedGraph WeightedGraph::induced(std::span<const int> vertices) const {
  std::vector<int> local(static_cast<std::size_t>(n), -1);
  for (std::size_t i = 0; i < vertices.size(); ++i) local[static_cast<std::size_t>(vertices[i])] = static_cast<int>(i);
  std::vector<std::pair<int, int>> e;
  std::vector<double> w;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    int a = local[static_cast<std::size_t>(edges[k].first)];
    int b = local[static_cast<std::size_t>(edges[k].second)];
    if (a >= 0 && b >= 0) {
      e.emplace_back(a, b);
      w.push_back(weights[k]);
    }
  }
  return from_edges(static_cast<int>(vertices.size()), std::move(e), std::move(w));
}

double modularity(const WeightedGraph& graph, const Partition& partition) {
  if (graph.total <= 0.0) return 0.0;
  std::vector<double> inside(static_cast<std::size_t>(partition.k()), 0.0);
  std::vector<double> a(static_cast<std::size_t>(partition.k()), 0.0);
  const double two_w = 2.0 * graph.total;
  for (int v = 0; v < graph.n; ++v) {
    a[static_cast<std::size_t>(partition.cluster_of(v))] += graph.degree[static_cast<std::size_t>(v)] / two_w;
  }
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    auto [u, v] = graph.edges[e];
    if (u != v && partition.cluster_of(u) == partition.cluster_of(v)) {
      inside[static_cast<std::size_t>(partition.cluster_of(u))] += graph.weights[e] / graph.total;
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) q += inside[c] - a[c] * a[c];
  return q;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Portable uniform double in [0, 1); std distributions differ across libraries.
double uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double sqdist(const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return s;
}

struct Run {
  std::vector<int> labels;
  double inertia = kInfinity;
  bool ok = false;
};

Run lloyd_once(std::span<const double> pts, int n, int dim, int k, std::uint64_t seed, int iterations) {
  std::mt19937_64 rng(seed);
  std::vector<double> centers(static_cast<std::size_t>(k * dim));
  std::vector<double> d2(static_cast<std::size_t>(n), kInfinity);
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);

  auto place = [&](int c, int idx) {
    chosen[static_cast<std::size_t>(idx)] = true;
    std::copy_n(&pts[static_cast<std::size_t>(idx * dim)], dim, &centers[static_cast<std::size_t>(c * dim)]);
    for (int i = 0; i < n; ++i) {
      d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)],
                                                sqdist(&pts[static_cast<std::size_t>(i * dim)],
                                                       &centers[static_cast<std::size_t>(c * dim)], dim));
    }
  };

  place(0, static_cast<int>(uniform(rng) * n) % n);
  for (int c = 1; c < k; ++c) {
    double sum = std::accumulate(d2.begin(), d2.end(), 0.0);
    int pick = -1;
    if (sum > 0.0) {
      double r = uniform(rng) * sum;
      for (int i = 0; i < n; ++i) {
        r -= d2[static_cast<std::size_t>(i)];
        if (r < 0.0 && d2[static_cast<std::size_t>(i)] > 0.0) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {
        for (int i = n - 1; i >= 0; --i) {
          if (d2[static_cast<std::size_t>(i)] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      for (int i = 0; i < n && pick < 0; ++i) {
        if (!chosen[static_cast<std::size_t>(i)]) pick = i;
      }
    }
    place(c, pick);
  }

  Run run;
  run.labels.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> count(static_cast<std::size_t>(k));
  for (int it = 0; it < iterations; ++it) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bd = kInfinity;
      for (int c = 0; c < k; ++c) {
        double d = sqdist(&pts[static_cast<std::size_t>(i * dim)], &centers[static_cast<std::size_t>(c * dim)], dim);
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      if (run.labels[static_cast<std::size_t>(i)] != best) {
        run.labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed && it > 0) break;
    std::fill(centers.begin(), centers.end(), 0.0);
    std::fill(count.begin(), count.end(), 0);
    for (int i = 0; i < n; ++i) {
      int c = run.labels[static_cast<std::size_t>(i)];
      ++count[static_cast<std::size_t>(c)];
      for (int d = 0; d < dim; ++d) centers[static_cast<std::size_t>(c * dim + d)] += pts[static_cast<std::size_t>(i * dim + d)];
    }
    for (int c = 0; c < k; ++c) {
      if (count[static_cast<std::size_t>(c)] == 0) return run;  // empty cluster: restart
      for (int d = 0; d < dim; ++d) centers[static_cast<std::size_t>(c * dim + d)] /= count[static_cast<std::size_t>(c)];
    }
  }
  run.inertia = 0.0;
  for (int i = 0; i < n; ++i) {
    int c = run.labels[static_cast<std::size_t>(i)];
    run.inertia += sqdist(&pts[static_cast<std::size_t>(i * dim)], &centers[static_cast<std::size_t>(c * dim)], dim);
  }
  run.ok = true;
  return run;
}

}  // namespace

std::vector<int> kmeans(std::span<const double> points, int dim, int k, std::uint64_t seed,
                        const KMeansOptions& options) {
  if (dim <= 0 || points.size() % static_cast<std::size_t>(dim) != 0) {
    throw Error(ErrorCode::kInvalidArgument, "k-means: bad point layout");
  }
  const int n = static_cast<int>(points.size() / static_cast<std::size_t>(dim));
  if (k < 1 || k > n) throw Error(ErrorCode::kInvalidArgument, "k-means: need 1 <= k <= n");
  Run best;
  int good = 0;
  for (int r = 0; r < options.max_restarts && good < options.restarts; ++r) {
    Run run = lloyd_once(points, n, dim, k, splitmix(seed + static_cast<std::uint64_t>(r)), options.iterations);
    if (!run.ok) continue;
    ++good;
    if (run.inertia < best.inertia) best = std::move(run);
  }
  if (!best.ok) {
    throw Error(ErrorCode::kClustering, "k-means produced an empty cluster in every restart");
  }
  return best.labels;
}

Partition spectral_partition(const WeightedGraph& graph, int k, SpectralMode mode,
                             std::uint64_t seed, const KMeansOptions& options) {
  const int n = graph.n;
  if (k < 1 || k > n) throw Error(ErrorCode::kInvalidArgument, "spectral clustering needs 1 <= k <= n");
  if (k == 1) return Partition::single(n);
  if (k == n) {
    std::vector<int> id(static_cast<std::size_t>(n));
    std::iota(id.begin(), id.end(), 0);
    return Partition(std::move(id), n);
  }
  if (graph.total <= 0.0) throw Error(ErrorCode::kInvalidArgument, "graph has no positive edge weight");

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    auto [u, v] = graph.edges[e];
    if (u == v) continue;
    w(u, v) += graph.weights[e];
    w(v, u) += graph.weights[e];
  }
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(graph.degree.data(), n);
  Eigen::VectorXd dinv(n);
  for (int i = 0; i < n; ++i) dinv(i) = d(i) > 0.0 ? 1.0 / std::sqrt(d(i)) : 0.0;

  Eigen::MatrixXd m;
  if (mode == SpectralMode::kLN) {
    m = -(dinv.asDiagonal() * w * dinv.asDiagonal());
    m.diagonal().array() += 1.0;
  } else {
    Eigen::MatrixXd b = w - d * d.transpose() / (2.0 * graph.total);
    m = dinv.asDiagonal() * b * dinv.asDiagonal();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::kEigenSolver, "eigen decomposition failed");

  // Eigenvalues come out ascending.
  Eigen::MatrixXd u = mode == SpectralMode::kLN ? eig.eigenvectors().leftCols(k)
                                                : eig.eigenvectors().rightCols(k);
  std::vector<double> pts(static_cast<std::size_t>(n * k));
  for (int i = 0; i < n; ++i) {
    double norm = u.row(i).norm();
    for (int c = 0; c < k; ++c) pts[static_cast<std::size_t>(i * k + c)] = norm > 0.0 ? u(i, c) / norm : 0.0;
  }
  std::vector<int> labels = kmeans(pts, k, k, seed, options);
  return Partition::canonical(labels);
}

Partition fastgreedy_partition(const WeightedGraph& graph, int k, std::vector<GreedyMerge>* trace) {
  const int n = graph.n;
  if (k < 1 || k > n) throw Error(ErrorCode::kInvalidArgument, "fastgreedy needs 1 <= k <= n");
  const double two_w = graph.total > 0.0 ? 2.0 * graph.total : 1.0;

  std::vector<double> a(static_cast<std::size_t>(n));
  std::vector<std::map<int, double>> e(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) a[static_cast<std::size_t>(v)] = graph.degree[static_cast<std::size_t>(v)] / two_w;
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    auto [u, v] = graph.edges[i];
    if (u == v) continue;
    e[static_cast<std::size_t>(u)][v] += graph.weights[i] / two_w;
    e[static_cast<std::size_t>(v)][u] += graph.weights[i] / two_w;
  }
  std::vector<int> label(static_cast<std::size_t>(n));
  std::iota(label.begin(), label.end(), 0);
  std::vector<bool> alive(static_cast<std::size_t>(n), true);

  for (int count = n; count > k; --count) {
    int bi = -1, bj = -1;
    double best = -kInfinity;
    for (int i = 0; i < n; ++i) {
      if (!alive[static_cast<std::size_t>(i)]) continue;
      for (auto [j, eij] : e[static_cast<std::size_t>(i)]) {
        if (j <= i) continue;
        double dq = 2.0 * (eij - a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(j)]);
        if (dq > best) {
          best = dq;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi < 0) {
      // No adjacent communities left: the graph is disconnected.
      for (int i = 0; i < n; ++i) {
        if (!alive[static_cast<std::size_t>(i)]) continue;
        for (int j = i + 1; j < n; ++j) {
          if (!alive[static_cast<std::size_t>(j)]) continue;
          double dq = -2.0 * a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(j)];
          if (dq > best) {
            best = dq;
            bi = i;
            bj = j;
          }
        }
      }
    }
    if (trace) trace->push_back({bi, bj, best});
    a[static_cast<std::size_t>(bi)] += a[static_cast<std::size_t>(bj)];
    auto& ei = e[static_cast<std::size_t>(bi)];
    for (auto [l, ejl] : e[static_cast<std::size_t>(bj)]) {
      e[static_cast<std::size_t>(l)].erase(bj);
      if (l == bi) continue;
      ei[l] += ejl;
      e[static_cast<std::size_t>(l)][bi] += ejl;
    }
    ei.erase(bj);
    e[static_cast<std::size_t>(bj)].clear();
    alive[static_cast<std::size_t>(bj)] = false;
    for (int& l : label) {
      if (l == bj) l = bi;
    }
  }
  return Partition::canonical(label);
}

Partition cluster_graph(const WeightedGraph& graph, int k, Clusterer clusterer, std::uint64_t seed) {
  switch (clusterer) {
    case Clusterer::kFastgreedy: return fastgreedy_partition(graph, k);
    case Clusterer::kSpectralLN: return spectral_partition(graph, k, SpectralMode::kLN, seed);
    case Clusterer::kSpectralBN: return spectral_partition(graph, k, SpectralMode::kBN, seed);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown clusterer");
}

RepairResult ensure_connected_clusters(const WeightedGraph& graph, const Partition& partition) {
  const int n = graph.n;
  if (partition.size() != n) throw Error(ErrorCode::kInvalidArgument, "partition size differs from graph");

  // Split every cluster into fragments (components of the induced subgraph).
  std::vector<bool> cut(graph.edges.size(), false);
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    cut[e] = partition.cluster_of(graph.edges[e].first) != partition.cluster_of(graph.edges[e].second);
  }
  std::vector<int> comp = connected_components(n, graph.edges, cut);
  int fragments = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
  std::vector<int> frag_size(static_cast<std::size_t>(fragments), 0);
  std::vector<int> frag_cluster(static_cast<std::size_t>(fragments), -1);
  for (int v = 0; v < n; ++v) {
    ++frag_size[static_cast<std::size_t>(comp[static_cast<std::size_t>(v)])];
    frag_cluster[static_cast<std::size_t>(comp[static_cast<std::size_t>(v)])] = partition.cluster_of(v);
  }
  // Core of each cluster: its largest fragment, earliest on ties.
  std::vector<int> core(static_cast<std::size_t>(partition.k()), -1);
  for (int f = 0; f < fragments; ++f) {
    int& c = core[static_cast<std::size_t>(frag_cluster[static_cast<std::size_t>(f)])];
    if (c < 0 || frag_size[static_cast<std::size_t>(f)] > frag_size[static_cast<std::size_t>(c)]) c = f;
  }

  std::vector<int> assign = partition.assignment();
  std::vector<bool> settled(static_cast<std::size_t>(n), false);
  std::vector<bool> pending(static_cast<std::size_t>(fragments), true);
  int remaining = fragments;
  for (int c : core) {
    pending[static_cast<std::size_t>(c)] = false;
    --remaining;
  }
  for (int v = 0; v < n; ++v) settled[static_cast<std::size_t>(v)] = !pending[static_cast<std::size_t>(comp[static_cast<std::size_t>(v)])];

  std::vector<std::vector<int>> members(static_cast<std::size_t>(fragments));
  for (int v = 0; v < n; ++v) members[static_cast<std::size_t>(comp[static_cast<std::size_t>(v)])].push_back(v);
  Adjacency adj(n, graph.edges);

  RepairResult out;
  int next_cluster = partition.k();
  while (remaining > 0) {
    bool progress = false;
    for (int f = 0; f < fragments; ++f) {
      if (!pending[static_cast<std::size_t>(f)]) continue;
      std::map<int, double> coupling;
      for (int v : members[static_cast<std::size_t>(f)]) {
        for (auto [u, e] : adj.neighbours[static_cast<std::size_t>(v)]) {
          if (settled[static_cast<std::size_t>(u)]) coupling[assign[static_cast<std::size_t>(u)]] += graph.weights[static_cast<std::size_t>(e)];
        }
      }
      if (coupling.empty()) continue;
      int target = coupling.begin()->first;
      double best = coupling.begin()->second;
      for (auto [c, w] : coupling) {
        if (w > best) {
          best = w;
          target = c;
        }
      }
      for (int v : members[static_cast<std::size_t>(f)]) {
        assign[static_cast<std::size_t>(v)] = target;
        settled[static_cast<std::size_t>(v)] = true;
      }
      out.moved_buses += static_cast<int>(members[static_cast<std::size_t>(f)].size());
      pending[static_cast<std::size_t>(f)] = false;
      --remaining;
      progress = true;
    }
    if (!progress) {
      // Isolated fragment: becomes a cluster of its own.
      for (int f = 0; f < fragments; ++f) {
        if (!pending[static_cast<std::size_t>(f)]) continue;
        for (int v : members[static_cast<std::size_t>(f)]) {
          assign[static_cast<std::size_t>(v)] = next_cluster;
          settled[static_cast<std::size_t>(v)] = true;
        }
        ++next_cluster;
        ++out.added_clusters;
        pending[static_cast<std::size_t>(f)] = false;
        --remaining;
        break;
      }
    }
  }
  out.partition = Partition(std::move(assign), next_cluster);
  return out;
}

RepairResult ensure_connected_clusters(const Network& network, const Partition& partition,
                                       std::span<const double> line_weights) {
  std::vector<double> w(line_weights.begin(), line_weights.end());
  for (double& x : w) x = std::abs(x);
  return ensure_connected_clusters(WeightedGraph::from_edges(network.bus_count(), network.edge_list(), std::move(w)),
                                   partition);
}

}  // namespace tpart
