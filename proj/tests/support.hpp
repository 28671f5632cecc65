#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tpart/grid.hpp"

namespace support {

inline std::string data_path(const std::string& rel) { return std::string(TPART_TEST_DATA_DIR) + "/" + rel; }

/// Random connected multigraph: a random spanning tree plus extra edges
/// (parallel edges allowed, no self loops).
inline std::vector<std::pair<int, int>> random_connected_edges(std::mt19937_64& rng, int n, int m) {
  std::vector<std::pair<int, int>> edges;
  for (int v = 1; v < n; ++v) {
    int u = std::uniform_int_distribution<int>(0, v - 1)(rng);
    edges.emplace_back(u, v);
  }
  if (n < 2) return edges;
  std::uniform_int_distribution<int> pick(0, n - 1);
  while (static_cast<int>(edges.size()) < m) {
    int a = pick(rng), b = pick(rng);
    if (a != b) edges.emplace_back(a, b);
  }
  std::shuffle(edges.begin(), edges.end(), rng);
  return edges;
}

/// Random balanced injections with zero sum.
inline std::vector<double> random_injections(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> p(static_cast<std::size_t>(n));
  double sum = 0.0;
  for (double& x : p) {
    x = u(rng);
    sum += x;
  }
  for (double& x : p) x -= sum / n;
  return p;
}

/// Network on `edges` with random susceptances and capacities; bus 0 is slack.
inline tpart::Network random_network(std::mt19937_64& rng, int n, const std::vector<std::pair<int, int>>& edges,
                                     double cap_lo = 0.2, double cap_hi = 2.0) {
  std::vector<tpart::Bus> buses(static_cast<std::size_t>(n));
  std::vector<double> p = random_injections(rng, n);
  for (int i = 0; i < n; ++i) {
    buses[static_cast<std::size_t>(i)].id = i + 1;
    buses[static_cast<std::size_t>(i)].p = p[static_cast<std::size_t>(i)];
  }
  buses[0].type = tpart::BusType::kSlack;
  std::uniform_real_distribution<double> b(0.5, 5.0), c(cap_lo, cap_hi);
  std::vector<tpart::Line> lines;
  for (std::size_t l = 0; l < edges.size(); ++l) {
    tpart::Line line;
    line.id = tpart::line_id(static_cast<std::int32_t>(l + 1));
    line.from = edges[l].first;
    line.to = edges[l].second;
    line.b = b(rng);
    line.x = 1.0 / line.b;
    line.capacity = c(rng);
    line.unlimited = false;
    lines.push_back(line);
  }
  return tpart::Network::create(std::move(buses), std::move(lines), 0);
}

/// Network with unit susceptance and capacity on the given edges.
inline tpart::Network plain_network(int n, const std::vector<std::pair<int, int>>& edges,
                                    const std::vector<double>& p = {}, int reference = 0) {
  std::vector<tpart::Bus> buses(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    buses[static_cast<std::size_t>(i)].id = i + 1;
    if (!p.empty()) buses[static_cast<std::size_t>(i)].p = p[static_cast<std::size_t>(i)];
  }
  buses[static_cast<std::size_t>(reference)].type = tpart::BusType::kSlack;
  std::vector<tpart::Line> lines;
  for (std::size_t l = 0; l < edges.size(); ++l) {
    tpart::Line line;
    line.id = tpart::line_id(static_cast<std::int32_t>(l + 1));
    line.from = edges[l].first;
    line.to = edges[l].second;
    line.b = 1.0;
    line.x = 1.0;
    line.capacity = 1.0;
    line.unlimited = false;
    lines.push_back(line);
  }
  return tpart::Network::create(std::move(buses), std::move(lines), reference);
}

/// Random partition into k connected clusters grown by BFS from k distinct seeds.
inline tpart::Partition random_connected_partition(std::mt19937_64& rng, int n,
                                                   const std::vector<std::pair<int, int>>& edges, int k) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (auto [a, b] : edges) {
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> frontier(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    label[static_cast<std::size_t>(order[static_cast<std::size_t>(c)])] = c;
    frontier[static_cast<std::size_t>(c)].push_back(order[static_cast<std::size_t>(c)]);
  }
  int left = n - k;
  while (left > 0) {
    int c = std::uniform_int_distribution<int>(0, k - 1)(rng);
    auto& f = frontier[static_cast<std::size_t>(c)];
    std::vector<int> options;
    for (int v : f) {
      for (int u : adj[static_cast<std::size_t>(v)]) {
        if (label[static_cast<std::size_t>(u)] < 0) options.push_back(u);
      }
    }
    if (options.empty()) continue;
    int u = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
    if (label[static_cast<std::size_t>(u)] >= 0) continue;
    label[static_cast<std::size_t>(u)] = c;
    f.push_back(u);
    --left;
  }
  return tpart::Partition::canonical(label);
}

}  // namespace support
