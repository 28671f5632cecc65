#include "oracles.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace oracle {

std::vector<bool> reachable(int n, const Edges& edges, int start, const std::vector<bool>& skip) {
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<int> stack{start};
  seen[static_cast<std::size_t>(start)] = true;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    // Scan every edge each time: quadratic, but obviously right.
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (!skip.empty() && skip[e]) continue;
      int a = edges[e].first, b = edges[e].second, u = -1;
      if (a == v) u = b;
      if (b == v) u = a;
      if (u >= 0 && !seen[static_cast<std::size_t>(u)]) {
        seen[static_cast<std::size_t>(u)] = true;
        stack.push_back(u);
      }
    }
  }
  return seen;
}

bool connected(int n, const Edges& edges, const std::vector<bool>& skip) {
  if (n == 0) return true;
  for (bool s : reachable(n, edges, 0, skip)) {
    if (!s) return false;
  }
  return true;
}

std::vector<int> bridges_by_removal(int n, const Edges& edges) {
  std::vector<int> out;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    std::vector<bool> skip(edges.size(), false);
    skip[e] = true;
    if (!connected(n, edges, skip)) out.push_back(static_cast<int>(e));
  }
  return out;
}

std::int64_t kirchhoff_count(int n, const Edges& edges) {
  if (n <= 1) return 1;
  const int m = n - 1;  // drop the last vertex
  std::vector<std::vector<__int128>> a(static_cast<std::size_t>(m), std::vector<__int128>(static_cast<std::size_t>(m), 0));
  for (auto [u, v] : edges) {
    if (u == v) continue;
    if (u < m) a[static_cast<std::size_t>(u)][static_cast<std::size_t>(u)] += 1;
    if (v < m) a[static_cast<std::size_t>(v)][static_cast<std::size_t>(v)] += 1;
    if (u < m && v < m) {
      a[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] -= 1;
      a[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] -= 1;
    }
  }
  // Fraction-free elimination; every division is exact.
  __int128 prev = 1;
  int sign = 1;
  for (int k = 0; k < m; ++k) {
    if (a[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] == 0) {
      int swap = -1;
      for (int r = k + 1; r < m; ++r) {
        if (a[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] != 0) {
          swap = r;
          break;
        }
      }
      if (swap < 0) return 0;
      std::swap(a[static_cast<std::size_t>(k)], a[static_cast<std::size_t>(swap)]);
      sign = -sign;
    }
    for (int i = k + 1; i < m; ++i) {
      for (int j = k + 1; j < m; ++j) {
        auto& x = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        x = (x * a[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] -
             a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] * a[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]) /
            prev;
      }
    }
    prev = a[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
  }
  return static_cast<std::int64_t>(sign * a[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(m - 1)]);
}

DcResult dense_dc(int n, const std::vector<DcLine>& lines, const std::vector<double>& p, int reference) {
  std::vector<int> pos(static_cast<std::size_t>(n), -1);
  int m = 0;
  for (int i = 0; i < n; ++i) {
    if (i != reference) pos[static_cast<std::size_t>(i)] = m++;
  }
  std::vector<std::vector<long double>> a(static_cast<std::size_t>(m), std::vector<long double>(static_cast<std::size_t>(m + 1), 0.0L));
  for (const DcLine& l : lines) {
    int u = pos[static_cast<std::size_t>(l.from)], v = pos[static_cast<std::size_t>(l.to)];
    if (u >= 0) a[static_cast<std::size_t>(u)][static_cast<std::size_t>(u)] += l.b;
    if (v >= 0) a[static_cast<std::size_t>(v)][static_cast<std::size_t>(v)] += l.b;
    if (u >= 0 && v >= 0) {
      a[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] -= l.b;
      a[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] -= l.b;
    }
  }
  for (int i = 0; i < n; ++i) {
    if (pos[static_cast<std::size_t>(i)] >= 0) a[static_cast<std::size_t>(pos[static_cast<std::size_t>(i)])][static_cast<std::size_t>(m)] = p[static_cast<std::size_t>(i)];
  }
  for (int k = 0; k < m; ++k) {
    int piv = k;
    for (int r = k + 1; r < m; ++r) {
      if (std::fabs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)]) > std::fabs(a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(k)])) piv = r;
    }
    if (a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(k)] == 0.0L) throw std::runtime_error("singular");
    std::swap(a[static_cast<std::size_t>(k)], a[static_cast<std::size_t>(piv)]);
    for (int r = k + 1; r < m; ++r) {
      long double f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] / a[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
      for (int c = k; c <= m; ++c) a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -= f * a[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)];
    }
  }
  std::vector<long double> x(static_cast<std::size_t>(m), 0.0L);
  for (int k = m - 1; k >= 0; --k) {
    long double s = a[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)];
    for (int c = k + 1; c < m; ++c) s -= a[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)] * x[static_cast<std::size_t>(c)];
    x[static_cast<std::size_t>(k)] = s / a[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
  }
  DcResult out;
  for (int i = 0; i < n; ++i) {
    out.angles.push_back(pos[static_cast<std::size_t>(i)] < 0 ? 0.0 : static_cast<double>(x[static_cast<std::size_t>(pos[static_cast<std::size_t>(i)])]));
  }
  for (const DcLine& l : lines) {
    out.flows.push_back(l.b * (out.angles[static_cast<std::size_t>(l.from)] - out.angles[static_cast<std::size_t>(l.to)]));
  }
  return out;
}

double modularity(int n, const Edges& edges, const std::vector<double>& weights, const std::vector<int>& label) {
  std::vector<std::vector<double>> a(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  double w = 0.0;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto [u, v] = edges[e];
    a[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] += weights[e];
    a[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] += weights[e];
    w += weights[e];
  }
  std::vector<double> d(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) d[static_cast<std::size_t>(i)] += a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  double q = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (label[static_cast<std::size_t>(i)] != label[static_cast<std::size_t>(j)]) continue;
      q += a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] - d[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(j)] / (2.0 * w);
    }
  }
  return q / (2.0 * w);
}

std::vector<int> min_normalized_cut(int n, const Edges& edges, const std::vector<double>& weights) {
  if (n > 20) throw std::invalid_argument("too many vertices");
  double best = INFINITY;
  std::uint32_t best_mask = 0;
  // Vertex 0 always on side 0; bit i set means side 1.
  for (std::uint32_t mask = 1; mask < (1u << (n - 1)); ++mask) {
    std::uint32_t full = mask << 1;
    double cut = 0.0, vol0 = 0.0, vol1 = 0.0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      bool su = (full >> edges[e].first) & 1u, sv = (full >> edges[e].second) & 1u;
      (su ? vol1 : vol0) += weights[e];
      (sv ? vol1 : vol0) += weights[e];
      if (su != sv) cut += weights[e];
    }
    double ncut = cut / vol0 + cut / vol1;
    if (ncut < best) {
      best = ncut;
      best_mask = full;
    }
  }
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = static_cast<int>((best_mask >> i) & 1u);
  return out;
}

int matpower_rows(const std::string& path, const std::string& name) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line, head = "mpc." + name + " = [";
  bool inside = false;
  int rows = 0;
  while (std::getline(in, line)) {
    if (!inside) {
      if (line.rfind(head, 0) == 0) inside = true;
      continue;
    }
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '%') continue;
    if (line.compare(first, 2, "];") == 0) break;
    ++rows;
  }
  return rows;
}

}  // namespace oracle
