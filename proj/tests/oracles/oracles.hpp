#pragma once

// Reference implementations used only by the tests.  Plain std C++, slow on
// purpose, and sharing no code with the library.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Edges = std::vector<std::pair<int, int>>;

/// Vertices reachable from `start`, skipping edges flagged in `skip`.
std::vector<bool> reachable(int n, const Edges& edges, int start, const std::vector<bool>& skip = {});
bool connected(int n, const Edges& edges, const std::vector<bool>& skip = {});

/// Edge indices whose removal disconnects the graph.
std::vector<int> bridges_by_removal(int n, const Edges& edges);

/// Number of spanning trees: exact Bareiss determinant of a Laplacian minor.
std::int64_t kirchhoff_count(int n, const Edges& edges);

struct DcLine {
  int from, to;
  double b;
};

/// DC angles and flows by Gaussian elimination with partial pivoting on the
/// reduced Laplacian (reference bus removed).
struct DcResult {
  std::vector<double> angles;
  std::vector<double> flows;
};
DcResult dense_dc(int n, const std::vector<DcLine>& lines, const std::vector<double>& p, int reference);

/// Q = 1/(2w) sum_ij (A_ij - d_i d_j / 2w) [c_i == c_j] for a weighted multigraph.
double modularity(int n, const Edges& edges, const std::vector<double>& weights, const std::vector<int>& label);

/// Two-way split minimizing the normalized cut cut/vol(S) + cut/vol(S'), by
/// exhaustive search (n <= 20).  Returns labels with vertex 0 in side 0.
std::vector<int> min_normalized_cut(int n, const Edges& edges, const std::vector<double>& weights);

/// Data rows of `mpc.<name> = [ ... ];` in a MATPOWER file, counted line by line.
int matpower_rows(const std::string& path, const std::string& name);

}  // namespace oracle
