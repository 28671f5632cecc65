#include "tpart/obs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "internal.hpp"
#include "tpart/error.hpp"

namespace tpart {

ObsInstance ObsInstance::make(Network network, Partition partition, Engine engine) {
  if (partition.size() != network.bus_count()) {
    throw Error(ErrorCode::kInvalidArgument, "partition does not match the network");
  }
  if (partition.k() < 2) throw Error(ErrorCode::kInvalidArgument, "OBS needs at least two clusters");
  if (!clusters_connected(network, partition)) {
    throw Error(ErrorCode::kInvalidArgument, "OBS needs internally connected clusters");
  }
  ReducedGraph reduced = cross_edges(network, partition);
  if (!reduced.connected()) throw Error(ErrorCode::kDisconnected, "reduced graph is disconnected");
  return ObsInstance{std::move(network), std::move(partition), std::move(reduced), engine};
}

SwitchSet ObsInstance::switch_for(std::span<const int> kept) const {
  std::vector<bool> keep(reduced.edges.size(), false);
  for (int e : kept) keep[static_cast<std::size_t>(e)] = true;
  std::vector<LineId> off;
  for (std::size_t e = 0; e < reduced.edges.size(); ++e) {
    if (!keep[e]) off.push_back(reduced.edges[e].id);
  }
  return SwitchSet(std::move(off));
}

namespace {

struct Candidate {
  std::vector<int> kept;      // reduced edge indices
  std::vector<LineId> ids;    // sorted kept line ids
  double gamma = kInfinity;   // NaN when the flow solve failed
};

}  // namespace

ObsSolution solve_bruteforce(const ObsInstance& instance, const BruteForceOptions& options) {
  const double count = matrix_tree_count(instance.reduced);
  if (count > static_cast<double>(options.max_trees)) {
    throw Error(ErrorCode::kInvalidArgument,
                "reduced graph has " + std::to_string(static_cast<long long>(count)) +
                    " spanning trees, above the brute-force limit");
  }
  std::vector<Candidate> cands;
  enumerate_spanning_trees(instance.reduced, [&](std::span<const int> tree) {
    Candidate c;
    c.kept.assign(tree.begin(), tree.end());
    for (int e : tree) c.ids.push_back(instance.reduced.edges[static_cast<std::size_t>(e)].id);
    std::sort(c.ids.begin(), c.ids.end());
    cands.push_back(std::move(c));
    return true;
  });

  auto evaluate = [&](Candidate& c) {
    SwitchSet off = instance.switch_for(c.kept);
    Network g = apply_switch(instance.network, off);
    if (instance.engine == Engine::kDC) {
      c.gamma = congestion_dc(solve_dc(g), g).gamma;
    } else {
      try {
        AcSolution s = solve_ac_with_fallback(g, options.warm_start, options.ac);
        c.gamma = congestion_ac(s, g).gamma;
      } catch (const NotConvergedError&) {
        c.gamma = std::numeric_limits<double>::quiet_NaN();
      }
    }
  };

  detail::parallel_for(cands.size(), options.threads, [&](std::size_t i) { evaluate(cands[i]); });

  ObsSolution out;
  double gmin = kInfinity;
  for (const Candidate& c : cands) {
    if (std::isnan(c.gamma)) {
      ++out.stats.trees_skipped;
      continue;
    }
    ++out.stats.trees_evaluated;
    gmin = std::min(gmin, c.gamma);
  }
  if (out.stats.trees_evaluated == 0) {
    throw Error(ErrorCode::kInfeasible, "no spanning tree admits a converged power flow");
  }
  const double cut = gmin + options.tie_tolerance * std::max(1.0, std::abs(gmin));
  const Candidate* best = nullptr;
  for (const Candidate& c : cands) {
    if (std::isnan(c.gamma) || c.gamma > cut) continue;
    if (!best || c.ids < best->ids) best = &c;
  }

  out.kept_tree = best->ids;
  out.switched = instance.switch_for(best->kept);
  out.gamma = best->gamma;
  out.optimal = out.stats.trees_skipped == 0;
  Network g = apply_switch(instance.network, out.switched);
  if (instance.engine == Engine::kDC) {
    out.dc = solve_dc(g);
  } else {
    out.ac = solve_ac_with_fallback(g, options.warm_start, options.ac);
  }
  return out;
}

}  // namespace tpart
