#include "tpart/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "internal.hpp"
#include "tpart/error.hpp"

namespace tpart {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct FlowState {
  std::vector<double> flows;  // active power per line, from end
  double gamma = 0.0;
  std::optional<AcSolution> ac;
};

FlowState flow_state(const Network& g, Engine engine, const AcOptions& options, const AcSolution* warm) {
  FlowState s;
  if (engine == Engine::kDC) {
    DcSolution dc = solve_dc(g);
    s.gamma = congestion_dc(dc, g).gamma;
    s.flows = std::move(dc.flows);
  } else {
    AcSolution ac = solve_ac_with_fallback(g, warm, options);
    s.gamma = congestion_ac(ac, g).gamma;
    for (const auto& sf : ac.s_from) s.flows.push_back(sf.real());
    s.ac = std::move(ac);
  }
  return s;
}

std::vector<int> bus_ids(const Network& g) {
  std::vector<int> ids;
  for (const Bus& b : g.buses()) ids.push_back(b.id);
  return ids;
}

TreePartitionReport base_report(const Network& g, int k, Method method, Clusterer clusterer,
                                const PipelineOptions& options) {
  TreePartitionReport r;
  r.case_name = options.case_name;
  r.method = method;
  r.clusterer = clusterer;
  r.k = k;
  r.seed = options.seed;
  r.bus_ids = bus_ids(g);
  r.bbd_pre = BbdSummary::of(bridge_block_decomposition(g));
  return r;
}

}  // namespace

TreePartitionReport two_stage(const Network& network, int k, Clusterer clusterer, Method method,
                              const PipelineOptions& options) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "k must be at least 2");
  if (method != Method::kTwoStageMilp && method != Method::kTwoStageBfDc && method != Method::kTwoStageBfAc) {
    throw Error(ErrorCode::kInvalidArgument, "not a two-stage method");
  }
  if (k > network.bus_count()) throw Error(ErrorCode::kInvalidArgument, "k exceeds the number of buses");
  const auto t0 = Clock::now();
  const Engine engine = engine_of(method);
  TreePartitionReport r = base_report(network, k, method, clusterer, options);

  auto t = Clock::now();
  FlowState base = flow_state(network, engine, options.ac, nullptr);
  r.gamma_pre = base.gamma;
  r.timings.flow = since(t);

  t = Clock::now();
  WeightedGraph wg = WeightedGraph::from_flows(network, base.flows);
  RepairResult repaired = ensure_connected_clusters(wg, cluster_graph(wg, k, clusterer, options.seed));
  r.clusters_added = repaired.added_clusters;
  r.timings.obi = since(t);

  t = Clock::now();
  ObsInstance inst = ObsInstance::make(network, repaired.partition, engine);
  ObsSolution sol;
  if (method == Method::kTwoStageMilp) {
    sol = solve_obs_milp(inst, options.milp);
    r.big_m_violations = sol.big_m ? sol.big_m->violations : -1;
    r.big_m_worst_ratio = sol.big_m ? sol.big_m->worst_ratio : 0.0;
    r.big_m_four_c_violations = sol.big_m ? sol.big_m->four_c_violations : -1;
    r.big_m_fallback = sol.big_m && sol.big_m->fallback;
  } else {
    BruteForceOptions bf;
    bf.threads = options.threads;
    bf.ac = options.ac;
    bf.warm_start = base.ac ? &*base.ac : nullptr;
    sol = solve_bruteforce(inst, bf);
  }
  r.timings.obs = since(t);

  r.partition = repaired.partition;
  r.switched = sol.switched;
  r.gamma_post = sol.gamma;
  r.optimal = sol.optimal;
  r.trees_evaluated = sol.stats.trees_evaluated;
  r.trees_skipped = sol.stats.trees_skipped;
  r.nodes = sol.stats.nodes;
  r.bbd_post = BbdSummary::of(bridge_block_decomposition(apply_switch(network, sol.switched)));
  r.timings.total = since(t0);
  return r;
}

TreePartitionReport recursive(const Network& network, int k, Engine engine, Clusterer clusterer,
                              const PipelineOptions& options) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "k must be at least 2");
  const auto t0 = Clock::now();
  const Method method = engine == Engine::kDC ? Method::kRecursiveDc : Method::kRecursiveAc;
  TreePartitionReport r = base_report(network, k, method, clusterer, options);
  r.optimal = true;

  auto t = Clock::now();
  Network current = network;
  FlowState state = flow_state(current, engine, options.ac, nullptr);
  r.gamma_pre = state.gamma;
  r.timings.flow += since(t);

  const int n = network.bus_count();
  std::vector<int> cluster(static_cast<std::size_t>(n), 0);
  int clusters = 1;
  SwitchSet switched;

  for (int round = 1; round < k; ++round) {
    BridgeBlockDecomposition bbd = bridge_block_decomposition(current);
    const std::vector<int>* block = nullptr;
    for (const auto& b : bbd.blocks) {
      if (!block || b.size() > block->size()) block = &b;
    }
    if (block->size() < 2) {
      r.partial = true;
      break;
    }

    // Bipartition the block from the flows of the current network.
    t = Clock::now();
    WeightedGraph sub = WeightedGraph::from_flows(current, state.flows).induced(*block);
    RepairResult halves = ensure_connected_clusters(sub, cluster_graph(sub, 2, clusterer, options.seed));
    std::vector<int> side(static_cast<std::size_t>(n), -1);
    for (std::size_t i = 0; i < block->size(); ++i) {
      side[static_cast<std::size_t>((*block)[i])] = halves.partition.cluster_of(static_cast<int>(i));
    }
    r.timings.obi += since(t);

    t = Clock::now();
    std::vector<int> cross;
    for (int l = 0; l < current.line_count(); ++l) {
      const Line& line = current.line(l);
      int a = side[static_cast<std::size_t>(line.from)], b = side[static_cast<std::size_t>(line.to)];
      if (a >= 0 && b >= 0 && a != b) cross.push_back(l);
    }
    // Keeping exactly one cross edge makes it a bridge.
    std::vector<double> gamma(cross.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<std::optional<AcSolution>> acs(cross.size());
    auto switch_keeping = [&](std::size_t keep) {
      std::vector<LineId> off;
      for (std::size_t c = 0; c < cross.size(); ++c) {
        if (c != keep) off.push_back(current.line(cross[c]).id);
      }
      return SwitchSet(std::move(off));
    };
    const AcSolution* warm = state.ac ? &*state.ac : nullptr;
    detail::parallel_for(cross.size(), options.threads, [&](std::size_t c) {
      Network g = apply_switch(current, switch_keeping(c));
      if (engine == Engine::kDC) {
        gamma[c] = congestion_dc(solve_dc(g), g).gamma;
      } else {
        try {
          AcSolution s = solve_ac_with_fallback(g, warm, options.ac);
          gamma[c] = congestion_ac(s, g).gamma;
          acs[c] = std::move(s);
        } catch (const NotConvergedError&) {
        }
      }
    });

    IterationRecord rec;
    rec.block_size = static_cast<int>(block->size());
    rec.candidates = static_cast<int>(cross.size());
    double gmin = kInfinity;
    for (double gv : gamma) {
      if (std::isnan(gv)) {
        ++rec.skipped;
      } else {
        gmin = std::min(gmin, gv);
      }
    }
    r.trees_evaluated += cross.size() - static_cast<std::size_t>(rec.skipped);
    r.trees_skipped += static_cast<std::size_t>(rec.skipped);
    if (rec.skipped > 0) r.optimal = false;
    if (!std::isfinite(gmin)) {
      r.partial = true;
      r.timings.obs += since(t);
      break;
    }
    const double cut = gmin + 1e-9 * std::max(1.0, std::abs(gmin));
    std::size_t best = cross.size();
    for (std::size_t c = 0; c < cross.size(); ++c) {
      if (std::isnan(gamma[c]) || gamma[c] > cut) continue;
      if (best == cross.size() || current.line(cross[c]).id < current.line(cross[best]).id) best = c;
    }
    const Line kept = current.line(cross[best]);
    SwitchSet off = switch_keeping(best);
    rec.kept = kept.id;
    rec.switched = off.lines();
    rec.gamma = gamma[best];
    switched.merge(off);

    Network next = apply_switch(current, off);
    r.timings.obs += since(t);

    // Split the cluster holding the block at the new bridge.
    const int owner = cluster[static_cast<std::size_t>(kept.from)];
    std::vector<std::pair<int, int>> edges = next.edge_list();
    std::vector<bool> skip(edges.size(), false);
    for (int l = 0; l < next.line_count(); ++l) {
      const Line& line = next.line(l);
      skip[static_cast<std::size_t>(l)] = line.id == kept.id || cluster[static_cast<std::size_t>(line.from)] != owner ||
                                          cluster[static_cast<std::size_t>(line.to)] != owner;
    }
    std::vector<int> comp = connected_components(n, edges, skip);
    const int far = comp[static_cast<std::size_t>(kept.to)];
    for (int v = 0; v < n; ++v) {
      if (cluster[static_cast<std::size_t>(v)] == owner && comp[static_cast<std::size_t>(v)] == far) {
        cluster[static_cast<std::size_t>(v)] = clusters;
      }
    }
    ++clusters;

    current = std::move(next);
    t = Clock::now();
    if (engine == Engine::kAC && acs[best]) {
      state.ac = std::move(acs[best]);
      state.gamma = gamma[best];
      state.flows.clear();
      for (const auto& sf : state.ac->s_from) state.flows.push_back(sf.real());
    } else {
      state = flow_state(current, engine, options.ac, state.ac ? &*state.ac : nullptr);
    }
    r.timings.flow += since(t);
    r.iterations.push_back(std::move(rec));
  }

  r.partition = Partition(std::move(cluster), clusters);
  r.switched = switched;
  r.gamma_post = state.gamma;
  r.bbd_post = BbdSummary::of(bridge_block_decomposition(current));
  r.timings.total = since(t0);
  return r;
}

TreePartitionReport run_method(const Network& network, int k, Method method, Clusterer clusterer,
                               const PipelineOptions& options) {
  switch (method) {
    case Method::kRecursiveDc: return recursive(network, k, Engine::kDC, clusterer, options);
    case Method::kRecursiveAc: return recursive(network, k, Engine::kAC, clusterer, options);
    default: return two_stage(network, k, clusterer, method, options);
  }
}

Evaluation evaluate_only(const Network& network, const SwitchSet& switched, Engine engine,
                         const AcOptions& options) {
  Network g = apply_switch(network, switched);
  Evaluation e;
  e.gamma = flow_state(g, engine, options, nullptr).gamma;
  e.bbd = bridge_block_decomposition(g);
  return e;
}

}  // namespace tpart
