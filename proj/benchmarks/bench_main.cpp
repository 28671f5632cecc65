#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "tpart/caseio.hpp"
#include "tpart/pipeline.hpp"

using namespace tpart;

namespace {

Network dc_case(const std::string& name) {
  static const std::string dir = TPART_BENCH_DATA_DIR;
  return to_network(load_case(dir + "/snapshots/" + name + "_dc.json"), Engine::kDC);
}

const char* kCases[] = {"ieee30", "ieee118", "ieee300", "goc500"};

void BM_SolveDc(benchmark::State& state) {
  Network g = dc_case(kCases[state.range(0)]);
  for (auto _ : state) benchmark::DoNotOptimize(solve_dc(g));
  state.SetLabel(kCases[state.range(0)]);
}
BENCHMARK(BM_SolveDc)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

void BM_BridgeBlocks(benchmark::State& state) {
  Network g = dc_case(kCases[state.range(0)]);
  for (auto _ : state) benchmark::DoNotOptimize(bridge_block_decomposition(g));
  state.SetLabel(kCases[state.range(0)]);
}
BENCHMARK(BM_BridgeBlocks)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

// Complete multigraph on k clusters, one edge per pair.
void BM_EnumerateTrees(benchmark::State& state) {
  ReducedGraph r;
  r.k = static_cast<int>(state.range(0));
  int id = 0;
  for (int a = 0; a < r.k; ++a) {
    for (int b = a + 1; b < r.k; ++b, ++id) r.edges.push_back({a, b, id, line_id(id)});
  }
  std::size_t trees = 0;
  for (auto _ : state) trees = enumerate_spanning_trees(r, [](std::span<const int>) { return true; });
  state.counters["trees"] = static_cast<double>(trees);
  state.counters["trees/s"] = benchmark::Counter(static_cast<double>(trees), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_EnumerateTrees)->DenseRange(4, 7)->Unit(benchmark::kMillisecond);

ObsInstance ieee118_instance(int k) {
  Network g = dc_case("ieee118");
  DcSolution s = solve_dc(g);
  WeightedGraph w = WeightedGraph::from_flows(g, s.flows);
  Partition p = ensure_connected_clusters(w, cluster_graph(w, k, Clusterer::kSpectralLN, 1)).partition;
  return ObsInstance::make(g, p, Engine::kDC);
}

void BM_ObsMilp(benchmark::State& state) {
  ObsInstance inst = ieee118_instance(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_obs_milp(inst));
  state.counters["cross_edges"] = static_cast<double>(inst.reduced.edges.size());
}
BENCHMARK(BM_ObsMilp)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ObsBruteForce(benchmark::State& state) {
  ObsInstance inst = ieee118_instance(static_cast<int>(state.range(0)));
  BruteForceOptions opt;
  opt.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(solve_bruteforce(inst, opt));
  state.counters["trees"] = matrix_tree_count(inst.reduced);
}
BENCHMARK(BM_ObsBruteForce)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_RecursiveDc(benchmark::State& state) {
  Network g = dc_case("ieee118");
  PipelineOptions opt;
  opt.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(recursive(g, static_cast<int>(state.range(0)), Engine::kDC, Clusterer::kSpectralLN, opt));
  }
}
BENCHMARK(BM_RecursiveDc)->DenseRange(2, 8, 2)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
