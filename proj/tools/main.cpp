// tpart: tree partitioning of transmission networks by line switching.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "bench.hpp"
#include "cases.hpp"
#include "tpart/error.hpp"
#include "tpart/pipeline.hpp"

using namespace tpart;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void print_error(std::string_view code, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = {{"code", code}, {"message", message}};
  std::cerr << j.dump() << '\n';
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << text;
}

std::string sizes(const std::vector<int>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "}";
}

std::string table(const TreePartitionReport& r) {
  std::ostringstream os;
  char buf[128];
  os << "case        " << r.case_name << '\n';
  os << "method      " << to_string(r.method) << " (" << to_string(r.clusterer) << ", k=" << r.k << ", seed "
     << r.seed << ")\n";
  std::snprintf(buf, sizeof buf, "gamma       pre %.6f  post %.6f\n", r.gamma_pre, r.gamma_post);
  os << buf;
  os << "switched    " << r.switched.size() << " lines:";
  for (LineId id : r.switched.lines()) os << ' ' << to_int(id);
  os << '\n';
  os << "blocks      pre " << r.bbd_pre.nontrivial.size() << ' ' << sizes(r.bbd_pre.nontrivial) << "  post "
     << r.bbd_post.nontrivial.size() << ' ' << sizes(r.bbd_post.nontrivial) << '\n';
  os << "optimal     " << (r.optimal ? "yes" : "no") << (r.partial ? " (partial)" : "") << '\n';
  std::snprintf(buf, sizeof buf, "time        %.3f s (flow %.3f, obi %.3f, obs %.3f)\n", r.timings.total,
                r.timings.flow, r.timings.obi, r.timings.obs);
  os << buf;
  return os.str();
}

std::vector<LineId> parse_ids(const std::vector<int>& v) {
  std::vector<LineId> out;
  for (int x : v) out.push_back(line_id(x));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tree partitioning of power networks by line switching"};
  app.require_subcommand(1);
  std::string data = cli::data_dir();
  app.add_option("--data-dir", data, "Directory with snapshots/ and fixtures/");

  // partition
  auto* part = app.add_subcommand("partition", "Run one tree-partitioning method on a case");
  std::string case_name, method_s = "two-stage-milp", cluster_s = "spectral-ln", engine_s, format = "json", output;
  int k = 5, threads = 0;
  std::uint64_t seed = 1;
  double gap = 1e-6, time_limit = 600.0;
  bool no_timings = false, rebalance = false;
  std::string lp_dump, big_m = "safe";
  part->add_option("--case", case_name, "Case name or path (.m or snapshot .json)")->required();
  part->add_option("--k", k, "Target number of clusters")->check(CLI::Range(2, 100000));
  part->add_option("--method", method_s, "two-stage-milp | two-stage-bf-dc | two-stage-bf-ac | recursive-dc | recursive-ac");
  part->add_option("--cluster", cluster_s, "fastgreedy | spectral-ln | spectral-bn");
  part->add_option("--engine", engine_s, "dc | ac (must agree with the method)");
  part->add_option("--seed", seed, "Clustering seed");
  part->add_option("--gap", gap, "Relative MILP gap");
  part->add_option("--time-limit", time_limit, "MILP time limit in seconds");
  part->add_option("--threads", threads, "Workers for candidate evaluation (0: all cores)");
  part->add_option("--output-format", format, "json | csv | table")->check(CLI::IsMember({"json", "csv", "table"}));
  part->add_option("-o,--output", output, "Output file (default stdout)");
  part->add_flag("--no-timings", no_timings, "Leave timings out of the JSON report");
  part->add_flag("--rebalance", rebalance, "Move the injection mismatch onto the slack bus");
  part->add_option("--big-m", big_m, "safe | 4c (MILP big-M rule; 4c falls back to safe when infeasible)")
      ->check(CLI::IsMember({"safe", "4c"}));
  part->add_option("--dump-lp", lp_dump, "Write the OBS MILP in LP format (two-stage-milp only)");

  // bench
  auto* bench = app.add_subcommand("bench", "Reproduce the structure of the comparison tables");
  cli::BenchConfig bcfg;
  std::vector<std::uint64_t> bseeds;
  bench->add_option("--suite", bcfg.suite, "table1 | table2 | table3")->required();
  bench->add_option("--cases", bcfg.cases, "Case names (default: the suite's list)")->delimiter(',');
  bench->add_option("--seeds", bseeds, "Seeds; medians are reported")->delimiter(',')->required();
  bench->add_option("--k", bcfg.ks, "Target cluster counts")->delimiter(',');
  bench->add_option("--time-limit", bcfg.time_limit, "MILP time limit in seconds");
  bench->add_option("--threads", bcfg.threads, "Workers for candidate evaluation");
  std::string bench_out;
  bench->add_option("-o,--output", bench_out, "CSV file (default stdout)");

  // inspect
  auto* inspect = app.add_subcommand("inspect", "Bridge-block decomposition and maximum congestion of a case");
  std::string icase, iengine = "dc", iformat = "table";
  bool irebalance = false;
  inspect->add_option("--case", icase, "Case name or path")->required();
  inspect->add_option("--engine", iengine, "dc | ac")->check(CLI::IsMember({"dc", "ac"}));
  inspect->add_option("--output-format", iformat, "json | table")->check(CLI::IsMember({"json", "table"}));
  inspect->add_flag("--rebalance", irebalance, "Move the injection mismatch onto the slack bus");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score a given switching set");
  std::string ecase, eengine = "dc";
  std::vector<int> eswitch;
  bool erebalance = false;
  evaluate->add_option("--case", ecase, "Case name or path")->required();
  evaluate->add_option("--engine", eengine, "dc | ac")->check(CLI::IsMember({"dc", "ac"}));
  evaluate->add_option("--switch", eswitch, "Line ids to switch off")->delimiter(',');
  evaluate->add_flag("--rebalance", erebalance, "Move the injection mismatch onto the slack bus");

  // convert
  auto* convert = app.add_subcommand("convert", "Convert a MATPOWER case to a snapshot JSON");
  std::string cin_path, cout_path, cname;
  bool crebalance = false;
  convert->add_option("input", cin_path, "MATPOWER .m file")->required()->check(CLI::ExistingFile);
  convert->add_option("-o,--output", cout_path, "Snapshot JSON (default stdout)");
  convert->add_option("--name", cname, "Case name stored in the snapshot");
  convert->add_flag("--rebalance", crebalance, "Move the injection mismatch onto the slack bus");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*part) {
      auto method = parse_method(method_s);
      auto clusterer = parse_clusterer(cluster_s);
      if (!method) throw UsageError("unknown method '" + method_s + "'");
      if (!clusterer) throw UsageError("unknown clusterer '" + cluster_s + "'");
      const Engine engine = engine_of(*method);
      if (!engine_s.empty() && engine_s != to_string(engine)) {
        throw UsageError("method " + method_s + " runs on the " + std::string(to_string(engine)) +
                         " engine, not " + engine_s);
      }
      if (!lp_dump.empty() && *method != Method::kTwoStageMilp) {
        throw UsageError("--dump-lp needs --method two-stage-milp");
      }
      cli::LoadedCase lc = cli::load_network(case_name, engine, data, rebalance);
      PipelineOptions opt;
      opt.seed = seed;
      opt.threads = threads;
      opt.milp.gap = gap;
      opt.milp.time_limit = time_limit;
      opt.milp.big_m = big_m == "4c" ? BigMRule::kFourTimesCapacity : BigMRule::kSafe;
      opt.case_name = lc.snapshot.name.empty() ? case_name : lc.snapshot.name;
      TreePartitionReport r = run_method(lc.network, k, *method, *clusterer, opt);
      if (!lp_dump.empty()) {
        ObsInstance inst = ObsInstance::make(lc.network, r.partition, Engine::kDC);
        emit(build_milp(inst, opt.milp.big_m).model.to_lp(), lp_dump);
      }
      if (format == "json") emit(write_report_json(r, !no_timings), output);
      else if (format == "csv") emit(write_report_csv(r), output);
      else emit(table(r), output);
      return 0;
    }
    if (*bench) {
      bcfg.seeds = bseeds;
      bcfg.data_dir = data;
      if (bench_out.empty() || bench_out == "-") return cli::run_bench(bcfg, std::cout, std::cerr) ? kExitRuntime : 0;
      std::ofstream out(bench_out);
      if (!out) throw Error(ErrorCode::kIo, "cannot write " + bench_out);
      return cli::run_bench(bcfg, out, std::cerr) ? kExitRuntime : 0;
    }
    if (*inspect) {
      const Engine engine = iengine == "ac" ? Engine::kAC : Engine::kDC;
      cli::LoadedCase lc = cli::load_network(icase, engine, data, irebalance);
      Evaluation ev = evaluate_only(lc.network, {}, engine);
      BbdSummary s = BbdSummary::of(ev.bbd);
      if (iformat == "json") {
        nlohmann::ordered_json j;
        j["case"] = lc.snapshot.name;
        j["path"] = lc.path;
        j["engine"] = to_string(engine);
        j["buses"] = lc.network.bus_count();
        j["lines"] = lc.network.line_count();
        j["bridges"] = s.bridges;
        j["blocks"] = s.blocks;
        j["nontrivial"] = s.nontrivial;
        j["gamma"] = ev.gamma;
        std::cout << j.dump(1) << '\n';
      } else {
        std::printf("case        %s (%s)\n", lc.snapshot.name.c_str(), lc.path.c_str());
        std::printf("size        %d buses, %d lines\n", lc.network.bus_count(), lc.network.line_count());
        std::printf("bridges     %d\n", s.bridges);
        std::printf("blocks      %d, non-trivial %zu %s\n", s.blocks, s.nontrivial.size(), sizes(s.nontrivial).c_str());
        std::printf("gamma       %.6f (%s)\n", ev.gamma, std::string(to_string(engine)).c_str());
      }
      return 0;
    }
    if (*evaluate) {
      const Engine engine = eengine == "ac" ? Engine::kAC : Engine::kDC;
      cli::LoadedCase lc = cli::load_network(ecase, engine, data, erebalance);
      SwitchSet sw(parse_ids(eswitch));
      Evaluation ev = evaluate_only(lc.network, sw, engine);
      BbdSummary s = BbdSummary::of(ev.bbd);
      nlohmann::ordered_json j;
      j["case"] = lc.snapshot.name;
      j["engine"] = to_string(engine);
      std::vector<int> ids;
      for (LineId id : sw.lines()) ids.push_back(to_int(id));
      j["switched_lines"] = ids;
      j["gamma"] = ev.gamma;
      j["bbd"] = {{"blocks", s.blocks}, {"bridges", s.bridges}, {"nontrivial", s.nontrivial}};
      std::cout << j.dump(1) << '\n';
      return 0;
    }
    if (*convert) {
      Snapshot snap = snapshot_from_case(load_matpower(cin_path), cname);
      if (snap.name.empty()) snap.name = cin_path;
      if (crebalance) snap = rebalanced(std::move(snap));
      emit(write_snapshot_json(snap), cout_path);
      return 0;
    }
  } catch (const UsageError& e) {
    print_error("usage", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    print_error(to_string(e.code()), e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return kExitRuntime;
  }
  return 0;
}
