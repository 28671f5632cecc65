#include "bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "cases.hpp"
#include "tpart/error.hpp"
#include "tpart/pipeline.hpp"

namespace tpart::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const Clusterer kClusterers[] = {Clusterer::kFastgreedy, Clusterer::kSpectralBN, Clusterer::kSpectralLN};

double median(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sizes(const std::vector<int>& v, std::size_t limit = 5) {
  std::string s = "\"{";
  for (std::size_t i = 0; i < v.size() && i < limit; ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "}\"";
}

std::string best_of(double a, const char* na, double b, const char* nb) {
  if (std::isnan(a) && std::isnan(b)) return "none";
  if (std::isnan(b) || a < b - 1e-9) return na;
  if (std::isnan(a) || b < a - 1e-9) return nb;
  return "tie";
}

/// All seeds of one (method, clusterer) cell.
struct Cell {
  std::vector<TreePartitionReport> runs;
  std::string error;

  double gamma() const {
    std::vector<double> g;
    for (const auto& r : runs) g.push_back(r.gamma_post);
    return median(g);
  }
  double seconds() const {
    std::vector<double> t;
    for (const auto& r : runs) t.push_back(r.timings.total);
    return median(t);
  }
  /// Lower-median run by (gamma, seed).
  const TreePartitionReport* representative() const {
    if (runs.empty()) return nullptr;
    std::vector<const TreePartitionReport*> v;
    for (const auto& r : runs) v.push_back(&r);
    std::sort(v.begin(), v.end(), [](auto* a, auto* b) {
      return a->gamma_post != b->gamma_post ? a->gamma_post < b->gamma_post : a->seed < b->seed;
    });
    return v[(v.size() - 1) / 2];
  }
};

Cell run_cell(const Network& net, const std::string& name, int k, Method method, Clusterer clusterer,
              const BenchConfig& cfg, std::ostream& log) {
  Cell cell;
  const bool seeded = clusterer != Clusterer::kFastgreedy;
  for (std::uint64_t seed : cfg.seeds) {
    PipelineOptions opt;
    opt.seed = seed;
    opt.threads = cfg.threads;
    opt.milp.time_limit = cfg.time_limit;
    opt.case_name = name;
    try {
      if (!seeded && !cell.runs.empty()) {
        TreePartitionReport r = cell.runs.front();
        r.seed = seed;
        cell.runs.push_back(std::move(r));
        continue;
      }
      cell.runs.push_back(run_method(net, k, method, clusterer, opt));
    } catch (const Error& e) {
      cell.error = std::string(to_string(e.code())) + ": " + e.what();
      log << name << " k=" << k << ' ' << to_string(method) << ' ' << to_string(clusterer) << " seed " << seed
          << ": " << cell.error << '\n';
    }
  }
  return cell;
}

std::string status(const std::vector<const Cell*>& cells) {
  for (const Cell* c : cells) {
    if (!c->error.empty()) {
      std::string e = c->error;
      std::replace(e.begin(), e.end(), ',', ';');
      std::replace(e.begin(), e.end(), '"', '\'');
      return "\"error " + e + "\"";
    }
  }
  return "ok";
}

}  // namespace

std::vector<std::string> default_cases(const std::string& suite) {
  if (suite == "table1") return {"ieee30", "ieee118", "goc179", "activ200", "ieee300", "goc500"};
  if (suite == "table2") return {"ieee118", "goc179", "ieee300", "goc500"};
  return {"ieee30", "epri39", "ieee73", "ieee118", "activ200"};
}

int run_bench(const BenchConfig& cfg, std::ostream& csv, std::ostream& log) {
  if (cfg.suite != "table1" && cfg.suite != "table2" && cfg.suite != "table3") {
    throw Error(ErrorCode::kInvalidArgument, "unknown suite '" + cfg.suite + "'");
  }
  if (cfg.seeds.empty()) throw Error(ErrorCode::kInvalidArgument, "bench needs at least one seed");
  const std::vector<std::string> cases = cfg.cases.empty() ? default_cases(cfg.suite) : cfg.cases;
  std::vector<int> ks = cfg.ks;
  if (ks.empty()) ks = cfg.suite == "table3" ? std::vector<int>{4, 5} : std::vector<int>{5};
  const Engine engine = cfg.suite == "table3" ? Engine::kAC : Engine::kDC;
  const std::string seeds = std::to_string(cfg.seeds.size());

  if (cfg.suite == "table1") {
    csv << "case,k,clusterer,method,seeds,pre_count,pre_sizes,post_count,post_sizes_largest5,gamma_post,time_s,status\n";
  } else if (cfg.suite == "table2") {
    csv << "case,k,clusterer,seeds,milp_gamma,rdc_gamma,milp_time_s,rdc_time_s,best,status\n";
  } else {
    csv << "case,k,clusterer,seeds,gamma_pre,bf_gamma,rac_gamma,bf_time_s,rac_time_s,best,status\n";
  }

  int failed = 0;
  for (const std::string& name : cases) {
    std::optional<LoadedCase> lc;
    std::string load_error;
    try {
      lc = load_network(name, engine, cfg.data_dir, false);
    } catch (const Error& e) {
      load_error = std::string(to_string(e.code())) + ": " + e.what();
    }
    for (int k : ks) {
      if (!lc) {
        ++failed;
        log << name << ": " << load_error << '\n';
        csv << name << ',' << k << ",,,,,,,,,,\"error " << load_error << "\"\n";
        continue;
      }
      const Network& net = lc->network;
      log << "[" << cfg.suite << "] " << name << " k=" << k << '\n';

      if (cfg.suite == "table1") {
        Cell c = run_cell(net, name, k, Method::kTwoStageMilp, Clusterer::kSpectralLN, cfg, log);
        const TreePartitionReport* rep = c.representative();
        BbdSummary pre = BbdSummary::of(bridge_block_decomposition(net));
        std::vector<double> counts;
        for (const auto& r : c.runs) counts.push_back(static_cast<double>(r.bbd_post.nontrivial.size()));
        if (!c.error.empty()) ++failed;
        csv << name << ',' << k << ",spectral-ln,two-stage-milp," << seeds << ',' << pre.nontrivial.size() << ','
            << sizes(pre.nontrivial, 99) << ',' << fixed(median(counts), 1) << ','
            << (rep ? sizes(rep->bbd_post.nontrivial) : "") << ',' << fixed(c.gamma(), 4) << ','
            << fixed(c.seconds(), 3) << ',' << status({&c}) << '\n';
        continue;
      }
      for (Clusterer cl : kClusterers) {
        if (cfg.suite == "table2") {
          Cell milp = run_cell(net, name, k, Method::kTwoStageMilp, cl, cfg, log);
          Cell rdc = run_cell(net, name, k, Method::kRecursiveDc, cl, cfg, log);
          if (!milp.error.empty() || !rdc.error.empty()) ++failed;
          csv << name << ',' << k << ',' << to_string(cl) << ',' << seeds << ',' << fixed(milp.gamma(), 4) << ','
              << fixed(rdc.gamma(), 4) << ',' << fixed(milp.seconds(), 3) << ',' << fixed(rdc.seconds(), 3) << ','
              << best_of(milp.gamma(), "milp", rdc.gamma(), "r-dc") << ',' << status({&milp, &rdc}) << '\n';
        } else {
          Cell bf = run_cell(net, name, k, Method::kTwoStageBfAc, cl, cfg, log);
          Cell rac = run_cell(net, name, k, Method::kRecursiveAc, cl, cfg, log);
          if (!bf.error.empty() || !rac.error.empty()) ++failed;
          double pre = kNaN;
          if (!bf.runs.empty()) pre = bf.runs.front().gamma_pre;
          else if (!rac.runs.empty()) pre = rac.runs.front().gamma_pre;
          csv << name << ',' << k << ',' << to_string(cl) << ',' << seeds << ',' << fixed(pre, 4) << ','
              << fixed(bf.gamma(), 4) << ',' << fixed(rac.gamma(), 4) << ',' << fixed(bf.seconds(), 3) << ','
              << fixed(rac.seconds(), 3) << ',' << best_of(bf.gamma(), "bf", rac.gamma(), "r-ac") << ','
              << status({&bf, &rac}) << '\n';
        }
        csv.flush();
      }
    }
  }
  return failed;
}

}  // namespace tpart::cli
