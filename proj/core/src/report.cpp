#include "tpart/report.hpp"

#include <charconv>
#include <sstream>

#include <json.hpp>

#include "tpart/error.hpp"

namespace tpart {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kTwoStageMilp: return "two-stage-milp";
    case Method::kTwoStageBfDc: return "two-stage-bf-dc";
    case Method::kTwoStageBfAc: return "two-stage-bf-ac";
    case Method::kRecursiveDc: return "recursive-dc";
    case Method::kRecursiveAc: return "recursive-ac";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view text) {
  for (Method m : {Method::kTwoStageMilp, Method::kTwoStageBfDc, Method::kTwoStageBfAc, Method::kRecursiveDc,
                   Method::kRecursiveAc}) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

std::optional<Clusterer> parse_clusterer(std::string_view text) {
  for (Clusterer c : {Clusterer::kFastgreedy, Clusterer::kSpectralLN, Clusterer::kSpectralBN}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

Engine engine_of(Method method) {
  return method == Method::kTwoStageBfAc || method == Method::kRecursiveAc ? Engine::kAC : Engine::kDC;
}

BbdSummary BbdSummary::of(const BridgeBlockDecomposition& bbd) {
  BbdSummary s;
  s.blocks = static_cast<int>(bbd.blocks.size());
  s.bridges = static_cast<int>(bbd.bridges.size());
  s.nontrivial = bbd.nontrivial_sizes();
  return s;
}

namespace {

ordered_json ids_json(const std::vector<LineId>& ids) {
  ordered_json a = ordered_json::array();
  for (LineId id : ids) a.push_back(to_int(id));
  return a;
}

std::vector<LineId> ids_from(const ordered_json& a) {
  std::vector<LineId> out;
  for (const auto& v : a) out.push_back(line_id(v.get<std::int32_t>()));
  return out;
}

ordered_json bbd_json(const BbdSummary& s) {
  ordered_json j;
  j["blocks"] = s.blocks;
  j["bridges"] = s.bridges;
  j["nontrivial"] = s.nontrivial;
  return j;
}

BbdSummary bbd_from(const ordered_json& j) {
  BbdSummary s;
  s.blocks = j.at("blocks").get<int>();
  s.bridges = j.at("bridges").get<int>();
  s.nontrivial = j.at("nontrivial").get<std::vector<int>>();
  return s;
}

std::string num(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string sizes(const std::vector<int>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "}";
}

}  // namespace

std::string write_report_json(const TreePartitionReport& r, bool include_timings) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["case"] = r.case_name;
  j["method"] = to_string(r.method);
  j["clusterer"] = to_string(r.clusterer);
  j["engine"] = to_string(engine_of(r.method));
  j["k"] = r.k;
  j["seed"] = r.seed;
  j["gamma_pre"] = r.gamma_pre;
  j["gamma_post"] = r.gamma_post;
  j["switched_lines"] = ids_json(r.switched.lines());
  j["partition"] = {{"k", r.partition.k()}, {"buses", r.bus_ids}, {"clusters", r.partition.assignment()}};
  j["bbd_pre"] = bbd_json(r.bbd_pre);
  j["bbd_post"] = bbd_json(r.bbd_post);
  j["optimal"] = r.optimal;
  j["partial"] = r.partial;
  j["clusters_added"] = r.clusters_added;
  j["obs"] = {{"trees_evaluated", r.trees_evaluated},
              {"trees_skipped", r.trees_skipped},
              {"nodes", r.nodes},
              {"big_m_violations", r.big_m_violations},
              {"big_m_worst_ratio", r.big_m_worst_ratio},
              {"big_m_four_c_violations", r.big_m_four_c_violations},
              {"big_m_fallback", r.big_m_fallback}};
  ordered_json its = ordered_json::array();
  for (const IterationRecord& it : r.iterations) {
    ordered_json e;
    e["block_size"] = it.block_size;
    e["candidates"] = it.candidates;
    e["skipped"] = it.skipped;
    e["kept"] = to_int(it.kept);
    e["switched"] = ids_json(it.switched);
    e["gamma"] = it.gamma;
    its.push_back(std::move(e));
  }
  j["iterations"] = std::move(its);
  if (include_timings) {
    j["timings"] = {{"flow", r.timings.flow}, {"obi", r.timings.obi}, {"obs", r.timings.obs}, {"total", r.timings.total}};
  }
  return j.dump(1) + "\n";
}

TreePartitionReport read_report_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("report JSON: ") + e.what());
  }
  try {
    if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
      throw Error(ErrorCode::kParse, "unsupported report schema version");
    }
    TreePartitionReport r;
    r.case_name = j.at("case").get<std::string>();
    auto method = parse_method(j.at("method").get<std::string>());
    auto clusterer = parse_clusterer(j.at("clusterer").get<std::string>());
    if (!method || !clusterer) throw Error(ErrorCode::kParse, "unknown method or clusterer");
    r.method = *method;
    r.clusterer = *clusterer;
    r.k = j.at("k").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.gamma_pre = j.at("gamma_pre").get<double>();
    r.gamma_post = j.at("gamma_post").get<double>();
    r.switched = SwitchSet(ids_from(j.at("switched_lines")));
    const auto& p = j.at("partition");
    r.bus_ids = p.at("buses").get<std::vector<int>>();
    r.partition = Partition(p.at("clusters").get<std::vector<int>>(), p.at("k").get<int>());
    r.bbd_pre = bbd_from(j.at("bbd_pre"));
    r.bbd_post = bbd_from(j.at("bbd_post"));
    r.optimal = j.at("optimal").get<bool>();
    r.partial = j.at("partial").get<bool>();
    r.clusters_added = j.at("clusters_added").get<int>();
    const auto& o = j.at("obs");
    r.trees_evaluated = o.at("trees_evaluated").get<std::size_t>();
    r.trees_skipped = o.at("trees_skipped").get<std::size_t>();
    r.nodes = o.at("nodes").get<double>();
    r.big_m_violations = o.at("big_m_violations").get<int>();
    r.big_m_worst_ratio = o.at("big_m_worst_ratio").get<double>();
    r.big_m_four_c_violations = o.at("big_m_four_c_violations").get<int>();
    r.big_m_fallback = o.at("big_m_fallback").get<bool>();
    for (const auto& e : j.at("iterations")) {
      IterationRecord it;
      it.block_size = e.at("block_size").get<int>();
      it.candidates = e.at("candidates").get<int>();
      it.skipped = e.at("skipped").get<int>();
      it.kept = line_id(e.at("kept").get<std::int32_t>());
      it.switched = ids_from(e.at("switched"));
      it.gamma = e.at("gamma").get<double>();
      r.iterations.push_back(std::move(it));
    }
    if (j.contains("timings")) {
      const auto& t = j.at("timings");
      r.timings = {t.at("flow").get<double>(), t.at("obi").get<double>(), t.at("obs").get<double>(),
                   t.at("total").get<double>()};
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("report JSON: ") + e.what());
  }
}

std::string report_csv_header() {
  return "case,method,clusterer,engine,k,seed,gamma_pre,gamma_post,switched,clusters,"
         "pre_nontrivial,pre_sizes,post_nontrivial,post_sizes,optimal,partial,time_s\n";
}

std::string write_report_csv(const TreePartitionReport& r, bool header) {
  std::ostringstream os;
  if (header) os << report_csv_header();
  os << r.case_name << ',' << to_string(r.method) << ',' << to_string(r.clusterer) << ','
     << to_string(engine_of(r.method)) << ',' << r.k << ',' << r.seed << ',' << num(r.gamma_pre) << ','
     << num(r.gamma_post) << ',' << r.switched.size() << ',' << r.partition.k() << ','
     << r.bbd_pre.nontrivial.size() << ",\"" << sizes(r.bbd_pre.nontrivial) << "\"," << r.bbd_post.nontrivial.size()
     << ",\"" << sizes(r.bbd_post.nontrivial) << "\"," << (r.optimal ? 1 : 0) << ',' << (r.partial ? 1 : 0) << ','
     << num(r.timings.total) << '\n';
  return os.str();
}

}  // namespace tpart
