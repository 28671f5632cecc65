#include "tpart/caseio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tpart/dcflow.hpp"
#include "tpart/error.hpp"

namespace tpart {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::size_t kBusColumns = 13;
constexpr std::size_t kGenColumns = 10;
constexpr std::size_t kBranchColumns = 11;

std::string strip_comment(const std::string& line) {
  // '%' never appears inside numeric data; quoted strings are only on lines we skip.
  auto pos = line.find('%');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& token, int line) {
  std::string t = token;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "inf" || t == "+inf") return kInfinity;
  if (t == "-inf") return -kInfinity;
  if (t == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    throw ParseError("invalid number '" + token + "'", line);
  }
  if (used != token.size()) throw ParseError("invalid number '" + token + "'", line);
  return v;
}

std::vector<double> parse_row(const std::string& row, int line) {
  std::vector<double> values;
  std::string token;
  auto flush = [&] {
    if (!token.empty()) {
      values.push_back(parse_number(token, line));
      token.clear();
    }
  };
  for (char c : row) {
    if (c == ' ' || c == '\t' || c == ',' || c == '\r') {
      flush();
    } else {
      token.push_back(c);
    }
  }
  flush();
  return values;
}

struct Matrix {
  std::vector<std::vector<double>> rows;
  std::vector<int> lines;  // source line number of each row
};

void check_arity(const Matrix& m, std::size_t columns, const char* name) {
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    if (m.rows[r].size() < columns) {
      throw ParseError(std::string(name) + " row has " + std::to_string(m.rows[r].size()) + " columns, expected at least " +
                           std::to_string(columns),
                       m.lines[r]);
    }
  }
}

int as_int(double v) { return static_cast<int>(std::lround(v)); }

void validate(const RawCase& raw) {
  if (!(raw.base_mva > 0.0)) throw Error(ErrorCode::kInvalidCase, "baseMVA must be positive");
  std::set<int> ids;
  int slack = 0;
  for (const RawBus& b : raw.buses) {
    if (!ids.insert(b.id).second) throw Error(ErrorCode::kInvalidCase, "duplicate bus id " + std::to_string(b.id));
    if (b.type < 1 || b.type > 3) {
      throw Error(ErrorCode::kInvalidCase, "bus " + std::to_string(b.id) + " has unsupported type " + std::to_string(b.type));
    }
    if (b.type == 3) ++slack;
  }
  if (slack != 1) throw Error(ErrorCode::kInvalidCase, "case must have exactly one slack bus, found " + std::to_string(slack));
  for (const RawGen& g : raw.gens) {
    if (!ids.count(g.bus)) throw Error(ErrorCode::kInvalidCase, "generator at unknown bus " + std::to_string(g.bus));
  }
  for (const RawBranch& br : raw.branches) {
    if (!ids.count(br.from) || !ids.count(br.to)) {
      throw Error(ErrorCode::kInvalidCase,
                  "branch " + std::to_string(br.from) + "-" + std::to_string(br.to) + " references an unknown bus");
    }
  }
}

}  // namespace

RawCase parse_matpower(std::istream& in) {
  RawCase raw;
  std::map<std::string, Matrix> matrices;
  std::optional<double> base_mva;

  std::string current;  // name of the matrix being read, empty when outside
  bool in_cell = false;  // skipping a `{ ... }` cell array
  std::string raw_line;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    std::string line = trim(strip_comment(raw_line));
    if (line.empty()) continue;

    if (in_cell) {
      if (line.find('}') != std::string::npos) in_cell = false;
      continue;
    }

    if (current.empty()) {
      if (line.rfind("mpc.", 0) != 0) continue;  // function header, etc.
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string name = trim(std::string_view(line).substr(4, eq - 4));
      std::string rhs = trim(std::string_view(line).substr(eq + 1));
      if (name == "baseMVA") {
        if (!rhs.empty() && rhs.back() == ';') rhs.pop_back();
        base_mva = parse_number(trim(rhs), line_no);
        continue;
      }
      if (!rhs.empty() && rhs.front() == '{') {
        raw.warnings.push_back("ignored cell array mpc." + name);
        if (rhs.find('}') == std::string::npos) in_cell = true;
        continue;
      }
      if (rhs.empty() || rhs.front() != '[') continue;  // scalar or string field
      const bool known = name == "bus" || name == "gen" || name == "branch";
      if (!known) raw.warnings.push_back("ignored matrix mpc." + name);
      current = known ? name : std::string("?") + name;
      line = trim(std::string_view(rhs).substr(1));
      if (line.empty()) continue;
    }

    // Inside a matrix: rows separated by ';' or line breaks, closed by ']'.
    bool closes = false;
    if (auto close = line.find(']'); close != std::string::npos) {
      line = line.substr(0, close);
      closes = true;
    }
    if (current.front() != '?') {
      std::stringstream rows(line);
      std::string row;
      while (std::getline(rows, row, ';')) {
        auto values = parse_row(row, line_no);
        if (values.empty()) continue;
        matrices[current].rows.push_back(std::move(values));
        matrices[current].lines.push_back(line_no);
      }
    }
    if (closes) current.clear();
  }
  if (!current.empty()) throw ParseError("unterminated matrix mpc." + current, line_no);

  if (!base_mva) throw Error(ErrorCode::kMissingTable, "missing mpc.baseMVA");
  for (const char* required : {"bus", "gen", "branch"}) {
    if (!matrices.count(required)) throw Error(ErrorCode::kMissingTable, std::string("missing matrix mpc.") + required);
  }
  raw.base_mva = *base_mva;

  const Matrix& bus = matrices["bus"];
  check_arity(bus, kBusColumns, "bus");
  for (const auto& r : bus.rows) {
    RawBus b;
    b.id = as_int(r[0]);
    b.type = as_int(r[1]);
    b.pd = r[2];
    b.qd = r[3];
    b.gs = r[4];
    b.bs = r[5];
    b.vm = r[7];
    b.va = r[8];
    b.base_kv = r[9];
    b.vmax = r[11];
    b.vmin = r[12];
    raw.buses.push_back(b);
  }
  const Matrix& gen = matrices["gen"];
  check_arity(gen, kGenColumns, "gen");
  for (const auto& r : gen.rows) {
    RawGen g;
    g.bus = as_int(r[0]);
    g.pg = r[1];
    g.qg = r[2];
    g.qmax = r[3];
    g.qmin = r[4];
    g.vg = r[5];
    g.status = as_int(r[7]);
    raw.gens.push_back(g);
  }
  const Matrix& branch = matrices["branch"];
  check_arity(branch, kBranchColumns, "branch");
  for (const auto& r : branch.rows) {
    RawBranch br;
    br.from = as_int(r[0]);
    br.to = as_int(r[1]);
    br.r = r[2];
    br.x = r[3];
    br.b = r[4];
    br.rate_a = r[5];
    br.tap = r[8];
    br.shift = r[9];
    br.status = as_int(r[10]);
    raw.branches.push_back(br);
  }
  validate(raw);
  return raw;
}

RawCase parse_matpower(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_matpower(in);
}

RawCase load_matpower(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return parse_matpower(in);
}

// ---------------------------------------------------------------- Snapshot

double Snapshot::injection_sum() const {
  return std::accumulate(buses.begin(), buses.end(), 0.0, [](double acc, const SnapshotBus& b) { return acc + b.p; });
}

Snapshot snapshot_from_case(const RawCase& raw, std::string name) {
  validate(raw);
  const double base = raw.base_mva;
  Snapshot snap;
  snap.name = std::move(name);
  snap.base_mva = base;
  snap.provenance = "case dispatch";

  std::map<int, std::size_t> index;
  for (const RawBus& b : raw.buses) {
    index[b.id] = snap.buses.size();
    SnapshotBus sb;
    sb.id = b.id;
    sb.type = static_cast<BusType>(b.type);
    sb.p = -b.pd / base;
    sb.q = -b.qd / base;
    sb.vm = b.vm;
    sb.va = b.va * std::numbers::pi / 180.0;
    sb.gs = b.gs / base;
    sb.bs = b.bs / base;
    snap.buses.push_back(sb);
  }
  std::vector<double> qmin(snap.buses.size(), 0.0);
  std::vector<double> qmax(snap.buses.size(), 0.0);
  std::vector<bool> has_gen(snap.buses.size(), false);
  for (const RawGen& g : raw.gens) {
    if (g.status <= 0) continue;
    const std::size_t k = index.at(g.bus);
    SnapshotBus& sb = snap.buses[k];
    sb.p += g.pg / base;
    sb.q += g.qg / base;
    qmin[k] += g.qmin / base;
    qmax[k] += g.qmax / base;
    if (!has_gen[k] && sb.type != BusType::kPQ) sb.vm = g.vg;
    has_gen[k] = true;
  }
  for (std::size_t k = 0; k < snap.buses.size(); ++k) {
    SnapshotBus& sb = snap.buses[k];
    if (sb.type == BusType::kPV && !has_gen[k]) sb.type = BusType::kPQ;
    if (has_gen[k]) {
      sb.qmin = qmin[k] - raw.buses[k].qd / base;
      sb.qmax = qmax[k] - raw.buses[k].qd / base;
    }
  }

  std::int32_t next_id = 1;
  for (const RawBranch& br : raw.branches) {
    SnapshotLine l;
    l.id = line_id(next_id++);
    l.from = br.from;
    l.to = br.to;
    l.r = br.r;
    l.x = br.x;
    l.b = br.x != 0.0 ? 1.0 / std::abs(br.x) : 0.0;
    l.charging = br.b;
    l.tap = br.tap != 0.0 ? br.tap : 1.0;
    l.shift = br.shift * std::numbers::pi / 180.0;
    l.unlimited = !(br.rate_a > 0.0);
    l.c = l.unlimited ? 0.0 : br.rate_a / base;
    l.in_service = br.status > 0;
    snap.lines.push_back(l);
  }
  return snap;
}

Snapshot read_snapshot_json(std::istream& in) {
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("snapshot JSON: ") + e.what());
  }
  try {
    Snapshot snap;
    snap.name = j.value("name", "");
    snap.base_mva = j.at("base_mva").get<double>();
    snap.provenance = j.value("provenance", "");
    for (const auto& b : j.at("buses")) {
      SnapshotBus sb;
      sb.id = b.at("id").get<int>();
      sb.type = static_cast<BusType>(b.value("type", 1));
      sb.p = b.at("p").get<double>();
      sb.q = b.value("q", 0.0);
      sb.vm = b.value("vm", 1.0);
      sb.va = b.value("va", 0.0);
      sb.gs = b.value("gs", 0.0);
      sb.bs = b.value("bs", 0.0);
      if (b.contains("qmin")) sb.qmin = b.at("qmin").get<double>();
      if (b.contains("qmax")) sb.qmax = b.at("qmax").get<double>();
      snap.buses.push_back(sb);
    }
    for (const auto& l : j.at("lines")) {
      SnapshotLine sl;
      sl.id = line_id(l.at("id").get<std::int32_t>());
      sl.from = l.at("from").get<int>();
      sl.to = l.at("to").get<int>();
      sl.r = l.value("r", 0.0);
      sl.x = l.at("x").get<double>();
      sl.b = l.value("b", sl.x != 0.0 ? 1.0 / std::abs(sl.x) : 0.0);
      sl.charging = l.value("charging", 0.0);
      sl.tap = l.value("tap", 1.0);
      sl.shift = l.value("shift", 0.0);
      sl.c = l.value("c", 0.0);
      sl.unlimited = l.value("unlimited", false);
      sl.in_service = l.value("status", 1) > 0;
      snap.lines.push_back(sl);
    }
    return snap;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("snapshot JSON: ") + e.what());
  }
}

Snapshot load_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return read_snapshot_json(in);
}

std::string write_snapshot_json(const Snapshot& snap) {
  ordered_json j;
  j["schema_version"] = 1;
  j["name"] = snap.name;
  j["base_mva"] = snap.base_mva;
  j["provenance"] = snap.provenance;
  ordered_json buses = ordered_json::array();
  for (const SnapshotBus& b : snap.buses) {
    ordered_json e;
    e["id"] = b.id;
    e["type"] = static_cast<int>(b.type);
    e["p"] = b.p;
    e["q"] = b.q;
    e["vm"] = b.vm;
    e["va"] = b.va;
    e["gs"] = b.gs;
    e["bs"] = b.bs;
    if (b.qmin) e["qmin"] = *b.qmin;
    if (b.qmax) e["qmax"] = *b.qmax;
    buses.push_back(std::move(e));
  }
  j["buses"] = std::move(buses);
  ordered_json lines = ordered_json::array();
  for (const SnapshotLine& l : snap.lines) {
    ordered_json e;
    e["id"] = to_int(l.id);
    e["from"] = l.from;
    e["to"] = l.to;
    e["r"] = l.r;
    e["x"] = l.x;
    e["b"] = l.b;
    e["charging"] = l.charging;
    e["tap"] = l.tap;
    e["shift"] = l.shift;
    e["c"] = l.c;
    e["unlimited"] = l.unlimited;
    e["status"] = l.in_service ? 1 : 0;
    lines.push_back(std::move(e));
  }
  j["lines"] = std::move(lines);
  return j.dump(1) + "\n";
}

Network to_network(const Snapshot& snap, Engine engine) {
  if (!(snap.base_mva > 0.0)) throw Error(ErrorCode::kInvalidCase, "base_mva must be positive");
  std::map<int, int> index;
  std::vector<Bus> buses;
  int reference = -1;
  for (const SnapshotBus& sb : snap.buses) {
    if (!index.emplace(sb.id, static_cast<int>(buses.size())).second) {
      throw Error(ErrorCode::kInvalidCase, "duplicate bus id " + std::to_string(sb.id));
    }
    if (sb.type == BusType::kSlack) {
      if (reference >= 0) throw Error(ErrorCode::kInvalidCase, "more than one slack bus");
      reference = static_cast<int>(buses.size());
    }
    Bus b;
    b.id = sb.id;
    b.type = sb.type;
    b.p = sb.p;
    b.q = sb.q;
    b.vm = sb.vm;
    b.va = sb.va;
    b.gs = sb.gs;
    b.bs = sb.bs;
    b.qmin = sb.qmin;
    b.qmax = sb.qmax;
    buses.push_back(b);
  }
  if (reference < 0) throw Error(ErrorCode::kInvalidCase, "no slack bus");

  if (engine == Engine::kDC) {
    const double total = snap.injection_sum();
    if (std::abs(total) > kBalanceTolerance) {
      throw Error(ErrorCode::kUnbalanced, "injections are not balanced (sum = " + std::to_string(total) + " p.u.)");
    }
  }

  std::vector<Line> lines;
  for (const SnapshotLine& sl : snap.lines) {
    if (!sl.in_service) continue;
    auto from = index.find(sl.from);
    auto to = index.find(sl.to);
    if (from == index.end() || to == index.end()) {
      throw Error(ErrorCode::kInvalidCase, "line " + std::to_string(to_int(sl.id)) + " references an unknown bus");
    }
    if (sl.x == 0.0 || !(sl.b > 0.0)) {
      throw Error(ErrorCode::kInvalidCase,
                  "line " + std::to_string(to_int(sl.id)) + " has zero reactance or non-positive susceptance");
    }
    Line l;
    l.id = sl.id;
    l.from = from->second;
    l.to = to->second;
    l.b = sl.b;
    l.unlimited = sl.unlimited;
    l.capacity = sl.unlimited ? kInfinity : sl.c;
    l.r = sl.r;
    l.x = sl.x;
    l.charging = sl.charging;
    l.tap = sl.tap;
    l.shift = sl.shift;
    lines.push_back(l);
  }
  return Network::create(std::move(buses), std::move(lines), reference);
}

Snapshot rebalanced(Snapshot snapshot) {
  const double total = snapshot.injection_sum();
  for (SnapshotBus& b : snapshot.buses) {
    if (b.type == BusType::kSlack) {
      b.p -= total;
      return snapshot;
    }
  }
  throw Error(ErrorCode::kInvalidCase, "no slack bus");
}

Snapshot load_case(const std::string& path) {
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with(".m")) {
    auto slash = path.find_last_of('/');
    std::string stem = path.substr(slash == std::string::npos ? 0 : slash + 1);
    stem = stem.substr(0, stem.size() - 2);
    return snapshot_from_case(load_matpower(path), stem);
  }
  return load_snapshot(path);
}

}  // namespace tpart
