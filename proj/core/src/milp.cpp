#include <Highs.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>
#include <sstream>

#include "tpart/error.hpp"
#include "tpart/obs.hpp"

namespace tpart {

int LinearModel::add_variable(std::string name, double lower, double upper, double cost, bool integer) {
  variables.push_back({std::move(name), lower, upper, cost, integer});
  return static_cast<int>(variables.size()) - 1;
}

int LinearModel::add_row(std::string name, std::vector<std::pair<int, double>> terms, double lower, double upper) {
  rows.push_back({std::move(name), std::move(terms), lower, upper});
  return static_cast<int>(rows.size()) - 1;
}

int LinearModel::integer_count() const {
  return static_cast<int>(std::count_if(variables.begin(), variables.end(),
                                        [](const Variable& v) { return v.integer; }));
}

namespace {

void write_terms(std::ostringstream& os, const LinearModel& m, const std::vector<std::pair<int, double>>& terms) {
  bool first = true;
  for (auto [j, a] : terms) {
    if (a == 0.0) continue;
    os << (a < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
    double mag = std::abs(a);
    if (mag != 1.0) os << mag << ' ';
    os << m.variables[static_cast<std::size_t>(j)].name;
    first = false;
  }
  if (first) os << "0 " << m.variables.front().name;
}

}  // namespace

std::string LinearModel::to_lp() const {
  std::ostringstream os;
  os.precision(17);
  os << "Minimize\n obj: ";
  std::vector<std::pair<int, double>> obj;
  for (std::size_t j = 0; j < variables.size(); ++j) {
    if (variables[j].cost != 0.0) obj.emplace_back(static_cast<int>(j), variables[j].cost);
  }
  write_terms(os, *this, obj);
  os << "\nSubject To\n";
  for (const Row& r : rows) {
    auto emit = [&](const char* suffix, const char* op, double rhs) {
      os << ' ' << r.name << suffix << ": ";
      write_terms(os, *this, r.terms);
      os << ' ' << op << ' ' << rhs << '\n';
    };
    if (r.lower == r.upper) {
      emit("", "=", r.lower);
    } else {
      bool both = std::isfinite(r.lower) && std::isfinite(r.upper);
      if (std::isfinite(r.lower)) emit(both ? "_lo" : "", ">=", r.lower);
      if (std::isfinite(r.upper)) emit(both ? "_hi" : "", "<=", r.upper);
    }
  }
  os << "Bounds\n";
  for (const Variable& v : variables) {
    if (v.integer && v.lower == 0.0 && v.upper == 1.0) continue;
    if (!std::isfinite(v.lower) && !std::isfinite(v.upper)) {
      os << ' ' << v.name << " free\n";
    } else {
      os << ' ' << (std::isfinite(v.lower) ? std::to_string(v.lower) : "-inf") << " <= " << v.name << " <= "
         << (std::isfinite(v.upper) ? std::to_string(v.upper) : "+inf") << '\n';
    }
  }
  os << "Binary\n";
  for (const Variable& v : variables) {
    if (v.integer) os << ' ' << v.name << '\n';
  }
  os << "End\n";
  return os.str();
}

double big_m_for(const Network& network, int line) {
  const Line& l = network.line(line);
  if (!l.unlimited) return 4.0 * l.capacity;
  double top = 0.0;
  for (const Line& x : network.lines()) {
    if (!x.unlimited) top = std::max(top, x.capacity);
  }
  return 4.0 * (top > 0.0 ? top : 1.0);
}

std::vector<double> safe_big_m(const ObsInstance& instance) {
  const Network& g = instance.network;
  const ReducedGraph& red = instance.reduced;
  double supply = 0.0;
  for (const Bus& b : g.buses()) supply += std::max(b.p, 0.0);

  // Weighted diameter (by |x| = 1/b) of every cluster over internal lines.
  const int n = g.bus_count();
  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(n));
  for (int l : red.internal_lines) {
    const Line& line = g.line(l);
    adj[static_cast<std::size_t>(line.from)].emplace_back(line.to, 1.0 / line.b);
    adj[static_cast<std::size_t>(line.to)].emplace_back(line.from, 1.0 / line.b);
  }
  std::vector<double> diameter(static_cast<std::size_t>(red.k), 0.0);
  std::vector<double> dist(static_cast<std::size_t>(n));
  using Item = std::pair<double, int>;
  for (int s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), kInfinity);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[static_cast<std::size_t>(s)] = 0.0;
    pq.emplace(0.0, s);
    double far = 0.0;
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[static_cast<std::size_t>(u)]) continue;
      far = std::max(far, d);
      for (auto [v, w] : adj[static_cast<std::size_t>(u)]) {
        if (d + w < dist[static_cast<std::size_t>(v)]) {
          dist[static_cast<std::size_t>(v)] = d + w;
          pq.emplace(d + w, v);
        }
      }
    }
    double& dc = diameter[static_cast<std::size_t>(instance.partition.cluster_of(s))];
    dc = std::max(dc, far);
  }
  std::vector<double> xs;
  for (const ReducedEdge& e : red.edges) xs.push_back(1.0 / g.line(e.line).b);
  std::sort(xs.begin(), xs.end(), std::greater<>());
  double path = std::accumulate(diameter.begin(), diameter.end(), 0.0);
  for (int i = 0; i < red.k - 1 && i < static_cast<int>(xs.size()); ++i) path += xs[static_cast<std::size_t>(i)];

  std::vector<double> m;
  for (const ReducedEdge& e : red.edges) {
    const Line& line = g.line(e.line);
    double bound = std::max(supply, line.b * supply * path);
    m.push_back(std::max(big_m_for(g, e.line), bound * (1.0 + 1e-6)));
  }
  return m;
}

MilpModel build_milp(const ObsInstance& instance, BigMRule rule) {
  if (instance.engine != Engine::kDC) {
    throw Error(ErrorCode::kInvalidArgument, "the MILP formulation is DC only");
  }
  const Network& g = instance.network;
  const ReducedGraph& red = instance.reduced;
  const int n = g.bus_count();
  const int m = g.line_count();
  const int k = red.k;
  const int nc = static_cast<int>(red.edges.size());

  MilpModel mm;
  mm.k = k;
  LinearModel& lp = mm.model;
  mm.gamma = lp.add_variable("gamma", 0.0, kInfinity, 1.0);
  for (int l = 0; l < m; ++l) {
    mm.flow.push_back(lp.add_variable("f" + std::to_string(to_int(g.line(l).id)), -kInfinity, kInfinity));
  }
  for (int i = 0; i < n; ++i) {
    mm.theta.push_back(lp.add_variable("th" + std::to_string(g.bus(i).id), -kInfinity, kInfinity));
  }
  for (int e = 0; e < nc; ++e) {
    std::string tag = std::to_string(to_int(red.edges[static_cast<std::size_t>(e)].id));
    mm.y.push_back(lp.add_variable("y" + tag, 0.0, 1.0, 0.0, true));
    mm.q.push_back(lp.add_variable("q" + tag, -kInfinity, kInfinity));
    mm.big_m.push_back(big_m_for(g, red.edges[static_cast<std::size_t>(e)].line));
  }
  if (rule == BigMRule::kSafe) mm.big_m = safe_big_m(instance);

  // Congestion: c gamma >= |f| on limited lines.
  for (int l = 0; l < m; ++l) {
    const Line& line = g.line(l);
    if (line.unlimited) continue;
    std::string tag = std::to_string(to_int(line.id));
    lp.add_row("cap_p" + tag, {{mm.gamma, line.capacity}, {mm.flow[static_cast<std::size_t>(l)], -1.0}}, 0.0, kInfinity);
    lp.add_row("cap_n" + tag, {{mm.gamma, line.capacity}, {mm.flow[static_cast<std::size_t>(l)], 1.0}}, 0.0, kInfinity);
  }

  // Exactly k-1 cross edges stay in service.
  std::vector<std::pair<int, double>> card;
  for (int e = 0; e < nc; ++e) card.emplace_back(mm.y[static_cast<std::size_t>(e)], 1.0);
  lp.add_row("tree_size", std::move(card), k - 1.0, k - 1.0);

  // Single-commodity flow from cluster 0 reaches every other cluster.
  std::vector<std::vector<std::pair<int, double>>> bal(static_cast<std::size_t>(k));
  for (int e = 0; e < nc; ++e) {
    const ReducedEdge& re = red.edges[static_cast<std::size_t>(e)];
    bal[static_cast<std::size_t>(re.u)].emplace_back(mm.q[static_cast<std::size_t>(e)], 1.0);
    bal[static_cast<std::size_t>(re.v)].emplace_back(mm.q[static_cast<std::size_t>(e)], -1.0);
  }
  for (int c = 0; c < k; ++c) {
    double rhs = c == 0 ? k - 1.0 : -1.0;
    lp.add_row("commodity" + std::to_string(c), std::move(bal[static_cast<std::size_t>(c)]), rhs, rhs);
  }
  for (int e = 0; e < nc; ++e) {
    std::string tag = std::to_string(to_int(red.edges[static_cast<std::size_t>(e)].id));
    int q = mm.q[static_cast<std::size_t>(e)], y = mm.y[static_cast<std::size_t>(e)];
    lp.add_row("qcap_p" + tag, {{q, 1.0}, {y, -(k - 1.0)}}, -kInfinity, 0.0);
    lp.add_row("qcap_n" + tag, {{q, 1.0}, {y, k - 1.0}}, 0.0, kInfinity);
  }

  // DC flow equations; big-M relaxed on cross edges.
  for (int e = 0; e < nc; ++e) {
    const ReducedEdge& re = red.edges[static_cast<std::size_t>(e)];
    const Line& line = g.line(re.line);
    std::string tag = std::to_string(to_int(re.id));
    int f = mm.flow[static_cast<std::size_t>(re.line)], y = mm.y[static_cast<std::size_t>(e)];
    int ti = mm.theta[static_cast<std::size_t>(line.from)], tj = mm.theta[static_cast<std::size_t>(line.to)];
    double bm = mm.big_m[static_cast<std::size_t>(e)];
    // f - b(ti - tj) <= M(1 - y)  and  >= -M(1 - y)
    lp.add_row("ohm_hi" + tag, {{f, 1.0}, {ti, -line.b}, {tj, line.b}, {y, bm}}, -kInfinity, bm);
    lp.add_row("ohm_lo" + tag, {{f, 1.0}, {ti, -line.b}, {tj, line.b}, {y, -bm}}, -bm, kInfinity);
    // -M y <= f <= M y
    lp.add_row("off_hi" + tag, {{f, 1.0}, {y, -bm}}, -kInfinity, 0.0);
    lp.add_row("off_lo" + tag, {{f, 1.0}, {y, bm}}, 0.0, kInfinity);
  }
  for (int l : red.internal_lines) {
    const Line& line = g.line(l);
    lp.add_row("ohm" + std::to_string(to_int(line.id)),
               {{mm.flow[static_cast<std::size_t>(l)], 1.0},
                {mm.theta[static_cast<std::size_t>(line.from)], -line.b},
                {mm.theta[static_cast<std::size_t>(line.to)], line.b}},
               0.0, 0.0);
  }
  std::vector<std::vector<std::pair<int, double>>> node(static_cast<std::size_t>(n));
  for (int l = 0; l < m; ++l) {
    node[static_cast<std::size_t>(g.line(l).from)].emplace_back(mm.flow[static_cast<std::size_t>(l)], 1.0);
    node[static_cast<std::size_t>(g.line(l).to)].emplace_back(mm.flow[static_cast<std::size_t>(l)], -1.0);
  }
  for (int i = 0; i < n; ++i) {
    double p = g.bus(i).p;
    lp.add_row("bal" + std::to_string(g.bus(i).id), std::move(node[static_cast<std::size_t>(i)]), p, p);
  }
  lp.add_row("ref", {{mm.theta[static_cast<std::size_t>(g.reference_bus())], 1.0}}, 0.0, 0.0);
  return mm;
}

BigMCheck check_big_m(const MilpModel& model, const ObsInstance& instance,
                      const std::vector<double>& angles, const std::vector<bool>& kept) {
  BigMCheck out;
  for (std::size_t e = 0; e < instance.reduced.edges.size(); ++e) {
    if (kept[e]) continue;
    const Line& line = instance.network.line(instance.reduced.edges[e].line);
    double v = std::abs(line.b * (angles[static_cast<std::size_t>(line.from)] - angles[static_cast<std::size_t>(line.to)]));
    double ratio = v / model.big_m[e];
    out.worst_ratio = std::max(out.worst_ratio, ratio);
    if (ratio > 1.0 + 1e-9) ++out.violations;
    if (v > big_m_for(instance.network, instance.reduced.edges[e].line) * (1.0 + 1e-9)) ++out.four_c_violations;
  }
  return out;
}

ObsSolution solve_milp(const MilpModel& mm, const ObsInstance& instance, const MilpOptions& options) {
  const LinearModel& lp = mm.model;
  HighsLp h;
  h.num_col_ = static_cast<HighsInt>(lp.variables.size());
  h.num_row_ = static_cast<HighsInt>(lp.rows.size());
  h.sense_ = ObjSense::kMinimize;
  for (const auto& v : lp.variables) {
    h.col_cost_.push_back(v.cost);
    h.col_lower_.push_back(v.lower);
    h.col_upper_.push_back(v.upper);
    h.integrality_.push_back(v.integer ? HighsVarType::kInteger : HighsVarType::kContinuous);
  }
  h.a_matrix_.format_ = MatrixFormat::kRowwise;
  h.a_matrix_.num_col_ = h.num_col_;
  h.a_matrix_.num_row_ = h.num_row_;
  h.a_matrix_.start_.assign(1, 0);
  for (const auto& r : lp.rows) {
    h.row_lower_.push_back(r.lower);
    h.row_upper_.push_back(r.upper);
    for (auto [j, a] : r.terms) {
      h.a_matrix_.index_.push_back(static_cast<HighsInt>(j));
      h.a_matrix_.value_.push_back(a);
    }
    h.a_matrix_.start_.push_back(static_cast<HighsInt>(h.a_matrix_.index_.size()));
  }

  Highs highs;
  highs.setOptionValue("output_flag", options.verbose);
  highs.setOptionValue("mip_rel_gap", options.gap);
  highs.setOptionValue("mip_abs_gap", 1e-9);
  highs.setOptionValue("time_limit", options.time_limit);
  highs.setOptionValue("threads", static_cast<HighsInt>(std::max(1, options.threads)));
  highs.setOptionValue("random_seed", static_cast<HighsInt>(0));
  if (highs.passModel(std::move(h)) == HighsStatus::kError) {
    throw Error(ErrorCode::kSolver, "HiGHS rejected the model");
  }
  if (highs.run() == HighsStatus::kError) throw Error(ErrorCode::kSolver, "HiGHS failed");

  const HighsModelStatus status = highs.getModelStatus();
  const HighsInfo& info = highs.getInfo();
  if (status == HighsModelStatus::kInfeasible) {
    throw Error(ErrorCode::kInfeasible, "OBS model is infeasible");
  }
  if (info.primal_solution_status != kSolutionStatusFeasible) {
    throw Error(ErrorCode::kSolver, "no incumbent: " + highs.modelStatusToString(status));
  }
  const std::vector<double>& x = highs.getSolution().col_value;

  std::vector<int> kept;
  std::vector<bool> keep(mm.y.size(), false);
  for (std::size_t e = 0; e < mm.y.size(); ++e) {
    if (x[static_cast<std::size_t>(mm.y[e])] > 0.5) {
      kept.push_back(static_cast<int>(e));
      keep[e] = true;
    }
  }
  // The kept edges must form a spanning tree of the reduced graph.
  {
    ReducedGraph t;
    t.k = instance.reduced.k;
    for (int e : kept) t.edges.push_back(instance.reduced.edges[static_cast<std::size_t>(e)]);
    if (static_cast<int>(kept.size()) != t.k - 1 || !t.connected()) {
      throw Error(ErrorCode::kSolver, "MILP incumbent does not decode to a spanning tree");
    }
  }

  ObsSolution out;
  for (int e : kept) out.kept_tree.push_back(instance.reduced.edges[static_cast<std::size_t>(e)].id);
  std::sort(out.kept_tree.begin(), out.kept_tree.end());
  out.switched = instance.switch_for(kept);
  Network post = apply_switch(instance.network, out.switched);
  out.dc = solve_dc(post);
  out.gamma = congestion_dc(*out.dc, post).gamma;
  out.optimal = status == HighsModelStatus::kOptimal;
  out.stats.trees_evaluated = 1;
  out.stats.nodes = static_cast<double>(info.mip_node_count);
  out.stats.mip_gap = info.mip_gap;
  out.stats.objective = info.objective_function_value;

  out.big_m = check_big_m(mm, instance, out.dc->angles, keep);
  // Kept lines carrying more than M would have been cut off as well.
  for (std::size_t e = 0; e < keep.size(); ++e) {
    if (!keep[e]) continue;
    const int line = *post.line_index(instance.reduced.edges[e].id);
    double f = std::abs(out.dc->flows[static_cast<std::size_t>(line)]);
    if (f > mm.big_m[e] * (1.0 + 1e-9)) ++out.big_m->violations;
  }
  return out;
}

ObsSolution solve_obs_milp(const ObsInstance& instance, const MilpOptions& options) {
  if (options.big_m == BigMRule::kSafe) return solve_milp(build_milp(instance, BigMRule::kSafe), instance, options);
  try {
    return solve_milp(build_milp(instance, BigMRule::kFourTimesCapacity), instance, options);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInfeasible) throw;
  }
  ObsSolution out = solve_milp(build_milp(instance, BigMRule::kSafe), instance, options);
  out.big_m->fallback = true;
  return out;
}

}  // namespace tpart
