#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tpart/acflow.hpp"
#include "tpart/dcflow.hpp"
#include "tpart/grid.hpp"

namespace tpart {

/// Partition of a network whose clusters are internally connected, plus the
/// reduced multigraph of its cross edges.
struct ObsInstance {
  Network network;
  Partition partition;
  ReducedGraph reduced;
  Engine engine = Engine::kDC;

  /// Validates k >= 2, partition size and internal connectivity.
  static ObsInstance make(Network network, Partition partition, Engine engine);

  /// Lines switched off when keeping the reduced edges `kept` (indices into reduced.edges).
  SwitchSet switch_for(std::span<const int> kept) const;
};

struct ObsStats {
  std::size_t trees_evaluated = 0;
  std::size_t trees_skipped = 0;  // AC non-convergence
  double nodes = 0.0;             // branch-and-bound nodes (MILP)
  double mip_gap = 0.0;
  double objective = 0.0;         // MILP objective before re-evaluation
};

struct BigMCheck {
  int violations = 0;
  double worst_ratio = 0.0;  // max |b dtheta| / M over inactive cross edges
  int four_c_violations = 0;  // the same check against M = 4c
  bool fallback = false;      // 4c cut off every tree; re-solved with the safe bound
};

struct ObsSolution {
  std::vector<LineId> kept_tree;  // sorted
  SwitchSet switched;
  double gamma = 0.0;
  std::optional<DcSolution> dc;
  std::optional<AcSolution> ac;
  bool optimal = false;
  ObsStats stats;
  std::optional<BigMCheck> big_m;
};

struct BruteForceOptions {
  int threads = 0;  // 0: hardware concurrency
  double tie_tolerance = 1e-9;  // relative; ties go to the smallest kept ids
  std::size_t max_trees = 2'000'000;
  AcOptions ac;
  const AcSolution* warm_start = nullptr;  // AC engine only
};

/// Evaluates gamma for every spanning tree of the reduced graph.
ObsSolution solve_bruteforce(const ObsInstance& instance, const BruteForceOptions& options = {});

/// Sparse linear model with bounds.  Rows are lo <= a x <= hi.
struct LinearModel {
  struct Variable {
    std::string name;
    double lower = -kInfinity;
    double upper = kInfinity;
    double cost = 0.0;
    bool integer = false;
  };
  struct Row {
    std::string name;
    std::vector<std::pair<int, double>> terms;
    double lower = -kInfinity;
    double upper = kInfinity;
  };

  std::vector<Variable> variables;
  std::vector<Row> rows;

  int add_variable(std::string name, double lower, double upper, double cost = 0.0, bool integer = false);
  int add_row(std::string name, std::vector<std::pair<int, double>> terms, double lower, double upper);

  int integer_count() const;
  /// CPLEX LP text, for debugging.
  std::string to_lp() const;
};

struct MilpModel {
  LinearModel model;
  int k = 0;
  int gamma = -1;              // variable indices
  std::vector<int> flow;       // per line
  std::vector<int> theta;      // per bus
  std::vector<int> y;          // per reduced edge
  std::vector<int> q;          // per reduced edge
  std::vector<double> big_m;   // per reduced edge
};

/// Big-M value of a cross edge: four times its capacity.  Unlimited lines
/// use four times the largest finite capacity in the network.
double big_m_for(const Network& network, int line);

/// Big-M values valid for every spanning tree: with P+ the total positive
/// injection, no line carries more than P+ and any post-switching angle
/// difference is at most P+ times the reactance of some path, which crosses
/// each cluster once and at most k-1 cross edges.  Never below 4c.
std::vector<double> safe_big_m(const ObsInstance& instance);

enum class BigMRule { kFourTimesCapacity, kSafe };

MilpModel build_milp(const ObsInstance& instance, BigMRule rule = BigMRule::kFourTimesCapacity);

struct MilpOptions {
  double gap = 1e-6;
  double time_limit = 600.0;
  int threads = 1;
  bool verbose = false;
  BigMRule big_m = BigMRule::kSafe;
};

/// build_milp + solve_milp with options.big_m.  A 4c model that HiGHS proves
/// infeasible is rebuilt with the safe bound.
ObsSolution solve_obs_milp(const ObsInstance& instance, const MilpOptions& options = {});

/// Solves with the embedded HiGHS branch-and-cut, decodes the kept tree and
/// re-evaluates gamma with an exact DC solve on the switched network.
ObsSolution solve_milp(const MilpModel& model, const ObsInstance& instance, const MilpOptions& options = {});

/// |b dtheta| <= M on every inactive cross edge at the given angles.
BigMCheck check_big_m(const MilpModel& model, const ObsInstance& instance,
                      const std::vector<double>& angles, const std::vector<bool>& kept);

}  // namespace tpart
