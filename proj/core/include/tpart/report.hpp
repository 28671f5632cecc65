#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tpart/grid.hpp"
#include "tpart/obi.hpp"
#include "tpart/types.hpp"

namespace tpart {

enum class Method { kTwoStageMilp, kTwoStageBfDc, kTwoStageBfAc, kRecursiveDc, kRecursiveAc };

std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view text);
std::optional<Clusterer> parse_clusterer(std::string_view text);
Engine engine_of(Method method);

struct BbdSummary {
  int blocks = 0;
  int bridges = 0;
  std::vector<int> nontrivial;  // sizes >= 2, largest first

  static BbdSummary of(const BridgeBlockDecomposition& bbd);
  friend bool operator==(const BbdSummary&, const BbdSummary&) = default;
};

/// One round of the recursive method.
struct IterationRecord {
  int block_size = 0;
  int candidates = 0;
  int skipped = 0;  // AC candidates without a converged flow
  LineId kept{};
  std::vector<LineId> switched;
  double gamma = 0.0;
  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct PhaseTimings {
  double flow = 0.0;
  double obi = 0.0;
  double obs = 0.0;
  double total = 0.0;
  friend bool operator==(const PhaseTimings&, const PhaseTimings&) = default;
};

struct TreePartitionReport {
  std::string case_name;
  Method method = Method::kTwoStageMilp;
  Clusterer clusterer = Clusterer::kSpectralLN;
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<int> bus_ids;   // external id of every bus, by index
  Partition partition;
  SwitchSet switched;
  double gamma_pre = 0.0;
  double gamma_post = 0.0;
  BbdSummary bbd_pre;
  BbdSummary bbd_post;
  bool optimal = false;
  bool partial = false;
  int clusters_added = 0;
  std::size_t trees_evaluated = 0;
  std::size_t trees_skipped = 0;
  double nodes = 0.0;
  int big_m_violations = -1;  // -1 when no MILP was solved
  double big_m_worst_ratio = 0.0;
  int big_m_four_c_violations = -1;  // inactive cross edges that M = 4c would have cut
  bool big_m_fallback = false;
  std::vector<IterationRecord> iterations;
  PhaseTimings timings;

  friend bool operator==(const TreePartitionReport&, const TreePartitionReport&) = default;
};

inline constexpr int kReportSchemaVersion = 1;

std::string write_report_json(const TreePartitionReport& report, bool include_timings = true);
TreePartitionReport read_report_json(std::string_view text);

std::string report_csv_header();
std::string write_report_csv(const TreePartitionReport& report, bool header = true);

}  // namespace tpart
