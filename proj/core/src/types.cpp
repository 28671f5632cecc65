#include "tpart/types.hpp"

#include <algorithm>

#include "tpart/error.hpp"

namespace tpart {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kMissingTable: return "missing_table";
    case ErrorCode::kInvalidCase: return "invalid_case";
    case ErrorCode::kUnbalanced: return "unbalanced_injections";
    case ErrorCode::kDisconnected: return "disconnected";
    case ErrorCode::kSingular: return "singular_system";
    case ErrorCode::kNotConverged: return "not_converged";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kUndefinedCongestion: return "undefined_congestion";
    case ErrorCode::kEigenSolver: return "eigen_solver";
    case ErrorCode::kClustering: return "clustering";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kSolver: return "solver";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

std::string_view to_string(Engine engine) { return engine == Engine::kDC ? "dc" : "ac"; }

SwitchSet::SwitchSet(std::vector<LineId> lines) : lines_(std::move(lines)) {
  std::sort(lines_.begin(), lines_.end());
  lines_.erase(std::unique(lines_.begin(), lines_.end()), lines_.end());
}

bool SwitchSet::contains(LineId id) const {
  return std::binary_search(lines_.begin(), lines_.end(), id);
}

void SwitchSet::insert(LineId id) {
  auto it = std::lower_bound(lines_.begin(), lines_.end(), id);
  if (it == lines_.end() || *it != id) lines_.insert(it, id);
}

void SwitchSet::merge(const SwitchSet& other) {
  for (LineId id : other.lines_) insert(id);
}

}  // namespace tpart
