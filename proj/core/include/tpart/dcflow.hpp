#pragma once

#include <vector>

#include "tpart/grid.hpp"

namespace tpart {

/// Injections must sum to zero within this tolerance for the DC engine.
inline constexpr double kBalanceTolerance = 1e-6;

struct DcSolution {
  std::vector<double> flows;   // per line index, from -> to, per-unit
  std::vector<double> angles;  // per bus, radians, reference bus = 0
  double residual = 0.0;       // max |net outflow - p_i|
};

struct CongestionReport {
  std::vector<double> levels;  // per line index; unlimited lines report 0
  double gamma = 0.0;
  LineId argmax{};
};

/// Lossless DC power flow through the reduced weighted Laplacian.
DcSolution solve_dc(const Network& network);

/// |f| / c over limited lines.  Throws when every line is unlimited.
CongestionReport congestion_dc(const DcSolution& solution, const Network& network);

/// Maximum congestion of G minus `switched` with unchanged injections.
double gamma_of_switch(const Network& network, const SwitchSet& switched);

/// max_i |sum_out f - sum_in f - p_i| for arbitrary flows.
double conservation_residual(const Network& network, const std::vector<double>& flows);

}  // namespace tpart
