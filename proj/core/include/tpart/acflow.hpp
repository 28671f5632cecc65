#pragma once

#include <complex>
#include <vector>

#include "tpart/dcflow.hpp"
#include "tpart/grid.hpp"

namespace tpart {

struct AcSolution {
  std::vector<std::complex<double>> voltages;  // per bus
  std::vector<std::complex<double>> s_from;     // per line, injected at the from end
  std::vector<std::complex<double>> s_to;       // per line, injected at the to end
  std::vector<int> pv_to_pq;                    // buses converted by reactive limits
  int iterations = 0;
  double residual = 0.0;  // max |power mismatch|, per-unit
};

struct AcOptions {
  double tolerance = 1e-8;
  int max_iterations = 30;
  bool enforce_q_limits = true;
  double q_limit_tolerance = 1e-6;
  int max_q_limit_rounds = 10;
};

/// Newton-Raphson in polar coordinates.  With `warm_start` the iteration
/// begins from that solution's voltages (PV/slack magnitudes reset to their
/// setpoints); otherwise from a flat profile.  Throws NotConvergedError.
AcSolution solve_ac(const Network& network, const AcSolution* warm_start = nullptr,
                    const AcOptions& options = {});

/// Warm start first, flat start as fallback.
AcSolution solve_ac_with_fallback(const Network& network, const AcSolution* warm_start,
                                  const AcOptions& options = {});

/// max(|S_from|, |S_to|) / c over limited lines.
CongestionReport congestion_ac(const AcSolution& solution, const Network& network);

/// Complex power injected at every bus by the network at `voltages`.
std::vector<std::complex<double>> bus_injections(const Network& network,
                                                 const std::vector<std::complex<double>>& voltages);

/// Series plus shunt losses of a solution.
double total_active_losses(const AcSolution& solution, const Network& network);

}  // namespace tpart
