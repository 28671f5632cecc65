#pragma once

#include <cstdint>
#include <string>

#include "tpart/acflow.hpp"
#include "tpart/obi.hpp"
#include "tpart/obs.hpp"
#include "tpart/report.hpp"

namespace tpart {

struct PipelineOptions {
  std::uint64_t seed = 1;
  int threads = 0;  // candidate evaluation workers, 0: hardware concurrency
  MilpOptions milp;
  AcOptions ac;
  std::string case_name;
};

/// OBI on the whole network, connectivity repair, then one OBS solve.
/// `method` selects the OBS solver and must be one of the two-stage methods.
TreePartitionReport two_stage(const Network& network, int k, Clusterer clusterer, Method method,
                              const PipelineOptions& options = {});

/// k-1 rounds of splitting the largest bridge-block in two.
TreePartitionReport recursive(const Network& network, int k, Engine engine, Clusterer clusterer,
                              const PipelineOptions& options = {});

/// Dispatches on `method`.
TreePartitionReport run_method(const Network& network, int k, Method method, Clusterer clusterer,
                               const PipelineOptions& options = {});

struct Evaluation {
  double gamma = 0.0;
  BridgeBlockDecomposition bbd;
};

/// Flow solve, congestion and bridge-blocks of the network without `switched`.
Evaluation evaluate_only(const Network& network, const SwitchSet& switched, Engine engine,
                         const AcOptions& options = {});

}  // namespace tpart
