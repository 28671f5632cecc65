#pragma once

#include <functional>
#include <vector>

#include "tpart/dcflow.hpp"

namespace tpart::detail {

CongestionReport congestion_from_magnitudes(const Network& network, const std::vector<double>& magnitudes);

/// Runs body(0..count-1) on up to `threads` workers (0: hardware
/// concurrency).  The first exception is rethrown after all workers stop.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace tpart::detail
