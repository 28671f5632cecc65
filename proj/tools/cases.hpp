#pragma once

#include <string>

#include "tpart/caseio.hpp"
#include "tpart/grid.hpp"

namespace tpart::cli {

/// Default data directory: $TPART_DATA_DIR, else the one baked in at build time.
std::string data_dir();

/// A path that exists is used as is.  Otherwise `name` is looked up in the
/// data directory: snapshots/<name>_<engine>.json, snapshots/<name>.json,
/// fixtures/<name>.m, fixtures/<name>.json.
std::string resolve_case(const std::string& name, Engine engine, const std::string& dir);

struct LoadedCase {
  std::string path;
  Snapshot snapshot;
  Network network;
};

LoadedCase load_network(const std::string& name, Engine engine, const std::string& dir, bool rebalance);

}  // namespace tpart::cli
