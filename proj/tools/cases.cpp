#include "cases.hpp"

#include <cstdlib>
#include <filesystem>

#include "tpart/error.hpp"

namespace fs = std::filesystem;

namespace tpart::cli {

std::string data_dir() {
  if (const char* env = std::getenv("TPART_DATA_DIR"); env && *env) return env;
  return TPART_DEFAULT_DATA_DIR;
}

std::string resolve_case(const std::string& name, Engine engine, const std::string& dir) {
  if (fs::is_regular_file(name)) return name;
  const fs::path root(dir);
  const std::string tag(to_string(engine));
  for (const fs::path& p : {root / "snapshots" / (name + "_" + tag + ".json"), root / "snapshots" / (name + ".json"),
                            root / "fixtures" / (name + ".m"), root / "fixtures" / (name + ".json")}) {
    if (fs::is_regular_file(p)) return p.string();
  }
  throw Error(ErrorCode::kIo, "case '" + name + "' not found (no such file, nothing matching in " + dir + ")");
}

LoadedCase load_network(const std::string& name, Engine engine, const std::string& dir, bool rebalance) {
  std::string path = resolve_case(name, engine, dir);
  Snapshot snap = load_case(path);
  if (rebalance) snap = rebalanced(std::move(snap));
  Network net = to_network(snap, engine);
  return {std::move(path), std::move(snap), std::move(net)};
}

}  // namespace tpart::cli
