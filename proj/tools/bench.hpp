#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tpart::cli {

struct BenchConfig {
  std::string suite;  // table1, table2, table3
  std::vector<std::string> cases;  // empty: the suite's default list
  std::vector<std::uint64_t> seeds;
  std::vector<int> ks;  // empty: 5, or 4 and 5 for table3
  std::string data_dir;
  double time_limit = 600.0;
  int threads = 0;
};

std::vector<std::string> default_cases(const std::string& suite);

/// Writes one CSV row per (case, k, clusterer).  Failed rows carry the error
/// in the status column.  Returns the number of failed rows.
int run_bench(const BenchConfig& config, std::ostream& csv, std::ostream& log);

}  // namespace tpart::cli
