#include <doctest.h>

#include <fstream>
#include <sstream>

#include "oracles/oracles.hpp"
#include "support.hpp"
#include "tpart/caseio.hpp"
#include "tpart/dcflow.hpp"
#include "tpart/error.hpp"

using namespace tpart;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void check_same(const RawCase& a, const RawCase& b) {
  CHECK(a.base_mva == b.base_mva);
  REQUIRE(a.buses.size() == b.buses.size());
  for (std::size_t i = 0; i < a.buses.size(); ++i) {
    CHECK(a.buses[i].id == b.buses[i].id);
    CHECK(a.buses[i].type == b.buses[i].type);
    CHECK(a.buses[i].pd == b.buses[i].pd);
    CHECK(a.buses[i].qd == b.buses[i].qd);
  }
  REQUIRE(a.gens.size() == b.gens.size());
  for (std::size_t i = 0; i < a.gens.size(); ++i) {
    CHECK(a.gens[i].bus == b.gens[i].bus);
    CHECK(a.gens[i].pg == b.gens[i].pg);
  }
  REQUIRE(a.branches.size() == b.branches.size());
  for (std::size_t i = 0; i < a.branches.size(); ++i) {
    CHECK(a.branches[i].from == b.branches[i].from);
    CHECK(a.branches[i].to == b.branches[i].to);
    CHECK(a.branches[i].x == b.branches[i].x);
    CHECK(a.branches[i].rate_a == b.branches[i].rate_a);
    CHECK(a.branches[i].status == b.branches[i].status);
  }
}

const char* kTriangleCase = R"(function mpc = tri
mpc.baseMVA = 100;
mpc.bus = [
  1 3 0 0 0 0 1 1 0 138 1 1.1 0.9;
  2 1 50 0 0 0 1 1 0 138 1 1.1 0.9;
  3 1 50 0 0 0 1 1 0 138 1 1.1 0.9;
];
mpc.gen = [
  1 100 0 100 -100 1 100 1 200 0;
];
mpc.branch = [
  1 2 0 0.1 0 100 100 100 0 0 1 -360 360;
  1 3 0 0.1 0 100 100 100 0 0 0 -360 360;
  2 3 0 0.1 0 0 0 0 0 0 1 -360 360;
];
)";

}  // namespace

TEST_SUITE("caseio") {

TEST_CASE("two-bus case parses to two bus rows and one branch row") {
  RawCase raw = load_matpower(support::data_path("fixtures/case2.m"));
  CHECK(raw.buses.size() == 2);
  CHECK(raw.branches.size() == 1);
  CHECK(raw.gens.size() == 1);
  CHECK(raw.base_mva == 100.0);
}

TEST_CASE("comment lines do not change the parsed case") {
  check_same(load_matpower(support::data_path("fixtures/case2.m")),
             load_matpower(support::data_path("fixtures/case2_commented.m")));
}

TEST_CASE("pglib IEEE-30 row counts agree with a line count of the file") {
  const std::string path = support::data_path("pglib/pglib_opf_case30_ieee.m");
  RawCase raw = load_matpower(path);
  CHECK(static_cast<int>(raw.buses.size()) == oracle::matpower_rows(path, "bus"));
  CHECK(static_cast<int>(raw.branches.size()) == oracle::matpower_rows(path, "branch"));
  CHECK(raw.buses.size() == 30);
  CHECK(raw.branches.size() == 41);
}

TEST_CASE("two-bus network has b = 1/x and c = rateA / baseMVA") {
  Network g = to_network(load_case(support::data_path("fixtures/case2.m")), Engine::kDC);
  REQUIRE(g.line_count() == 1);
  CHECK(g.line(0).b == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(g.line(0).capacity == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_FALSE(g.line(0).unlimited);
  CHECK(g.bus(0).p == doctest::Approx(1.0));
  CHECK(g.bus(1).p == doctest::Approx(-1.0));
  CHECK(g.reference_bus() == 0);
}

TEST_CASE("out-of-service branches are dropped and rateA = 0 means unlimited") {
  Snapshot s = snapshot_from_case(parse_matpower(std::string_view(kTriangleCase)), "tri");
  CHECK(s.lines.size() == 3);
  Network g = to_network(s, Engine::kDC);
  REQUIRE(g.line_count() == 2);
  CHECK(to_int(g.line(0).id) == 1);
  CHECK(to_int(g.line(1).id) == 3);
  CHECK(g.line(1).unlimited);
}

TEST_CASE("IEEE-30 snapshot gives a connected 30-bus 41-line network") {
  Network g = to_network(load_case(support::data_path("snapshots/ieee30_dc.json")), Engine::kDC);
  CHECK(g.bus_count() == 30);
  CHECK(g.line_count() == 41);
  CHECK(oracle::connected(g.bus_count(), g.edge_list()));
}

TEST_CASE("snapshot JSON write-read-write is byte-identical") {
  for (const char* name : {"snapshots/ieee30_dc.json", "snapshots/ieee30_ac.json", "fixtures/three_areas.m"}) {
    Snapshot s = load_case(support::data_path(name));
    std::string once = write_snapshot_json(s);
    std::istringstream in(once);
    CHECK(write_snapshot_json(read_snapshot_json(in)) == once);
  }
}

TEST_CASE("committed snapshots are stored in canonical form") {
  const std::string path = support::data_path("snapshots/ieee118_dc.json");
  CHECK(write_snapshot_json(load_snapshot(path)) == slurp(path));
}

TEST_CASE("per-unit flows do not depend on a common scaling of MW values and baseMVA") {
  RawCase raw = load_matpower(support::data_path("fixtures/three_areas.m"));
  RawCase scaled = raw;
  const double f = 3.7;
  scaled.base_mva *= f;
  for (auto& b : scaled.buses) {
    b.pd *= f;
    b.qd *= f;
  }
  for (auto& gen : scaled.gens) gen.pg *= f;
  for (auto& br : scaled.branches) br.rate_a *= f;
  Network a = to_network(snapshot_from_case(raw), Engine::kDC);
  Network b = to_network(snapshot_from_case(scaled), Engine::kDC);
  CHECK(a.line_count() == b.line_count());
  DcSolution da = solve_dc(a), db = solve_dc(b);
  for (std::size_t l = 0; l < da.flows.size(); ++l) CHECK(da.flows[l] == doctest::Approx(db.flows[l]).epsilon(1e-12));
  CHECK(congestion_dc(da, a).gamma == doctest::Approx(congestion_dc(db, b).gamma).epsilon(1e-12));
}

TEST_CASE("malformed input is rejected with a code") {
  SUBCASE("missing bus table") {
    try {
      parse_matpower(std::string_view("mpc.baseMVA = 100;\nmpc.gen = [\n1 0 0 0 0 1 100 1 0 0;\n];\n"));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kMissingTable);
    }
  }
  SUBCASE("short row reports its line") {
    std::string text = kTriangleCase;
    text.replace(text.find("  2 1 50 0 0 0 1 1 0 138 1 1.1 0.9;"), 36, "  2 1 50;");
    try {
      parse_matpower(std::string_view(text));
      FAIL("expected an error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 5);
    }
  }
  SUBCASE("unbalanced DC injections") {
    Snapshot s = load_case(support::data_path("fixtures/case2.m"));
    s.buses[0].p += 0.5;
    try {
      to_network(s, Engine::kDC);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kUnbalanced);
    }
    CHECK(std::abs(rebalanced(s).injection_sum()) < 1e-12);
    CHECK_NOTHROW(to_network(rebalanced(s), Engine::kDC));
  }
}

}  // TEST_SUITE
