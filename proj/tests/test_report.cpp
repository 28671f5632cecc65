#include <doctest.h>

#include "tpart/error.hpp"
#include "tpart/report.hpp"

using namespace tpart;

namespace {

TreePartitionReport sample() {
  TreePartitionReport r;
  r.case_name = "toy";
  r.method = Method::kRecursiveDc;
  r.clusterer = Clusterer::kSpectralBN;
  r.k = 2;
  r.seed = 17;
  r.bus_ids = {1, 2, 3};
  r.partition = Partition({0, 0, 1}, 2);
  r.switched = SwitchSet({line_id(4), line_id(2)});
  r.gamma_pre = 1.0;
  r.gamma_post = 0.75;
  r.bbd_pre = {1, 0, {3}};
  r.bbd_post = {2, 1, {2}};
  r.optimal = true;
  r.trees_evaluated = 3;
  r.iterations.push_back({3, 3, 0, line_id(1), {line_id(2), line_id(4)}, 0.75});
  r.timings = {0.5, 0.25, 0.125, 1.0};
  return r;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("an empty switch set is an empty array") {
  TreePartitionReport r = sample();
  r.switched = SwitchSet{};
  CHECK(write_report_json(r).find("\"switched_lines\": []") != std::string::npos);
}

TEST_CASE("CSV rows carry the congestion") {
  std::string csv = write_report_csv(sample());
  CHECK(csv.rfind(report_csv_header(), 0) == 0);
  CHECK(csv.find(",0.75,") != std::string::npos);
  CHECK(write_report_csv(sample(), false).find("toy,recursive-dc,spectral-bn,dc,2,17,1,0.75,2,2,1,\"{3}\",1,\"{2}\",1,0,1\n") == 0);
}

TEST_CASE("JSON round trip is lossless and byte-identical") {
  TreePartitionReport r = sample();
  for (bool timings : {true, false}) {
    std::string text = write_report_json(r, timings);
    TreePartitionReport back = read_report_json(text);
    CHECK(write_report_json(back, timings) == text);
    if (timings) CHECK(back == r);
  }
  r.gamma_post = 0.1 + 0.2;
  CHECK(read_report_json(write_report_json(r)).gamma_post == r.gamma_post);
}

TEST_CASE("bad report JSON is a parse error") {
  CHECK_THROWS_AS(read_report_json("{"), Error);
  CHECK_THROWS_AS(read_report_json("{\"schema_version\": 99}"), Error);
  CHECK_THROWS_AS(read_report_json("{\"schema_version\": 1}"), Error);
}

TEST_CASE("method and clusterer names round trip") {
  for (Method m : {Method::kTwoStageMilp, Method::kTwoStageBfDc, Method::kTwoStageBfAc, Method::kRecursiveDc,
                   Method::kRecursiveAc}) {
    CHECK(parse_method(to_string(m)) == m);
  }
  for (Clusterer c : {Clusterer::kFastgreedy, Clusterer::kSpectralLN, Clusterer::kSpectralBN}) {
    CHECK(parse_clusterer(to_string(c)) == c);
  }
  CHECK_FALSE(parse_method("milp").has_value());
  CHECK(engine_of(Method::kRecursiveAc) == Engine::kAC);
  CHECK(engine_of(Method::kTwoStageMilp) == Engine::kDC);
}

}  // TEST_SUITE
