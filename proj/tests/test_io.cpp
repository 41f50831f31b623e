#include "doctest.h"
#include "support.hpp"

#include "tasched/io.hpp"

using namespace tasched;
using namespace tasched::testing;

TEST_CASE("dag json round trip") {
  const MultiTypedDag d({make_node(0, {{"CPU.0", 3, 7}}), make_node(1, {{"CPU.0", 1, 2}, {"GPU.1", 0, 4}}),
                         virtual_node(2, {"CPU.0", "GPU.1"})},
                        {{0, 1}, {1, 2}});
  CHECK(io::parse_dag(io::dag_to_json(d)) == d);
}

TEST_CASE("dag json format") {
  const std::string text =
      R"({"nodes":[{"id":1,"eligible":[{"arch":"GPU","type":0}],"intervals":{"GPU.0":[1,2]}},
                   {"id":0,"eligible":[{"arch":"CPU","type":0}],"intervals":{"CPU.0":[3,7]}}],
          "edges":[[0,1]]})";
  const auto d = io::parse_dag(text);
  CHECK(d.size() == 2);
  CHECK(d.node(0).intervals.at(ProcTypeId::parse("CPU.0")) == ExecInterval{3, 7});
  CHECK(d.edges().size() == 1);
}

TEST_CASE("tick scale") {
  const std::string text = R"({"nodes":[{"id":0,"eligible":["CPU.0"],"intervals":{"CPU.0":[1.5,20.5]}}]})";
  CHECK_THROWS_AS(io::parse_dag(text, "f.json"), io::ParseError);
  const auto d = io::parse_dag(text, "f.json", 2);
  CHECK(d.node(0).intervals.at(ProcTypeId::parse("CPU.0")) == ExecInterval{3, 41});
}

TEST_CASE("parse errors carry context") {
  try {
    io::parse_dag("{\n  \"nodes\": [\n    {\"id\": 0,,}\n  ]\n}", "bad.json");
    FAIL("expected a parse error");
  } catch (const io::ParseError& e) {
    CHECK(std::string(e.what()).rfind("bad.json:3:", 0) == 0);
  }
  try {
    io::parse_dag(R"({"nodes":[{"id":0,"eligible":[]}]})", "x.json");
    FAIL("expected a parse error");
  } catch (const io::ParseError& e) {
    CHECK(std::string(e.what()).find("/nodes/0") != std::string::npos);
    CHECK(std::string(e.what()).find("intervals") != std::string::npos);
  }
  CHECK_THROWS_AS(io::parse_dag(R"({"nodes":[{"id":3,"eligible":[],"intervals":{}}]})"), io::ParseError);
  CHECK_THROWS_AS(io::parse_dag(R"({"nodes":[],"edges":[[0,1]]})"), io::ParseError);
  CHECK_THROWS_AS(io::load_dag("/nonexistent/dag.json"), io::ParseError);
}

TEST_CASE("catalog and constraint round trip") {
  const auto cat = catalog({{"CPU.0", 2}, {"GPU.1", 1}});
  CHECK(io::parse_catalog(io::catalog_to_json(cat)) == cat);
  CHECK_THROWS_AS(io::parse_catalog(R"({"CPU.0":0})"), io::ParseError);
  CHECK_THROWS_AS(io::parse_catalog(R"({"CPU":1})"), io::ParseError);
  const auto c = io::parse_constraint(R"({"order":[0,1,3,2],"alloc":{"0":"CPU.0","1":"GPU.1"}})");
  CHECK(c.order == std::vector<TaskId>{0, 1, 3, 2});
  CHECK(c.alloc.at(1).key() == "GPU.1");
  const auto again = io::parse_constraint(io::constraint_to_json(c));
  CHECK(again.order == c.order);
  CHECK(again.alloc == c.alloc);
  CHECK_THROWS_AS(io::parse_constraint(R"({"order":[0],"alloc":{"x":"CPU.0"}})"), io::ParseError);
}

TEST_CASE("assignment") {
  const auto a = io::parse_assignment(R"({"durations":{"3":5}})", 4);
  REQUIRE(a.durations.size() == 4);
  CHECK(!a.durations[0]);
  CHECK(*a.durations[3] == 5);
  CHECK_THROWS_AS(io::parse_assignment(R"({"durations":{"9":5}})", 4), io::ParseError);
}

TEST_CASE("trace csv") {
  ScheduleTrace tr;
  tr.entries.resize(2);
  tr.entries[0] = {0, 0, std::nullopt, 0, true};
  tr.entries[1] = {0, 4, InstanceId{ProcTypeId::parse("GPU.1"), 2}, 4, false};
  CHECK(io::trace_to_csv(tr) ==
        "task_id,start_tick,finish_tick,arch,type_index,instance_index,alloc_es_time\n"
        "0,0,0,,,,0\n"
        "1,0,4,GPU,1,2,4\n");
}

TEST_CASE("metrics csv round trip") {
  io::MetricsRow r;
  r.dag_id = "dag_0001";
  r.policy = "dde";
  r.constraint_source = "hacpa";
  r.seed = 17;
  r.metrics.n_runs = 4;
  r.metrics.wcrt = 10;
  r.metrics.mswcrt = 10;
  r.metrics.msbcrt = 6;
  r.metrics.avrt = Rational(33, 4);
  r.metrics.jitter = Rational(2, 5);
  const auto text = io::metrics_to_csv({r});
  CHECK(text.rfind(std::string(io::kMetricsHeader) + "\n", 0) == 0);
  CHECK(text.find("dag_0001,dde,hacpa,4,17,10,10,6,8.250000,0.400000,false") != std::string::npos);
  const auto back = io::parse_metrics_csv(text);
  REQUIRE(back.size() == 1);
  CHECK(back[0].metrics.avrt == Rational(33, 4));
  CHECK(back[0].metrics.jitter == Rational(2, 5));
  CHECK_THROWS_AS(io::parse_metrics_csv("a,b\n1,2\n", "m.csv"), io::ParseError);
  CHECK_THROWS_AS(io::parse_metrics_csv(text + "x,dde,hacpa,4,17,10,10,6,abc,0.4,false\n", "m.csv"),
                  io::ParseError);
}

TEST_CASE("manifest csv round trip") {
  const std::vector<io::ManifestRow> rows{{"dag_0000", 5, 12, 0.3, 2}};
  const auto back = io::parse_manifest_csv(io::manifest_to_csv(rows));
  REQUIRE(back.size() == 1);
  CHECK(back[0].dag_id == "dag_0000");
  CHECK(back[0].n_nodes == 12);
  CHECK(back[0].p == doctest::Approx(0.3));
}

TEST_CASE("decimal parsing and formatting") {
  CHECK(io::parse_decimal("-12.0625") == Rational(-193, 16));
  CHECK(io::parse_decimal("7") == 7);
  CHECK_THROWS_AS(io::parse_decimal("1e3"), std::invalid_argument);
  CHECK(format_decimal(Rational(2, 3)) == "0.666667");
  CHECK(format_decimal(Rational(-1, 8), 2) == "-0.13");
  CHECK(format_decimal(Rational(5), 0) == "5");
}
