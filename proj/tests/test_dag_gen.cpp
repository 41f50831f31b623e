#include "doctest.h"

#include "tasched/dag_gen.hpp"
#include "tasched/io.hpp"

using namespace tasched;

TEST_CASE("resource configurations") {
  CHECK(resource_config(1).total_instances() == 4);
  CHECK(resource_config(2).total_instances() == 8);
  CHECK(resource_config(3).total_instances() == 16);
  CHECK(resource_config(2).type_count() == 4);
  CHECK_THROWS_AS(resource_config(0), std::invalid_argument);
  CHECK_THROWS_AS(resource_config(4), std::invalid_argument);
}

TEST_CASE("parameter checks") {
  GenParams g;
  g.p = 1.0;
  CHECK_THROWS_AS(check_gen_params(g), std::invalid_argument);
  g.p = 0.2;
  g.wide_ratio = 1.5;
  CHECK_THROWS_AS(check_gen_params(g), std::invalid_argument);
  g.wide_ratio = 0.8;
  g.n_min = 5;
  g.n_max = 4;
  CHECK_THROWS_AS(check_gen_params(g), std::invalid_argument);
}

TEST_CASE("p = 0 leaves only virtual edges") {
  GenParams g;
  g.p = 0;
  g.n_min = g.n_max = 6;
  const auto cat = resource_config(1);
  const auto d = generate_dag(g, cat);
  REQUIRE(d.size() == 8);
  CHECK(d.edges().size() == 12);
  for (const auto& [u, v] : d.edges()) CHECK((d.node(u).is_virtual || d.node(v).is_virtual));
  // Every real node is both a source and a sink, so all are CPU-only.
  for (TaskId t = 0; t < 6; ++t) {
    for (const auto& type : d.node(t).eligible) CHECK(type.architecture == "CPU");
  }
}

TEST_CASE("seed determinism") {
  GenParams g;
  g.seed = 99;
  const auto cat = resource_config(2);
  CHECK(io::dag_to_json(generate_dag(g, cat)) == io::dag_to_json(generate_dag(g, cat)));
  GenParams h = g;
  h.seed = 100;
  CHECK(io::dag_to_json(generate_dag(g, cat)) != io::dag_to_json(generate_dag(h, cat)));
}

TEST_CASE("generated DAGs satisfy the model") {
  const auto cat = resource_config(2);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    GenParams g;
    g.seed = seed;
    g.p = 0.1 + 0.1 * static_cast<double>(seed % 5);
    g.subset_eligibility = seed % 2 == 1;
    const auto d = generate_dag(g, cat);
    CHECK(validate_dag(d, cat).ok());
    CHECK(d.source().has_value());
    CHECK(d.sink().has_value());
    std::size_t real = 0, wide = 0;
    for (const auto& n : d.nodes()) {
      if (n.is_virtual) continue;
      ++real;
      const bool endpoint = d.predecessors(n.id).empty() || d.successors(n.id).empty() ||
                            d.node(d.predecessors(n.id).front()).is_virtual ||
                            d.node(d.successors(n.id).front()).is_virtual;
      bool is_wide = false;
      for (const auto& [type, iv] : n.intervals) {
        CHECK(iv.bcet >= 1);
        CHECK(iv.bcet <= 1000);
        CHECK(iv.bcet <= iv.wcet);
        CHECK(iv.wcet <= 30 * iv.bcet);
        if (endpoint) CHECK(type.architecture == "CPU");
        is_wide |= 100 * iv.wcet >= 1000 * iv.bcet - 50;
      }
      wide += is_wide;
    }
    CHECK(real >= 10);
    CHECK(real <= 40);
    // Narrow nodes stay within 1.2x (plus rounding), so wide ones are counted exactly.
    CHECK(wide == static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(real))));
  }
}
