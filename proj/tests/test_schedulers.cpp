#include "doctest.h"
#include "support.hpp"

#include "tasched/exec_progress.hpp"
#include "tasched/schedulers.hpp"

using namespace tasched;
using namespace tasched::testing;

namespace {

// v0 -> {1, 2, 3} -> 4 -> v5, with 3 also feeding 4 directly.
MultiTypedDag fan() {
  return MultiTypedDag({virtual_node(0, {"CPU.0", "GPU.0"}), make_node(1, {{"CPU.0", 9, 9}, {"GPU.0", 4, 4}}),
                        make_node(2, {{"CPU.0", 2, 2}}), make_node(3, {{"CPU.0", 3, 3}}),
                        make_node(4, {{"CPU.0", 1, 1}}), virtual_node(5, {"CPU.0", "GPU.0"})},
                       {{0, 1}, {0, 2}, {0, 3}, {1, 4}, {2, 4}, {3, 4}, {4, 5}});
}

}  // namespace

TEST_CASE("policy names parse") {
  CHECK(parse_policy_kind("hfcfs") == PolicyKind::Hfcfs);
  CHECK(parse_policy_kind("dde") == PolicyKind::Dde);
  CHECK(to_string(PolicyKind::Hbfs) == "hbfs");
  CHECK_THROWS_AS(parse_policy_kind("edf"), std::invalid_argument);
}

TEST_CASE("hfcfs priority") {
  const TaskSystem sys(fan(), catalog({{"CPU.0", 1}, {"GPU.0", 1}}));
  const auto p = hfcfs_policy(sys);
  CHECK(p.higher(4, 3, 2, 5));
  CHECK(p.higher(2, 3, 4, 3));
  CHECK(!p.higher(4, 3, 2, 3));
  CHECK(p.higher(4, 3, 1, -1));
}

TEST_CASE("hbfs priority") {
  const MultiTypedDag d({make_node(0, {{"CPU.0", 1, 1}}), make_node(1, {{"CPU.0", 1, 1}}),
                         make_node(2, {{"CPU.0", 1, 1}}), make_node(3, {{"CPU.0", 1, 1}}),
                         make_node(4, {{"CPU.0", 1, 1}})},
                        {{0, 1}, {0, 3}, {1, 2}, {2, 4}, {3, 4}});
  const TaskSystem sys(d, catalog({{"CPU.0", 1}}));
  const auto p = hbfs_policy(sys);
  CHECK(p.higher(1, 0, 2, 0));
  CHECK(p.higher(1, 0, 3, 0));
  CHECK(!p.higher(3, 0, 1, 0));
}

TEST_CASE("dispatch prefers the smaller wcet") {
  const TaskSystem sys(fan(), catalog({{"CPU.0", 1}, {"GPU.0", 1}}));
  const auto r = run_to_completion(sys, hfcfs_policy(sys), TimeSource::all_wcet());
  CHECK(r.trace.entries[1].instance->type.key() == "GPU.0");
  CHECK(r.trace.entries[1].start == 0);
}

TEST_CASE("dde enforces type and start order") {
  const TaskSystem sys(fan(), catalog({{"CPU.0", 1}, {"GPU.0", 1}}));
  ExecutionConstraint c;
  c.order = {0, 3, 1, 2, 4, 5};
  c.alloc = {{1, ProcTypeId::parse("CPU.0")}, {2, ProcTypeId::parse("CPU.0")},
             {3, ProcTypeId::parse("CPU.0")}, {4, ProcTypeId::parse("CPU.0")}};
  const auto p = dde_policy(sys, c);
  CHECK(p.eligible(1) == std::vector<int>{0});
  RunOptions o;
  o.check_invariants = true;
  const auto r = run_to_completion(sys, p, TimeSource::all_wcet(), o);
  const auto& e = r.trace.entries;
  CHECK(e[1].instance->type.key() == "CPU.0");
  CHECK(e[3].start == 0);
  CHECK(e[1].start == 3);
  CHECK(e[2].start == 12);
  CHECK(e[4].start == 14);
  CHECK(r.response_time == 15);
}

TEST_CASE("dde gate lets consecutive tasks start together") {
  const TaskSystem sys(fan(), catalog({{"CPU.0", 2}, {"GPU.0", 1}}));
  ExecutionConstraint c;
  c.order = {0, 2, 1, 3, 4, 5};
  c.alloc = {{1, ProcTypeId::parse("GPU.0")}, {2, ProcTypeId::parse("CPU.0")},
             {3, ProcTypeId::parse("CPU.0")}, {4, ProcTypeId::parse("CPU.0")}};
  const auto r = run_to_completion(sys, dde_policy(sys, c), TimeSource::all_wcet());
  CHECK(r.trace.entries[2].start == 0);
  CHECK(r.trace.entries[1].start == 0);
  CHECK(r.trace.entries[3].start == 0);
  CHECK(r.trace.entries[2].instance->index != r.trace.entries[3].instance->index);
}

TEST_CASE("dde picks the free instance of the mandated type") {
  const MultiTypedDag d({virtual_node(0, {"CPU.0"}), make_node(1, {{"CPU.0", 5, 5}}),
                         make_node(2, {{"CPU.0", 1, 1}}), virtual_node(3, {"CPU.0"})},
                        {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  const TaskSystem sys(d, catalog({{"CPU.0", 2}}));
  ExecutionConstraint c;
  c.order = {0, 1, 2, 3};
  c.alloc = {{1, ProcTypeId::parse("CPU.0")}, {2, ProcTypeId::parse("CPU.0")}};
  const auto r = run_to_completion(sys, dde_policy(sys, c), TimeSource::all_wcet());
  CHECK(r.trace.entries[1].instance->index == 0);
  CHECK(r.trace.entries[2].instance->index == 1);
  CHECK(r.trace.entries[2].start == 0);
}

TEST_CASE("dde single task dispatches immediately") {
  const TaskSystem sys(MultiTypedDag({make_node(0, {{"CPU.0", 4, 4}, {"GPU.0", 2, 2}})}, {}),
                       catalog({{"CPU.0", 1}, {"GPU.0", 1}}));
  ExecutionConstraint c;
  c.order = {0};
  c.alloc = {{0, ProcTypeId::parse("CPU.0")}};
  const auto r = run_to_completion(sys, dde_policy(sys, c), TimeSource::all_wcet());
  CHECK(r.trace.entries[0].start == 0);
  CHECK(r.response_time == 4);
}

TEST_CASE("dde rejects incomplete constraints") {
  const TaskSystem sys(fan(), catalog({{"CPU.0", 1}, {"GPU.0", 1}}));
  ExecutionConstraint c;
  c.order = {0, 1, 2, 3, 4};
  c.alloc = {{1, ProcTypeId::parse("CPU.0")}};
  CHECK_THROWS_AS(dde_policy(sys, c), std::invalid_argument);
}
