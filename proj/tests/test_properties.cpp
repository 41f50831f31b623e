#include "doctest.h"
#include "random_systems.hpp"

#include "tasched/analysis.hpp"
#include "tasched/constraint_gen.hpp"
#include "tasched/dag_gen.hpp"
#include "tasched/exec_progress.hpp"

#include <algorithm>

using namespace tasched;
using namespace tasched::testing;

namespace {

struct Case {
  TaskSystem system;
  std::uint64_t seed;
};

Case make_case(std::uint64_t seed, const RandomShape& shape = {}) {
  rng::Stream s(seed, "property-case", 0);
  const auto cat = random_catalog(s);
  return {TaskSystem(random_dag(s, cat, shape), cat), seed};
}

std::vector<SchedulerPolicy> all_policies(const TaskSystem& sys) {
  std::vector<SchedulerPolicy> out{hfcfs_policy(sys), hbfs_policy(sys)};
  out.push_back(dde_policy(sys, hacpa_schedule(sys.dag(), sys.catalog()).constraint));
  out.push_back(dde_policy(sys, extract_constraint(wcrt_all_wcets(sys, out[0]).trace, sys.dag())));
  out.push_back(dde_policy(sys, extract_constraint(wcrt_all_wcets(sys, out[1]).trace, sys.dag())));
  return out;
}

bool same_schedule(const ScheduleTrace& a, const ScheduleTrace& b) {
  if (a.entries.size() != b.entries.size()) return false;
  for (std::size_t t = 0; t < a.entries.size(); ++t) {
    const auto& x = a.entries[t];
    const auto& y = b.entries[t];
    if (x.start != y.start || x.finish != y.finish || x.instance != y.instance || x.alloc_es_time != y.alloc_es_time) {
      return false;
    }
  }
  return true;
}

constexpr int kCases = 300;

}  // namespace

TEST_CASE("forward progress and capacity hold on every cycle") {
  for (std::uint64_t seed = 0; seed < kCases; ++seed) {
    RandomShape shape;
    shape.zero_time_per_mille = seed % 3 == 0 ? 150 : 0;
    const auto c = make_case(seed, shape);
    for (const auto& pol : all_policies(c.system)) {
      for (auto mode : {Handoff::Lookahead, Handoff::PresentTense}) {
        RunOptions o;
        o.handoff = mode;
        o.fast_forward = false;
        o.check_invariants = true;
        for (std::uint64_t k = 0; k < 3; ++k) {
          CHECK_NOTHROW(run_to_completion(c.system, pol, TimeSource::seeded(seed * 7 + k), o));
        }
        CHECK_NOTHROW(run_to_completion(c.system, pol, TimeSource::all_bcet(), o));
      }
    }
  }
}

TEST_CASE("handoff modes and fast-forward give identical schedules") {
  for (std::uint64_t seed = 0; seed < kCases; ++seed) {
    const auto c = make_case(seed);
    for (const auto& pol : all_policies(c.system)) {
      const auto ts = TimeSource::seeded(seed);
      RunOptions base;
      base.fast_forward = false;
      const auto ref = run_to_completion(c.system, pol, ts, base);
      RunOptions ff;
      const auto fast = run_to_completion(c.system, pol, ts, ff);
      RunOptions present;
      present.handoff = Handoff::PresentTense;
      const auto pt = run_to_completion(c.system, pol, ts, present);
      CHECK(same_schedule(ref.trace, fast.trace));
      CHECK(same_schedule(ref.trace, pt.trace));
      CHECK(ref.response_time == pt.response_time);
      Simulator sim(c.system, pol);
      CHECK(sim.response_time(ts) == ref.response_time);
    }
  }
}

TEST_CASE("traces are consistent with the dag and the units") {
  for (std::uint64_t seed = 0; seed < kCases; ++seed) {
    const auto c = make_case(seed);
    const auto& sys = c.system;
    for (const auto& pol : all_policies(sys)) {
      const auto r = run_to_completion(sys, pol, TimeSource::seeded(seed + 1));
      const auto& e = r.trace.entries;
      REQUIRE(r.trace.complete());
      for (const auto& [u, v] : sys.dag().edges()) CHECK(e[u].finish <= e[v].start);
      for (TaskId t = 0; t < e.size(); ++t) {
        CHECK(e[t].finish - e[t].start == e[t].alloc_es_time);
        if (sys.is_virtual(t)) continue;
        const auto type = sys.catalog().index_of(e[t].instance->type);
        REQUIRE(type);
        const auto* opt = sys.option_for(t, *type);
        REQUIRE(opt);
        CHECK(e[t].alloc_es_time >= opt->bcet);
        CHECK(e[t].alloc_es_time <= opt->wcet);
        // No two tasks overlap on a unit (zero-length runs excepted).
        for (TaskId u = t + 1; u < e.size(); ++u) {
          if (sys.is_virtual(u) || e[u].instance != e[t].instance) continue;
          if (e[t].alloc_es_time == 0 || e[u].alloc_es_time == 0) continue;
          CHECK((e[t].finish <= e[u].start || e[u].finish <= e[t].start));
        }
      }
      CHECK(r.response_time == e[sys.sink()].finish - e[sys.source()].start);
    }
  }
}

TEST_CASE("dde follows its start order and allocation") {
  for (std::uint64_t seed = 0; seed < kCases; ++seed) {
    const auto c = make_case(seed);
    const auto& sys = c.system;
    for (const auto& pol : all_policies(sys)) {
      if (pol.kind() != PolicyKind::Dde) continue;
      for (std::uint64_t k = 0; k < 3; ++k) {
        const auto r = run_to_completion(sys, pol, TimeSource::seeded(seed * 31 + k));
        const auto& order = pol.start_order();
        for (std::size_t i = 1; i < order.size(); ++i) {
          CHECK(r.trace.entries[order[i - 1]].start <= r.trace.entries[order[i]].start);
        }
        for (const auto& [t, type] : pol.constraint()->alloc) CHECK(r.trace.entries[t].instance->type == type);
      }
    }
  }
}

TEST_CASE("extracted constraints are legal and hacpa is realisable") {
  for (std::uint64_t seed = 0; seed < kCases; ++seed) {
    const auto c = make_case(seed);
    const auto& sys = c.system;
    for (const auto& pol : {hfcfs_policy(sys), hbfs_policy(sys)}) {
      const auto r = run_to_completion(sys, pol, TimeSource::seeded(seed));
      CHECK(validate_constraint(sys.dag(), extract_constraint(r.trace, sys.dag())).ok());
    }
    const auto h = hacpa_schedule(sys.dag(), sys.catalog());
    CHECK(validate_constraint(sys.dag(), h.constraint).ok());
    CHECK(wcrt_all_wcets(sys, dde_policy(sys, h.constraint)).wcrt == h.wcrt);
    const auto rank = hacpa_rank(sys.dag(), sys.catalog());
    for (const auto& [u, v] : sys.dag().edges()) {
      if (sys.is_virtual(u)) continue;
      bool positive = true;
      for (const auto& o : sys.options(u)) positive &= o.wcet > 0;
      if (positive) CHECK(rank[u] > rank[v]);
    }
  }
}

TEST_CASE("hacpa matches the dde all-wcets run on generated systems") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    GenParams g;
    g.seed = seed;
    g.n_max = 25;
    g.p = 0.1 * static_cast<double>(1 + seed % 5);
    const auto cat = resource_config(1 + static_cast<int>(seed % 3));
    const TaskSystem sys(generate_dag(g, cat), cat);
    const auto h = hacpa_schedule(sys.dag(), cat);
    CHECK(wcrt_all_wcets(sys, dde_policy(sys, h.constraint)).wcrt == h.wcrt);
  }
}

TEST_CASE("baselines are work conserving") {
  for (std::uint64_t seed = 0; seed < kCases; ++seed) {
    const auto c = make_case(seed);
    const auto& sys = c.system;
    for (const auto& pol : {hfcfs_policy(sys), hbfs_policy(sys)}) {
      Simulator sim(sys, pol);
      SystemState st = initial_state(sys);
      const auto ts = TimeSource::seeded(seed);
      for (int guard = 0; guard < 10000; ++guard) {
        if (std::all_of(st.progress.begin(), st.progress.end(),
                        [](const TaskProgress& p) { return p.stage == StageKind::Finish; })) {
          break;
        }
        const auto a = sim.analyze(st);
        for (TaskId t : a.order) {
          if (!a.dispatch_eligible[t]) continue;
          for (int r : pol.eligible(t)) {
            int higher = 0;
            for (TaskId u : a.order) {
              if (u == t) break;
              const auto& el = pol.eligible(u);
              higher += a.dispatch_eligible[u] && std::find(el.begin(), el.end(), r) != el.end();
            }
            if (higher == 0 && sys.instance_count(r) > a.still_use[r]) CHECK(a.grant[t].type >= 0);
          }
        }
        sim.step(st, ts);
      }
    }
  }
}

TEST_CASE("policy priority is a strict total order") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto c = make_case(seed);
    const auto& sys = c.system;
    rng::Stream s(seed, "priority-pairs", 0);
    for (const auto& pol : all_policies(sys)) {
      for (int k = 0; k < 50; ++k) {
        const auto n = static_cast<std::int64_t>(sys.task_count()) - 1;
        const TaskId a = static_cast<TaskId>(s.uniform(0, n));
        const TaskId b = static_cast<TaskId>(s.uniform(0, n));
        const Ticks ra = s.uniform(-1, 3);
        const Ticks rb = s.uniform(-1, 3);
        const bool ab = pol.higher(a, ra, b, rb);
        const bool ba = pol.higher(b, rb, a, ra);
        CHECK(!(ab && ba));
        if (a != b) CHECK((ab || ba));
        CHECK(!pol.higher(a, ra, a, ra));
      }
    }
  }
}

TEST_CASE("runs are deterministic") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto c = make_case(seed);
    for (const auto& pol : all_policies(c.system)) {
      const auto a = run_to_completion(c.system, pol, TimeSource::seeded(seed));
      const auto b = run_to_completion(c.system, pol, TimeSource::seeded(seed));
      CHECK(same_schedule(a.trace, b.trace));
    }
  }
}

namespace {

// Dominated pairs (lesser, greater) from DDE executions: lockstep states of
// the all-WCETs run against a shorter run, and earlier-vs-later states of
// one run.
struct PairSink {
  std::size_t pairs = 0;
  std::size_t dep_checks = 0;
  std::size_t stage_checks = 0;
};

void check_pair(const TaskSystem& sys, const SchedulerPolicy& pol, const SystemState& lo, const TimeSource& ts_lo,
                const SystemState& hi, const TimeSource& ts_hi, PairSink& sink) {
  const auto order = cmp_state(lo, hi);
  REQUIRE((order == StateOrder::LessOrEqual || order == StateOrder::Equal));
  ++sink.pairs;
  for (TaskId t = 0; t < sys.task_count(); ++t) {
    if (dep_comp(lo, t, sys)) {
      CHECK(dep_comp(hi, t, sys));
      ++sink.dep_checks;
    }
  }
  const auto next_lo = upd(lo, pol, sys, ts_lo);
  const auto next_hi = upd(hi, pol, sys, ts_hi);
  for (TaskId t = 0; t < sys.task_count(); ++t) {
    if (next_lo.progress[t].stage > lo.progress[t].stage) {
      CHECK(next_hi.progress[t].stage >= next_lo.progress[t].stage);
      ++sink.stage_checks;
    }
  }
}

}  // namespace

TEST_CASE("dependency and stage monotonicity on dominated pairs") {
  PairSink sink;
  const TimeSource wcet = TimeSource::all_wcet();
  for (std::uint64_t seed = 0; sink.pairs < 10000; ++seed) {
    const auto c = make_case(seed);
    const auto& sys = c.system;
    for (const auto& pol : all_policies(sys)) {
      if (pol.kind() != PolicyKind::Dde) continue;
      const TimeSource online = TimeSource::seeded(seed ^ 0x5eed);
      Simulator sw(sys, pol), sa(sys, pol);
      SystemState cw = initial_state(sys), ca = initial_state(sys);
      std::vector<SystemState> history{cw};
      for (int guard = 0; guard < 2000; ++guard) {
        check_pair(sys, pol, cw, wcet, ca, online, sink);
        const bool done = std::all_of(cw.progress.begin(), cw.progress.end(),
                                      [](const TaskProgress& p) { return p.stage == StageKind::Finish; });
        if (done) break;
        sw.step(cw, wcet);
        sa.step(ca, online);
        history.push_back(cw);
      }
      for (std::size_t i = 0; i + 3 < history.size(); i += 3) {
        check_pair(sys, pol, history[i], wcet, history[i + 3], wcet, sink);
      }
    }
  }
  MESSAGE("pairs ", sink.pairs, ", dependency checks ", sink.dep_checks, ", stage checks ", sink.stage_checks);
  CHECK(sink.pairs >= 10000);
  CHECK(sink.dep_checks > 0);
  CHECK(sink.stage_checks > 0);
}

TEST_CASE("dde dominance and oracle agreement on random systems") {
  OracleOptions o;
  o.grid = parse_oracle_grid("endpoints+mid");
  o.budget = 20000;
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    RandomShape shape;
    shape.max_tasks = 5;
    const auto c = make_case(seed, shape);
    const auto& sys = c.system;
    for (const auto& pol : all_policies(sys)) {
      if (pol.kind() != PolicyKind::Dde) continue;
      const Ticks wcrt = wcrt_all_wcets(sys, pol).wcrt;
      const auto r = exhaustive_oracle(sys, pol, o);
      CHECK(r.max_rt == wcrt);
      std::size_t violations = 0;
      for_each_grid_point(sys, pol, o, [&](int, std::uint64_t, const TimeSource& ts) {
        violations += !dominance_check(sys, pol, ts).dominated;
      });
      CHECK(violations == 0);
    }
  }
}
