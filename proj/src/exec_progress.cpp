#include "tasched/exec_progress.hpp"

#include "tasched/rng.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace tasched {

std::string_view to_string(StageKind stage) {
  switch (stage) {
    case StageKind::Block: return "Block";
    case StageKind::Ready: return "Ready";
    case StageKind::Exec: return "Exec";
    case StageKind::Finish: return "Finish";
  }
  return "?";
}

std::string_view to_string(StateOrder order) {
  switch (order) {
    case StateOrder::LessOrEqual: return "LessOrEqual";
    case StateOrder::Equal: return "Equal";
    case StateOrder::GreaterOrEqual: return "GreaterOrEqual";
    case StateOrder::Incomparable: return "Incomparable";
  }
  return "?";
}

SystemState initial_state(const TaskSystem& system) {
  SystemState c;
  c.progress.resize(system.task_count());
  c.ready_since.assign(system.task_count(), -1);
  c.progress[system.source()].stage = StageKind::Ready;
  return c;
}

ProgressOrder cmp_progress(const TaskProgress& a, const TaskProgress& b) {
  if (a.stage != b.stage) return a.stage < b.stage ? ProgressOrder::Less : ProgressOrder::Greater;
  if (a.tick == b.tick) return ProgressOrder::Equal;
  return a.tick > b.tick ? ProgressOrder::Less : ProgressOrder::Greater;
}

StateOrder cmp_state(const SystemState& a, const SystemState& b) {
  if (a.progress.size() != b.progress.size()) {
    throw std::invalid_argument("cmp_state: states cover different task sets");
  }
  bool less = false;
  bool greater = false;
  for (std::size_t t = 0; t < a.progress.size(); ++t) {
    switch (cmp_progress(a.progress[t], b.progress[t])) {
      case ProgressOrder::Less: less = true; break;
      case ProgressOrder::Greater: greater = true; break;
      case ProgressOrder::Equal: break;
    }
  }
  if (less && greater) return StateOrder::Incomparable;
  if (less) return StateOrder::LessOrEqual;
  if (greater) return StateOrder::GreaterOrEqual;
  return StateOrder::Equal;
}

// --- time sources ----------------------------------------------------------

Ticks TimeSource::duration(TaskId task, const TypeOption& option) const {
  const Ticks value = std::visit(
      [&](const auto& src) -> Ticks {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, AllWcet>) {
          return option.wcet;
        } else if constexpr (std::is_same_v<T, AllBcet>) {
          return option.bcet;
        } else if constexpr (std::is_same_v<T, FixedDurations>) {
          if (task < src.durations.size() && src.durations[task]) return *src.durations[task];
          return option.wcet;
        } else if constexpr (std::is_same_v<T, SeededUniform>) {
          rng::Stream stream(src.seed, "duration", task);
          return stream.uniform(option.bcet, option.wcet);
        } else {
          const int level = task < src.level.size() ? src.level[task] : src.denominator;
          return option.bcet + (option.wcet - option.bcet) * level / src.denominator;
        }
      },
      v_);
  if (value < option.bcet || value > option.wcet) {
    throw std::runtime_error("time source gave task " + std::to_string(task) + " duration " +
                             std::to_string(value) + " outside [" + std::to_string(option.bcet) +
                             ", " + std::to_string(option.wcet) + "] of its dispatched type");
  }
  return value;
}

// --- simulator -------------------------------------------------------------

Simulator::Simulator(const TaskSystem& system, const SchedulerPolicy& policy, Handoff handoff)
    : system_(system),
      policy_(policy),
      handoff_(handoff),
      release_(handoff == Handoff::Lookahead ? 1 : 0) {
  const std::size_t n = system.task_count();
  a_.done.resize(n);
  a_.bypass.resize(n);
  a_.candidate.resize(n);
  a_.dispatch_eligible.resize(n);
  a_.res_able.resize(n);
  a_.grant.resize(n);
  a_.still_use.resize(system.type_count());
  a_.order.reserve(n);
  contenders_.resize(system.type_count());
  busy_.resize(system.type_count());
  for (std::size_t r = 0; r < system.type_count(); ++r) {
    busy_[r].resize(system.instance_count(static_cast<int>(r)));
  }
  started_.resize(n);
  start_.assign(n, -1);
  finish_.assign(n, -1);
}

const Simulator::Analysis& Simulator::analyze(const SystemState& c) {
  const std::size_t n = system_.task_count();
  const auto& p = c.progress;

  std::fill(a_.still_use.begin(), a_.still_use.end(), 0);
  for (auto& b : busy_) std::fill(b.begin(), b.end(), 0);
  for (TaskId t = 0; t < n; ++t) {
    const auto& tp = p[t];
    const bool exec = tp.stage == StageKind::Exec;
    a_.done[t] = tp.stage == StageKind::Finish || (exec && tp.tick <= release_);
    a_.bypass[t] = 0;
    a_.candidate[t] = 0;
    a_.dispatch_eligible[t] = 0;
    a_.res_able[t] = 0;
    a_.grant[t] = UnitRef{};
    started_[t] = tp.stage >= StageKind::Exec;
    if (exec && tp.tick > release_) {
      ++a_.still_use[tp.unit.type];
      busy_[tp.unit.type][tp.unit.index] = 1;
    }
  }

  auto deps_done = [&](TaskId t) {
    for (TaskId u : system_.predecessors(t)) {
      if (!a_.done[u]) return false;
    }
    return true;
  };

  // Zero-time virtual tasks complete within the cycle; topological order
  // lets a chain of them collapse at once.
  for (TaskId t : system_.topological_order()) {
    if (!system_.is_virtual(t)) continue;
    const auto stage = p[t].stage;
    if ((stage == StageKind::Block || stage == StageKind::Ready) && deps_done(t)) {
      a_.bypass[t] = 1;
      a_.done[t] = 1;
      started_[t] = 1;
    }
  }

  a_.order.clear();
  for (TaskId t = 0; t < n; ++t) {
    if (system_.is_virtual(t)) continue;
    const auto stage = p[t].stage;
    if ((stage == StageKind::Block || stage == StageKind::Ready) && deps_done(t)) {
      a_.candidate[t] = 1;
      a_.order.push_back(t);
    }
  }
  auto since = [&](TaskId t) { return c.ready_since[t] >= 0 ? c.ready_since[t] : c.elapsed; };
  std::sort(a_.order.begin(), a_.order.end(), [&](TaskId x, TaskId y) {
    return policy_.priority(x, since(x)) < policy_.priority(y, since(y));
  });

  std::fill(contenders_.begin(), contenders_.end(), 0);
  std::size_t frontier = 0;
  const auto& start_order = policy_.start_order();
  auto advance_frontier = [&] {
    while (frontier < start_order.size() && started_[start_order[frontier]]) ++frontier;
  };
  if (policy_.has_start_gate()) advance_frontier();

  for (TaskId t : a_.order) {
    if (policy_.has_start_gate() && policy_.order_position(t) > frontier) continue;
    a_.dispatch_eligible[t] = 1;

    const auto& allowed = policy_.eligible(t);
    int best_type = -1;
    Ticks best_wcet = 0;
    for (int r : allowed) {
      if (system_.instance_count(r) > contenders_[r] + a_.still_use[r]) {
        const Ticks w = system_.option_for(t, r)->wcet;
        if (best_type < 0 || w < best_wcet) {
          best_type = r;
          best_wcet = w;
        }
      }
    }
    for (int r : allowed) ++contenders_[r];
    if (best_type < 0) continue;

    a_.res_able[t] = 1;
    auto& units = busy_[best_type];
    const auto free_it = std::find(units.begin(), units.end(), 0);
    if (free_it == units.end()) {
      throw std::logic_error("resource inequality held but no free unit of type " +
                             system_.type_id(best_type).key());
    }
    *free_it = 1;
    a_.grant[t] = UnitRef{best_type, static_cast<int>(free_it - units.begin())};
    if (policy_.has_start_gate()) {
      started_[t] = 1;
      advance_frontier();
    }
  }
  return a_;
}

bool Simulator::step(SystemState& c, const TimeSource& time_source) {
  const auto& a = analyze(c);
  const Ticks now = c.elapsed;
  const Ticks instant = now + release_;
  bool changed = false;

  for (TaskId t = 0; t < system_.task_count(); ++t) {
    auto& tp = c.progress[t];
    switch (tp.stage) {
      case StageKind::Exec:
        if (tp.tick <= 1) {
          tp.stage = StageKind::Finish;
          tp.tick = 0;
          changed = true;
        } else {
          --tp.tick;
        }
        break;
      case StageKind::Block:
      case StageKind::Ready:
        if (a.bypass[t]) {
          tp.stage = StageKind::Finish;
          tp.tick = 0;
          tp.alloc_es_time = 0;
          start_[t] = finish_[t] = instant;
          changed = true;
        } else if (a.candidate[t]) {
          if (c.ready_since[t] < 0) c.ready_since[t] = now;
          if (a.grant[t].type >= 0) {
            const TypeOption& option = *system_.option_for(t, a.grant[t].type);
            const Ticks d = time_source.duration(t, option);
            tp.stage = StageKind::Exec;
            tp.unit = a.grant[t];
            tp.alloc_es_time = d;
            tp.tick = handoff_ == Handoff::Lookahead ? d : std::max<Ticks>(d - 1, 0);
            start_[t] = instant;
            finish_[t] = instant + d;
            changed = true;
          } else if (tp.stage == StageKind::Block) {
            tp.stage = StageKind::Ready;
            changed = true;
          }
        }
        break;
      case StageKind::Finish:
        break;
    }
  }
  ++c.elapsed;
  return changed;
}

Ticks Simulator::fast_forward(SystemState& c) const {
  Ticks min_tick = std::numeric_limits<Ticks>::max();
  for (const auto& tp : c.progress) {
    if (tp.stage == StageKind::Exec) min_tick = std::min(min_tick, tp.tick);
  }
  if (min_tick == std::numeric_limits<Ticks>::max() || min_tick < 2) return 0;
  const Ticks skip = min_tick - 1;
  for (auto& tp : c.progress) {
    if (tp.stage == StageKind::Exec) tp.tick -= skip;
  }
  c.elapsed += skip;
  return skip;
}

void Simulator::reset_records() {
  std::fill(start_.begin(), start_.end(), -1);
  std::fill(finish_.begin(), finish_.end(), -1);
}

std::pair<Ticks, Ticks> Simulator::execute(SystemState& c, const TimeSource& ts,
                                           const RunOptions& options) {
  reset_records();
  const std::size_t n = system_.task_count();
  auto unfinished = [&] {
    std::size_t k = 0;
    for (const auto& tp : c.progress) k += tp.stage != StageKind::Finish;
    return k;
  };
  std::size_t remaining = unfinished();
  SystemState before;
  while (remaining > 0) {
    if (c.elapsed > options.tick_limit) {
      throw LivelockError("run exceeded tick limit " + std::to_string(options.tick_limit));
    }
    if (options.check_invariants) before = c;
    const bool changed = step(c, ts);
    if (options.check_invariants) {
      if (auto v = check_state(c, system_, handoff_)) throw InvariantViolation(*v);
      if (auto v = check_forward_progress(before, c)) throw InvariantViolation(*v);
    }
    if (changed) {
      remaining = unfinished();
    } else {
      bool any_exec = false;
      for (const auto& tp : c.progress) any_exec |= tp.stage == StageKind::Exec;
      if (!any_exec) {
        throw LivelockError("no task can advance at cycle " + std::to_string(c.elapsed) + " with " +
                            std::to_string(remaining) + " of " + std::to_string(n) +
                            " tasks unfinished");
      }
      if (options.fast_forward) fast_forward(c);
    }
  }
  return {start_[system_.source()], finish_[system_.sink()]};
}

ScheduleTrace Simulator::materialize_trace(const SystemState& c) const {
  // Times are reported relative to the source's start.
  const Ticks origin = start_[system_.source()];
  ScheduleTrace trace;
  trace.entries.resize(system_.task_count());
  for (TaskId t = 0; t < system_.task_count(); ++t) {
    auto& e = trace.entries[t];
    e.start = start_[t] - origin;
    e.finish = finish_[t] - origin;
    e.is_virtual = system_.is_virtual(t);
    e.alloc_es_time = c.progress[t].alloc_es_time.value_or(0);
    const auto& unit = c.progress[t].unit;
    if (!e.is_virtual && unit.type >= 0) e.instance = InstanceId{system_.type_id(unit.type), unit.index};
  }
  return trace;
}

RunResult Simulator::run(const TimeSource& time_source, const RunOptions& options) {
  SystemState c = initial_state(system_);
  const auto [src_start, sink_finish] = execute(c, time_source, options);
  RunResult result;
  result.trace = materialize_trace(c);
  result.response_time = sink_finish - src_start;
  result.cycles = c.elapsed;
  return result;
}

Ticks Simulator::response_time(const TimeSource& time_source, const RunOptions& options) {
  SystemState c = initial_state(system_);
  const auto [src_start, sink_finish] = execute(c, time_source, options);
  return sink_finish - src_start;
}

RunResult run_to_completion(const TaskSystem& system, const SchedulerPolicy& policy,
                            const TimeSource& time_source, const RunOptions& options) {
  Simulator sim(system, policy, options.handoff);
  return sim.run(time_source, options);
}

// --- standalone predicates -------------------------------------------------

bool dep_comp(const SystemState& c, TaskId t, const TaskSystem& system, Handoff handoff) {
  if (t >= system.task_count()) throw std::out_of_range("dep_comp: unknown task");
  // Policy-independent: use a throwaway baseline policy for the analysis.
  const auto policy = hfcfs_policy(system);
  Simulator sim(system, policy, handoff);
  const auto& a = sim.analyze(c);
  for (TaskId u : system.predecessors(t)) {
    if (!a.done[u]) return false;
  }
  return true;
}

bool res_able(const SystemState& c, TaskId t, const SchedulerPolicy& policy, const TaskSystem& system,
              Handoff handoff) {
  Simulator sim(system, policy, handoff);
  return sim.analyze(c).res_able.at(t) != 0;
}

bool tran(const SystemState& c, TaskId t, const SchedulerPolicy& policy, const TaskSystem& system,
          Handoff handoff) {
  const auto& tp = c.progress.at(t);
  if (tp.tick > 1) return false;
  switch (tp.stage) {
    case StageKind::Exec: return true;
    case StageKind::Finish: return true;  // absorbing: the transition is the identity
    case StageKind::Block:
    case StageKind::Ready: {
      Simulator sim(system, policy, handoff);
      const auto& a = sim.analyze(c);
      if (a.bypass[t]) return true;
      if (tp.stage == StageKind::Block) return a.candidate[t] != 0;
      return a.res_able[t] != 0;
    }
  }
  return false;
}

SystemState upd(const SystemState& c, const SchedulerPolicy& policy, const TaskSystem& system,
                const TimeSource& time_source, Handoff handoff) {
  Simulator sim(system, policy, handoff);
  SystemState next = c;
  sim.step(next, time_source);
  return next;
}

std::optional<std::string> check_state(const SystemState& c, const TaskSystem& system,
                                       Handoff handoff) {
  if (c.progress.size() != system.task_count()) return "state covers the wrong number of tasks";
  std::vector<std::vector<int>> occupancy(system.type_count());
  for (std::size_t r = 0; r < system.type_count(); ++r) {
    occupancy[r].assign(system.instance_count(static_cast<int>(r)), 0);
  }
  for (TaskId t = 0; t < c.progress.size(); ++t) {
    const auto& tp = c.progress[t];
    const std::string who = "task " + std::to_string(t);
    if (tp.stage != StageKind::Exec) {
      if (tp.tick != 0) return who + ": non-Exec stage with non-zero tick";
      continue;
    }
    if (!tp.alloc_es_time) return who + ": Exec without an allocated execution time";
    const Ticks bound = handoff == Handoff::Lookahead ? *tp.alloc_es_time : std::max<Ticks>(*tp.alloc_es_time - 1, 0);
    if (tp.tick > bound || tp.tick < 0) return who + ": tick outside [0, allocated time]";
    if (tp.unit.type < 0 || tp.unit.type >= static_cast<int>(system.type_count()) || tp.unit.index < 0 ||
        tp.unit.index >= system.instance_count(tp.unit.type)) {
      return who + ": executing on an unknown unit";
    }
    if (!system.option_for(t, tp.unit.type)) return who + ": executing on an ineligible type";
    if (++occupancy[tp.unit.type][tp.unit.index] > 1) {
      return "unit " + system.type_id(tp.unit.type).key() + "#" + std::to_string(tp.unit.index) +
             " holds more than one task";
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_forward_progress(const SystemState& before, const SystemState& after) {
  bool all_finished = true;
  bool advanced = false;
  for (std::size_t t = 0; t < before.progress.size(); ++t) {
    all_finished &= before.progress[t].stage == StageKind::Finish;
    switch (cmp_progress(before.progress[t], after.progress[t])) {
      case ProgressOrder::Greater:
        return "task " + std::to_string(t) + " regressed at cycle " + std::to_string(after.elapsed);
      case ProgressOrder::Less: advanced = true; break;
      case ProgressOrder::Equal: break;
    }
  }
  if (!all_finished && !advanced) {
    return "no task advanced at cycle " + std::to_string(after.elapsed);
  }
  return std::nullopt;
}

}  // namespace tasched
