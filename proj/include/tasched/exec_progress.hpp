#pragma once

#include "tasched/constraint_gen.hpp"
#include "tasched/dag_model.hpp"
#include "tasched/schedulers.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tasched {

// ---------------------------------------------------------------------------
// Task and system progress
// ---------------------------------------------------------------------------

enum class StageKind : std::uint8_t { Block = 0, Ready = 1, Exec = 2, Finish = 3 };

std::string_view to_string(StageKind stage);

/// Dense (type index, instance index) of a unit; both -1 when unset.
struct UnitRef {
  int type = -1;
  int index = -1;

  bool operator==(const UnitRef&) const = default;
};

struct TaskProgress {
  StageKind stage = StageKind::Block;
  UnitRef unit;  // set while (and after) executing
  Ticks tick = 0;  // remaining time in the current stage
  std::optional<Ticks> alloc_es_time;  // duration drawn on entering Exec

  bool operator==(const TaskProgress&) const = default;
};

/// Mapping task -> progress after `elapsed` applications of upd.
/// `ready_since` is per-run scheduling scratch (the HFCFS first-eligible
/// cycle, -1 when unset); it is not part of the progress order.
struct SystemState {
  std::vector<TaskProgress> progress;
  Ticks elapsed = 0;
  std::vector<Ticks> ready_since;
};

/// Source Ready, every other task Block.
SystemState initial_state(const TaskSystem& system);

enum class ProgressOrder { Less, Equal, Greater };
enum class StateOrder { LessOrEqual, Equal, GreaterOrEqual, Incomparable };

std::string_view to_string(StateOrder order);

/// Total order on task progress: earlier stage is less; within a stage more
/// remaining time is less. Exec units are ignored.
ProgressOrder cmp_progress(const TaskProgress& a, const TaskProgress& b);

/// Product order over tasks. Throws std::invalid_argument on mismatched
/// task sets.
StateOrder cmp_state(const SystemState& a, const SystemState& b);

// ---------------------------------------------------------------------------
// Handoff semantics
// ---------------------------------------------------------------------------

/// How a cycle's decisions see tasks that are about to finish.
///
/// Lookahead (default): decisions made on state n take effect at instant
///   n + 1. A predecessor in Exec with tick <= 1 counts as finished, a unit
///   whose occupant has tick <= 1 counts as free, and a task entering Exec
///   gets tick = duration.
/// PresentTense: decisions take effect at instant n. Only Finish (or a
///   zero-remaining Exec) counts as finished, every occupant with tick > 0
///   holds its unit, and entering Exec gets tick = max(duration - 1, 0).
///
/// Both produce identical schedules (start = decision instant, finish =
/// start + duration); they differ only in how ticks are displayed.
enum class Handoff { Lookahead, PresentTense };

// ---------------------------------------------------------------------------
// Execution-time sources
// ---------------------------------------------------------------------------

struct AllWcet {};
struct AllBcet {};
/// Explicit per-task durations; tasks absent from the map run their WCET.
struct FixedDurations {
  std::vector<std::optional<Ticks>> durations;  // indexed by TaskId
};
/// Uniform integer in [BCET, WCET] of the dispatched type, keyed by (seed, task).
struct SeededUniform {
  std::uint64_t seed = 0;
};
/// duration = bcet + floor((wcet - bcet) * level[t] / denominator).
struct GridPoint {
  std::vector<int> level;  // indexed by TaskId
  int denominator = 1;
};

class TimeSource {
 public:
  using Variant = std::variant<AllWcet, AllBcet, FixedDurations, SeededUniform, GridPoint>;

  TimeSource() : v_(AllWcet{}) {}
  TimeSource(Variant v) : v_(std::move(v)) {}  // NOLINT(google-explicit-constructor)

  static TimeSource all_wcet() { return TimeSource(AllWcet{}); }
  static TimeSource all_bcet() { return TimeSource(AllBcet{}); }
  static TimeSource seeded(std::uint64_t seed) { return TimeSource(SeededUniform{seed}); }

  /// Duration of `task` dispatched with `option`. Throws std::runtime_error
  /// when the value falls outside [bcet, wcet] of that option.
  Ticks duration(TaskId task, const TypeOption& option) const;

  const Variant& variant() const { return v_; }

 private:
  Variant v_;
};

// ---------------------------------------------------------------------------
// Transition function
// ---------------------------------------------------------------------------

/// True iff every predecessor of `t` is finished as seen by this cycle's
/// decisions (see Handoff). Zero-time virtual predecessors that complete in
/// this same cycle count as finished.
bool dep_comp(const SystemState& c, TaskId t, const TaskSystem& system,
              Handoff handoff = Handoff::Lookahead);

/// Resource availability inequality for a dispatch-eligible task: some type
/// r it may use has more instances than higher-priority dispatch-eligible
/// contenders for r plus tasks still holding an r unit in the next state.
bool res_able(const SystemState& c, TaskId t, const SchedulerPolicy& policy, const TaskSystem& system,
              Handoff handoff = Handoff::Lookahead);

/// Whether `t` changes stage in the next cycle.
bool tran(const SystemState& c, TaskId t, const SchedulerPolicy& policy, const TaskSystem& system,
          Handoff handoff = Handoff::Lookahead);

/// One scheduling cycle. Throws std::runtime_error when the time source
/// yields a duration outside the dispatched type's interval.
SystemState upd(const SystemState& c, const SchedulerPolicy& policy, const TaskSystem& system,
                const TimeSource& time_source, Handoff handoff = Handoff::Lookahead);

/// Capacity and tick invariants of a single state; std::nullopt when valid.
std::optional<std::string> check_state(const SystemState& c, const TaskSystem& system,
                                       Handoff handoff = Handoff::Lookahead);

/// Forward progress from `before` to `after` = upd(before): nothing
/// regresses and, unless every task is finished, something advances.
std::optional<std::string> check_forward_progress(const SystemState& before, const SystemState& after);

// ---------------------------------------------------------------------------
// Whole runs
// ---------------------------------------------------------------------------

struct RunOptions {
  Ticks tick_limit = 100'000'000;
  Handoff handoff = Handoff::Lookahead;
  /// Collapse runs of pure countdown cycles into one jump. Observable
  /// schedules are identical either way.
  bool fast_forward = true;
  /// Assert check_state and check_forward_progress after every cycle.
  bool check_invariants = false;
};

struct RunResult {
  ScheduleTrace trace;
  Ticks response_time = 0;
  Ticks cycles = 0;
};

/// Thrown when a run exceeds its tick limit or stops making progress.
class LivelockError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by checked runs when a model invariant fails.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Reusable per-(system, policy) simulator. Holds scratch buffers only, so
/// one instance per worker thread.
class Simulator {
 public:
  Simulator(const TaskSystem& system, const SchedulerPolicy& policy,
            Handoff handoff = Handoff::Lookahead);

  /// Applies upd in place; returns whether any task changed stage.
  bool step(SystemState& c, const TimeSource& time_source);

  /// After a step without stage changes, skips the following cycles that
  /// would only count down Exec ticks. Returns the number of cycles skipped.
  Ticks fast_forward(SystemState& c) const;

  /// Runs from the initial state until every task is finished.
  RunResult run(const TimeSource& time_source, const RunOptions& options = {});

  /// Response time only (no trace materialization); the hot path for campaigns.
  Ticks response_time(const TimeSource& time_source, const RunOptions& options = {});

  /// Start/finish instants recorded by the last step() sequence.
  Ticks start_of(TaskId t) const { return start_[t]; }
  Ticks finish_of(TaskId t) const { return finish_[t]; }

  // Per-cycle analysis exposed for the standalone predicate functions.
  struct Analysis {
    std::vector<char> done;               // finished as seen by this cycle
    std::vector<char> bypass;             // virtual, completes this cycle
    std::vector<char> candidate;          // Block/Ready real task with deps complete
    std::vector<char> dispatch_eligible;  // candidate with open start gate
    std::vector<char> res_able;           // inequality holds (eligible tasks only)
    std::vector<UnitRef> grant;           // unit granted this cycle, if any
    std::vector<int> still_use;           // per type
    std::vector<TaskId> order;            // candidates in priority order
  };
  const Analysis& analyze(const SystemState& c);

  const TaskSystem& system() const { return system_; }
  const SchedulerPolicy& policy() const { return policy_; }
  Handoff handoff() const { return handoff_; }

 private:
  void reset_records();
  ScheduleTrace materialize_trace(const SystemState& c) const;
  std::pair<Ticks, Ticks> execute(SystemState& c, const TimeSource& ts, const RunOptions& options);

  const TaskSystem& system_;
  const SchedulerPolicy& policy_;
  Handoff handoff_;
  Ticks release_;

  Analysis a_;
  std::vector<int> contenders_;
  std::vector<std::vector<char>> busy_;  // per type, per instance
  std::vector<char> started_;
  std::vector<Ticks> start_;
  std::vector<Ticks> finish_;
};

/// One simulated run from the initial state. response_time is
/// finish(sink) - start(source).
RunResult run_to_completion(const TaskSystem& system, const SchedulerPolicy& policy,
                            const TimeSource& time_source, const RunOptions& options = {});

}  // namespace tasched
