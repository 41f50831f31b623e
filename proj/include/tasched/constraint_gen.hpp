#pragma once

#include "tasched/dag_model.hpp"
#include "tasched/rational.hpp"

#include <map>
#include <optional>
#include <vector>

namespace tasched {

/// Start/finish/unit of one task in a schedule. Virtual tasks carry no instance.
struct TraceEntry {
  Ticks start = -1;
  Ticks finish = -1;
  std::optional<InstanceId> instance;
  Ticks alloc_es_time = 0;
  bool is_virtual = false;

  bool recorded() const { return start >= 0 && finish >= 0; }
  bool operator==(const TraceEntry&) const = default;
};

struct ScheduleTrace {
  std::vector<TraceEntry> entries;  // indexed by TaskId

  bool complete() const;
  bool operator==(const ScheduleTrace&) const = default;
};

/// Deterministic execution constraint: a legal total start order and, for
/// every real task, the processing-unit type it must run on. Virtual tasks
/// take no unit and may be omitted from `alloc`.
struct ExecutionConstraint {
  std::vector<TaskId> order;
  std::map<TaskId, ProcTypeId> alloc;

  bool operator==(const ExecutionConstraint&) const = default;
};

/// Orders tasks by (start, id), keeping every predecessor ahead of its
/// successors when zero-time tasks share a start tick. Allocation is the
/// type of the unit each task ran on. Throws std::invalid_argument when the
/// trace is incomplete.
ExecutionConstraint extract_constraint(const ScheduleTrace& trace, const MultiTypedDag& dag);

/// Critical-path rank: mean WCET over the task's eligible types plus the
/// largest successor rank. Exact rationals.
std::vector<Rational> hacpa_rank(const MultiTypedDag& dag, const ProcCatalog& catalog);

struct HacpaResult {
  ScheduleTrace trace;
  ExecutionConstraint constraint;
  Ticks wcrt = 0;
};

/// WCET-driven list schedule over individual unit instances in descending
/// rank order, then constraint extraction from the resulting trace.
HacpaResult hacpa_schedule(const MultiTypedDag& dag, const ProcCatalog& catalog);

ValidationReport validate_constraint(const MultiTypedDag& dag, const ExecutionConstraint& constraint);

}  // namespace tasched
