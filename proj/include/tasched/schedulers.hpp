#pragma once

#include "tasched/constraint_gen.hpp"
#include "tasched/dag_model.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace tasched {

enum class PolicyKind { Hfcfs, Hbfs, Dde };

std::string_view to_string(PolicyKind kind);
/// Parses "hfcfs" | "hbfs" | "dde"; throws std::invalid_argument otherwise.
PolicyKind parse_policy_kind(std::string_view name);

/// Priority key: a smaller key means higher priority.
/// Every policy breaks the last tie by the smaller task id, so the key is a
/// strict total order over tasks for any fixed state.
struct PriorityKey {
  Ticks primary = 0;
  TaskId id = 0;

  auto operator<=>(const PriorityKey&) const = default;
};

/// A scheduling policy bound to one TaskSystem.
///
///  - priority: HFCFS orders by the cycle a task first became dispatch
///    eligible, HBFS by BFS depth, DDE by position in the start order.
///  - eligible types: baselines use every eligible type of the task; DDE
///    restricts each real task to its mandated type.
///  - dispatch: the fastest (smallest WCET, then smaller type index)
///    admissible type, lowest free instance index.
///  - start gate: DDE only; a task may start once every task ahead of it in
///    the order has started (same-cycle starts included).
class SchedulerPolicy {
 public:
  PolicyKind kind() const { return kind_; }
  std::string name() const;

  /// Dense type indices the task may run on, sorted ascending.
  const std::vector<int>& eligible(TaskId t) const { return eligible_[t]; }
  bool has_start_gate() const { return kind_ == PolicyKind::Dde; }
  /// DDE position of a task in the start order (only meaningful for DDE).
  std::size_t order_position(TaskId t) const { return position_[t]; }
  const std::vector<TaskId>& start_order() const { return order_; }

  /// `ready_since` is the HFCFS memo (cycle of first dispatch eligibility,
  /// or -1 when not yet eligible); other policies ignore it.
  PriorityKey priority(TaskId t, Ticks ready_since) const;

  /// True iff `a` has strictly higher priority than `b`.
  bool higher(TaskId a, Ticks ready_since_a, TaskId b, Ticks ready_since_b) const {
    return priority(a, ready_since_a) < priority(b, ready_since_b);
  }

  const ExecutionConstraint* constraint() const { return constraint_.get(); }

 private:
  friend SchedulerPolicy hfcfs_policy(const TaskSystem&);
  friend SchedulerPolicy hbfs_policy(const TaskSystem&);
  friend SchedulerPolicy dde_policy(const TaskSystem&, const ExecutionConstraint&);

  PolicyKind kind_ = PolicyKind::Hfcfs;
  std::vector<std::vector<int>> eligible_;
  std::vector<int> depth_;
  std::vector<std::size_t> position_;
  std::vector<TaskId> order_;
  std::shared_ptr<const ExecutionConstraint> constraint_;
};

/// Heterogeneous first-come-first-served.
SchedulerPolicy hfcfs_policy(const TaskSystem& system);
/// Heterogeneous breadth-first.
SchedulerPolicy hbfs_policy(const TaskSystem& system);
/// Deterministic dynamic execution under `constraint`. Throws
/// std::invalid_argument when validate_constraint reports problems or a
/// real task has no allocation.
SchedulerPolicy dde_policy(const TaskSystem& system, const ExecutionConstraint& constraint);

}  // namespace tasched
