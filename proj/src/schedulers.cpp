#include "tasched/schedulers.hpp"

#include <limits>
#include <stdexcept>

namespace tasched {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Hfcfs: return "hfcfs";
    case PolicyKind::Hbfs: return "hbfs";
    case PolicyKind::Dde: return "dde";
  }
  return "?";
}

PolicyKind parse_policy_kind(std::string_view name) {
  if (name == "hfcfs") return PolicyKind::Hfcfs;
  if (name == "hbfs") return PolicyKind::Hbfs;
  if (name == "dde") return PolicyKind::Dde;
  throw std::invalid_argument("unknown policy '" + std::string(name) + "' (hfcfs | hbfs | dde)");
}

std::string SchedulerPolicy::name() const { return std::string(to_string(kind_)); }

PriorityKey SchedulerPolicy::priority(TaskId t, Ticks ready_since) const {
  switch (kind_) {
    case PolicyKind::Hfcfs:
      // Not-yet-eligible tasks sort after every eligible one.
      return {ready_since < 0 ? std::numeric_limits<Ticks>::max() : ready_since, t};
    case PolicyKind::Hbfs:
      return {depth_[t], t};
    case PolicyKind::Dde:
      return {static_cast<Ticks>(position_[t]), t};
  }
  return {0, t};
}

namespace {

std::vector<std::vector<int>> all_eligible(const TaskSystem& system) {
  std::vector<std::vector<int>> out(system.task_count());
  for (TaskId t = 0; t < system.task_count(); ++t) {
    for (const auto& o : system.options(t)) out[t].push_back(o.type);
  }
  return out;
}

}  // namespace

SchedulerPolicy hfcfs_policy(const TaskSystem& system) {
  SchedulerPolicy p;
  p.kind_ = PolicyKind::Hfcfs;
  p.eligible_ = all_eligible(system);
  return p;
}

SchedulerPolicy hbfs_policy(const TaskSystem& system) {
  SchedulerPolicy p;
  p.kind_ = PolicyKind::Hbfs;
  p.eligible_ = all_eligible(system);
  p.depth_.resize(system.task_count());
  for (TaskId t = 0; t < system.task_count(); ++t) p.depth_[t] = system.depth(t);
  return p;
}

SchedulerPolicy dde_policy(const TaskSystem& system, const ExecutionConstraint& constraint) {
  const auto report = validate_constraint(system.dag(), constraint);
  if (!report.ok()) {
    std::string msg = "invalid execution constraint:";
    for (const auto& p : report.problems) msg += "\n  " + p;
    throw std::invalid_argument(msg);
  }
  SchedulerPolicy p;
  p.kind_ = PolicyKind::Dde;
  p.order_ = constraint.order;
  p.position_.resize(system.task_count());
  for (std::size_t i = 0; i < constraint.order.size(); ++i) p.position_[constraint.order[i]] = i;
  p.eligible_ = all_eligible(system);
  for (const auto& [task, type] : constraint.alloc) {
    if (system.is_virtual(task)) continue;
    const auto index = system.catalog().index_of(type);
    if (!index) {
      throw std::invalid_argument("constraint allocates task " + std::to_string(task) +
                                  " to type " + type.key() + " missing from the catalog");
    }
    p.eligible_[task] = {*index};
  }
  p.constraint_ = std::make_shared<const ExecutionConstraint>(constraint);
  return p;
}

}  // namespace tasched
