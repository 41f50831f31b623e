#include "tasched/constraint_gen.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>

namespace tasched {

bool ScheduleTrace::complete() const {
  return std::all_of(entries.begin(), entries.end(), [](const TraceEntry& e) {
    return e.recorded() && (e.is_virtual || e.instance.has_value());
  });
}

namespace {

// Kahn's algorithm where the ready task with the smallest key goes first.
template <typename Key>
std::vector<TaskId> keyed_topological_order(const MultiTypedDag& dag, Key key) {
  using Item = std::pair<decltype(key(TaskId{})), TaskId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> ready;
  std::vector<std::size_t> indegree(dag.size());
  for (TaskId t = 0; t < dag.size(); ++t) {
    indegree[t] = dag.predecessors(t).size();
    if (indegree[t] == 0) ready.emplace(key(t), t);
  }
  std::vector<TaskId> order;
  order.reserve(dag.size());
  while (!ready.empty()) {
    const TaskId t = ready.top().second;
    ready.pop();
    order.push_back(t);
    for (TaskId s : dag.successors(t)) {
      if (--indegree[s] == 0) ready.emplace(key(s), s);
    }
  }
  if (order.size() != dag.size()) throw std::invalid_argument("dag has a cycle");
  return order;
}

}  // namespace

ExecutionConstraint extract_constraint(const ScheduleTrace& trace, const MultiTypedDag& dag) {
  if (trace.entries.size() != dag.size()) {
    throw std::invalid_argument("extract_constraint: trace covers " + std::to_string(trace.entries.size()) +
                                " tasks, dag has " + std::to_string(dag.size()));
  }
  if (!trace.complete()) throw std::invalid_argument("extract_constraint: incomplete trace");

  ExecutionConstraint c;
  c.order = keyed_topological_order(dag, [&](TaskId t) { return trace.entries[t].start; });
  for (TaskId t = 0; t < trace.entries.size(); ++t) {
    const auto& e = trace.entries[t];
    if (!e.is_virtual) c.alloc[t] = e.instance->type;
  }
  return c;
}

std::vector<Rational> hacpa_rank(const MultiTypedDag& dag, const ProcCatalog& catalog) {
  (void)catalog;
  const auto topo = dag.topological_order();
  if (!topo) throw std::invalid_argument("hacpa_rank: dag has a cycle");
  std::vector<Rational> rank(dag.size());
  // Reverse topological order replaces the memoized recursion.
  for (auto it = topo->rbegin(); it != topo->rend(); ++it) {
    const TaskId t = *it;
    const auto& node = dag.node(t);
    Rational avg = 0;
    if (!node.eligible.empty()) {
      Ticks sum = 0;
      for (const auto& type : node.eligible) sum += node.intervals.at(type).wcet;
      avg = Rational(sum, static_cast<Ticks>(node.eligible.size()));
    }
    Rational best_succ = 0;
    for (TaskId s : dag.successors(t)) best_succ = std::max(best_succ, rank[s]);
    rank[t] = avg + best_succ;
  }
  return rank;
}

HacpaResult hacpa_schedule(const MultiTypedDag& dag, const ProcCatalog& catalog) {
  const auto report = validate_dag(dag, catalog);
  if (!report.ok()) throw std::invalid_argument("hacpa_schedule: " + report.problems.front());
  const auto rank = hacpa_rank(dag, catalog);

  // Descending rank, ties by smaller id, never ahead of an unscheduled
  // predecessor (zero-cost tasks can tie with their successors).
  const auto list = keyed_topological_order(dag, [&](TaskId t) { return std::pair<Rational, TaskId>(-rank[t], t); });

  std::map<ProcTypeId, std::vector<Ticks>> available;
  for (const auto& [type, n] : catalog.counts()) available[type].assign(n, 0);

  HacpaResult out;
  out.trace.entries.resize(dag.size());
  for (TaskId t : list) {
    const auto& node = dag.node(t);
    Ticks ready = 0;
    for (TaskId u : dag.predecessors(t)) ready = std::max(ready, out.trace.entries[u].finish);
    auto& e = out.trace.entries[t];
    e.is_virtual = node.is_virtual;
    if (node.is_virtual) {
      // Virtual tasks hold no unit.
      e.start = e.finish = ready;
      continue;
    }
    std::vector<ProcTypeId> types = node.eligible;
    std::sort(types.begin(), types.end());
    Ticks best_finish = std::numeric_limits<Ticks>::max();
    Ticks best_start = 0;
    std::optional<InstanceId> best;
    for (const auto& type : types) {
      const Ticks w = node.intervals.at(type).wcet;
      const auto& units = available.at(type);
      for (std::size_t i = 0; i < units.size(); ++i) {
        const Ticks s = std::max(units[i], ready);
        if (s + w < best_finish) {
          best_finish = s + w;
          best_start = s;
          best = InstanceId{type, static_cast<int>(i)};
        }
      }
    }
    e.start = best_start;
    e.finish = best_finish;
    e.instance = best;
    e.alloc_es_time = best_finish - best_start;
    available.at(best->type)[best->index] = best_finish;
  }
  for (const auto& e : out.trace.entries) out.wcrt = std::max(out.wcrt, e.finish);
  out.constraint = extract_constraint(out.trace, dag);
  return out;
}

ValidationReport validate_constraint(const MultiTypedDag& dag, const ExecutionConstraint& constraint) {
  ValidationReport report;
  std::vector<long> position(dag.size(), -1);
  for (std::size_t i = 0; i < constraint.order.size(); ++i) {
    const TaskId t = constraint.order[i];
    if (t >= dag.size()) {
      report.problems.push_back("order names unknown task " + std::to_string(t));
      continue;
    }
    if (position[t] >= 0) {
      report.problems.push_back("order lists task " + std::to_string(t) + " twice");
      continue;
    }
    position[t] = static_cast<long>(i);
  }
  for (TaskId t = 0; t < dag.size(); ++t) {
    if (position[t] < 0) report.problems.push_back("order is missing task " + std::to_string(t));
  }
  for (const auto& [u, v] : dag.edges()) {
    if (position[u] >= 0 && position[v] >= 0 && position[v] < position[u]) {
      report.problems.push_back("order violates dependency " + std::to_string(u) + " -> " +
                                std::to_string(v));
    }
  }
  for (const auto& [t, type] : constraint.alloc) {
    if (t >= dag.size()) {
      report.problems.push_back("alloc names unknown task " + std::to_string(t));
      continue;
    }
    const auto& eligible = dag.node(t).eligible;
    if (std::find(eligible.begin(), eligible.end(), type) == eligible.end()) {
      report.problems.push_back("illegal resource " + type.key() + " for task " + std::to_string(t));
    }
  }
  for (TaskId t = 0; t < dag.size(); ++t) {
    if (!dag.node(t).is_virtual && !constraint.alloc.count(t)) {
      report.problems.push_back("alloc is missing task " + std::to_string(t));
    }
  }
  return report;
}

}  // namespace tasched
