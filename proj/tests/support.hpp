#pragma once

#include "tasched/dag_model.hpp"

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace tasched::testing {

struct Opt {
  std::string type;
  Ticks bcet;
  Ticks wcet;
};

inline TaskNode make_node(TaskId id, std::initializer_list<Opt> opts, bool is_virtual = false) {
  TaskNode n;
  n.id = id;
  n.is_virtual = is_virtual;
  for (const auto& o : opts) {
    const auto type = ProcTypeId::parse(o.type);
    n.eligible.push_back(type);
    n.intervals[type] = ExecInterval{o.bcet, o.wcet};
  }
  return n;
}

inline TaskNode virtual_node(TaskId id, std::initializer_list<std::string> types) {
  TaskNode n;
  n.id = id;
  n.is_virtual = true;
  for (const auto& t : types) {
    const auto type = ProcTypeId::parse(t);
    n.eligible.push_back(type);
    n.intervals[type] = ExecInterval{0, 0};
  }
  return n;
}

inline ProcCatalog catalog(std::initializer_list<std::pair<std::string, int>> entries) {
  std::map<ProcTypeId, int> m;
  for (const auto& [k, v] : entries) m[ProcTypeId::parse(k)] = v;
  return ProcCatalog(std::move(m));
}

// Chain of single-type tasks on `type` with the given WCETs (bcet = wcet).
inline MultiTypedDag chain(const std::vector<Ticks>& wcets, const std::string& type = "CPU.0") {
  std::vector<TaskNode> nodes;
  std::vector<std::pair<TaskId, TaskId>> edges;
  for (TaskId i = 0; i < wcets.size(); ++i) {
    nodes.push_back(make_node(i, {{type, wcets[i], wcets[i]}}));
    if (i > 0) edges.emplace_back(i - 1, i);
  }
  return MultiTypedDag(std::move(nodes), std::move(edges));
}

}  // namespace tasched::testing
