#include "tasched/dag_model.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>

namespace tasched {

std::string ProcTypeId::key() const { return architecture + "." + std::to_string(type_index); }

ProcTypeId ProcTypeId::parse(std::string_view key) {
  const auto dot = key.rfind('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == key.size()) {
    throw std::invalid_argument("malformed processing-unit type key '" + std::string(key) +
                                "' (expected ARCH.INDEX)");
  }
  int index = 0;
  for (char c : key.substr(dot + 1)) {
    if (c < '0' || c > '9') {
      throw std::invalid_argument("malformed type index in '" + std::string(key) + "'");
    }
    index = index * 10 + (c - '0');
  }
  return {std::string(key.substr(0, dot)), index};
}

ProcCatalog::ProcCatalog(std::map<ProcTypeId, int> counts) : counts_(std::move(counts)) {
  types_.reserve(counts_.size());
  for (const auto& [type, n] : counts_) types_.push_back(type);
}

int ProcCatalog::count(const ProcTypeId& type) const {
  auto it = counts_.find(type);
  return it == counts_.end() ? 0 : it->second;
}

int ProcCatalog::total_instances() const {
  int total = 0;
  for (const auto& [type, n] : counts_) total += n;
  return total;
}

std::optional<int> ProcCatalog::index_of(const ProcTypeId& type) const {
  auto it = std::lower_bound(types_.begin(), types_.end(), type);
  if (it == types_.end() || *it != type) return std::nullopt;
  return static_cast<int>(it - types_.begin());
}

std::vector<std::string> ProcCatalog::problems() const {
  std::vector<std::string> out;
  if (counts_.empty()) out.emplace_back("catalog has no processing-unit types");
  for (const auto& [type, n] : counts_) {
    if (n < 1) out.push_back("catalog type " + type.key() + " has non-positive instance count");
  }
  return out;
}

MultiTypedDag::MultiTypedDag(std::vector<TaskNode> nodes,
                             std::vector<std::pair<TaskId, TaskId>> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  preds_.resize(nodes_.size());
  succs_.resize(nodes_.size());
  for (const auto& [u, v] : edges_) {
    if (u >= nodes_.size() || v >= nodes_.size()) {
      throw std::out_of_range("edge (" + std::to_string(u) + "," + std::to_string(v) +
                              ") references an unknown task");
    }
    succs_[u].push_back(v);
    preds_[v].push_back(u);
  }
}

std::vector<TaskId> MultiTypedDag::sources() const {
  std::vector<TaskId> out;
  for (TaskId t = 0; t < nodes_.size(); ++t) {
    if (preds_[t].empty()) out.push_back(t);
  }
  return out;
}

std::vector<TaskId> MultiTypedDag::sinks() const {
  std::vector<TaskId> out;
  for (TaskId t = 0; t < nodes_.size(); ++t) {
    if (succs_[t].empty()) out.push_back(t);
  }
  return out;
}

std::optional<TaskId> MultiTypedDag::source() const {
  auto s = sources();
  if (s.size() != 1) return std::nullopt;
  return s.front();
}

std::optional<TaskId> MultiTypedDag::sink() const {
  auto s = sinks();
  if (s.size() != 1) return std::nullopt;
  return s.front();
}

std::optional<std::vector<TaskId>> MultiTypedDag::topological_order() const {
  std::vector<std::size_t> indegree(nodes_.size());
  std::priority_queue<TaskId, std::vector<TaskId>, std::greater<>> ready;
  for (TaskId t = 0; t < nodes_.size(); ++t) {
    indegree[t] = preds_[t].size();
    if (indegree[t] == 0) ready.push(t);
  }
  std::vector<TaskId> order;
  order.reserve(nodes_.size());
  while (!ready.empty()) {
    TaskId t = ready.top();
    ready.pop();
    order.push_back(t);
    for (TaskId s : succs_[t]) {
      if (--indegree[s] == 0) ready.push(s);
    }
  }
  if (order.size() != nodes_.size()) return std::nullopt;
  return order;
}

bool ValidationReport::mentions(std::string_view needle) const {
  return std::any_of(problems.begin(), problems.end(),
                     [&](const std::string& p) { return p.find(needle) != std::string::npos; });
}

ValidationReport validate_dag(const MultiTypedDag& dag, const ProcCatalog& catalog) {
  ValidationReport report;
  for (auto& p : catalog.problems()) report.problems.push_back(std::move(p));
  if (dag.size() == 0) report.problems.emplace_back("dag has no tasks");

  for (std::size_t i = 0; i < dag.size(); ++i) {
    const TaskNode& n = dag.nodes()[i];
    const std::string who = "task " + std::to_string(i);
    if (n.id != i) {
      report.problems.push_back(who + ": id " + std::to_string(n.id) + " is not dense (expected " +
                                std::to_string(i) + ")");
    }
    if (n.eligible.empty()) report.problems.push_back(who + ": empty eligible set");
    std::set<ProcTypeId> seen;
    for (const auto& type : n.eligible) {
      if (!seen.insert(type).second) {
        report.problems.push_back(who + ": eligible type " + type.key() + " listed twice");
      }
      if (!catalog.contains(type)) {
        report.problems.push_back(who + ": eligible type " + type.key() + " absent from catalog");
      }
      if (!n.intervals.count(type)) {
        report.problems.push_back(who + ": no execution interval for eligible type " + type.key());
      }
    }
    for (const auto& [type, iv] : n.intervals) {
      if (!seen.count(type)) {
        report.problems.push_back(who + ": interval given for non-eligible type " + type.key());
      }
      if (iv.bcet < 0) report.problems.push_back(who + ": negative bcet on " + type.key());
      if (iv.bcet > iv.wcet) {
        report.problems.push_back(who + ": bcet > wcet on " + type.key() + " [" +
                                  std::to_string(iv.bcet) + ", " + std::to_string(iv.wcet) + "]");
      }
      if (n.is_virtual && (iv.bcet != 0 || iv.wcet != 0)) {
        report.problems.push_back(who + ": virtual task with non-zero interval on " + type.key());
      }
    }
  }
  for (const auto& [u, v] : dag.edges()) {
    if (u == v) report.problems.push_back("self-loop cycle on task " + std::to_string(u));
  }
  if (!dag.is_acyclic()) report.problems.emplace_back("edge relation contains a cycle");
  return report;
}

MultiTypedDag add_virtual_endpoints(const MultiTypedDag& dag,
                                    const std::vector<ProcTypeId>& catalog_types) {
  if (!dag.is_acyclic()) {
    throw std::invalid_argument("add_virtual_endpoints: cyclic graph");
  }
  const auto sources = dag.sources();
  const auto sinks = dag.sinks();
  if (sources.size() <= 1 && sinks.size() <= 1) return dag;

  std::vector<ProcTypeId> types = catalog_types;
  if (types.empty()) {
    std::set<ProcTypeId> all;
    for (const auto& n : dag.nodes()) all.insert(n.eligible.begin(), n.eligible.end());
    types.assign(all.begin(), all.end());
  }
  auto make_virtual = [&](TaskId id) {
    TaskNode v;
    v.id = id;
    v.is_virtual = true;
    v.eligible = types;
    for (const auto& t : types) v.intervals[t] = ExecInterval{0, 0};
    return v;
  };

  std::vector<TaskNode> nodes = dag.nodes();
  auto edges = dag.edges();
  if (sources.size() > 1) {
    const auto id = static_cast<TaskId>(nodes.size());
    nodes.push_back(make_virtual(id));
    for (TaskId s : sources) edges.emplace_back(id, s);
  }
  if (sinks.size() > 1) {
    const auto id = static_cast<TaskId>(nodes.size());
    nodes.push_back(make_virtual(id));
    for (TaskId s : sinks) edges.emplace_back(s, id);
  }
  return MultiTypedDag(std::move(nodes), std::move(edges));
}

std::vector<int> bfs_depths(const MultiTypedDag& dag) {
  std::vector<int> depth(dag.size(), -1);
  std::deque<TaskId> frontier;
  for (TaskId s : dag.sources()) {
    depth[s] = 0;
    frontier.push_back(s);
  }
  while (!frontier.empty()) {
    TaskId u = frontier.front();
    frontier.pop_front();
    for (TaskId v : dag.successors(u)) {
      if (depth[v] < 0) {
        depth[v] = depth[u] + 1;
        frontier.push_back(v);
      }
    }
  }
  return depth;
}

int bfs_depth(const MultiTypedDag& dag, TaskId task) {
  if (task >= dag.size()) throw std::out_of_range("bfs_depth: unknown task " + std::to_string(task));
  if (!dag.source()) throw std::invalid_argument("bfs_depth: dag has no unique source");
  const int d = bfs_depths(dag)[task];
  if (d < 0) throw std::invalid_argument("bfs_depth: task unreachable from source");
  return d;
}

MultiTypedDag scale_ticks(const MultiTypedDag& dag, Ticks factor) {
  if (factor < 1) throw std::invalid_argument("scale_ticks: factor must be >= 1");
  std::vector<TaskNode> nodes = dag.nodes();
  for (auto& n : nodes) {
    for (auto& [type, iv] : n.intervals) {
      iv.bcet *= factor;
      iv.wcet *= factor;
    }
  }
  return MultiTypedDag(std::move(nodes), dag.edges());
}

TaskSystem::TaskSystem(MultiTypedDag dag, ProcCatalog catalog)
    : dag_(std::move(dag)), catalog_(std::move(catalog)) {
  const auto report = validate_dag(dag_, catalog_);
  if (!report.ok()) {
    std::string msg = "invalid task system:";
    for (const auto& p : report.problems) msg += "\n  " + p;
    throw std::invalid_argument(msg);
  }
  auto src = dag_.source();
  auto snk = dag_.sink();
  if (!src || !snk) {
    throw std::invalid_argument("task system needs a unique source and sink (add virtual endpoints)");
  }
  source_ = *src;
  sink_ = *snk;

  for (const auto& type : catalog_.types()) instance_counts_.push_back(catalog_.count(type));
  const std::size_t n = dag_.size();
  options_.resize(n);
  is_virtual_.resize(n);
  for (TaskId t = 0; t < n; ++t) {
    const auto& node = dag_.node(t);
    is_virtual_[t] = node.is_virtual;
    for (const auto& type : node.eligible) {
      const auto& iv = node.intervals.at(type);
      options_[t].push_back(TypeOption{*catalog_.index_of(type), iv.bcet, iv.wcet});
    }
    std::sort(options_[t].begin(), options_[t].end(),
              [](const TypeOption& a, const TypeOption& b) { return a.type < b.type; });
  }
  topo_ = *dag_.topological_order();
  depth_ = bfs_depths(dag_);
}

const TypeOption* TaskSystem::option_for(TaskId t, int type) const {
  for (const auto& o : options_[t]) {
    if (o.type == type) return &o;
  }
  return nullptr;
}

}  // namespace tasched
