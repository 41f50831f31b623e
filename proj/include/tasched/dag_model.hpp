#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tasched {

using TaskId = std::uint32_t;
using Ticks = std::int64_t;

/// A processing-unit type: an architecture name plus a capability class
/// within it ("CPU.0" is the faster CPU class, "CPU.1" the slower one, ...).
struct ProcTypeId {
  std::string architecture;
  int type_index = 0;

  auto operator<=>(const ProcTypeId&) const = default;

  /// "CPU.0" style key used by every file format.
  std::string key() const;
  static ProcTypeId parse(std::string_view key);
};

/// One physical unit: a type and the instance index within that type.
struct InstanceId {
  ProcTypeId type;
  int index = 0;

  auto operator<=>(const InstanceId&) const = default;
};

/// Instance counts per processing-unit type. Types are kept in ProcTypeId
/// order; that order defines the dense type index used by the simulator and
/// the "smaller type id" tie-break.
class ProcCatalog {
 public:
  ProcCatalog() = default;
  explicit ProcCatalog(std::map<ProcTypeId, int> counts);

  const std::map<ProcTypeId, int>& counts() const { return counts_; }
  bool contains(const ProcTypeId& type) const { return counts_.count(type) != 0; }
  int count(const ProcTypeId& type) const;
  int total_instances() const;
  std::size_t type_count() const { return types_.size(); }

  const std::vector<ProcTypeId>& types() const { return types_; }
  /// Dense index of a type, or std::nullopt when absent.
  std::optional<int> index_of(const ProcTypeId& type) const;

  /// Problems with the catalog itself (non-positive counts, empty catalog).
  std::vector<std::string> problems() const;

  bool operator==(const ProcCatalog& other) const { return counts_ == other.counts_; }

 private:
  std::map<ProcTypeId, int> counts_;
  std::vector<ProcTypeId> types_;
};

struct ExecInterval {
  Ticks bcet = 0;
  Ticks wcet = 0;

  bool operator==(const ExecInterval&) const = default;
};

struct TaskNode {
  TaskId id = 0;
  std::vector<ProcTypeId> eligible;
  std::map<ProcTypeId, ExecInterval> intervals;
  bool is_virtual = false;

  bool operator==(const TaskNode&) const = default;
};

/// Multi-typed DAG. The graph may be invalid (cyclic, dangling edges...);
/// validate_dag() reports problems rather than the constructor throwing, so
/// the only construction-time checks are structural (ids in range).
class MultiTypedDag {
 public:
  MultiTypedDag() = default;
  MultiTypedDag(std::vector<TaskNode> nodes, std::vector<std::pair<TaskId, TaskId>> edges);

  const std::vector<TaskNode>& nodes() const { return nodes_; }
  const TaskNode& node(TaskId id) const { return nodes_.at(id); }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<std::pair<TaskId, TaskId>>& edges() const { return edges_; }

  const std::vector<TaskId>& predecessors(TaskId id) const { return preds_.at(id); }
  const std::vector<TaskId>& successors(TaskId id) const { return succs_.at(id); }

  std::vector<TaskId> sources() const;
  std::vector<TaskId> sinks() const;
  /// Unique source/sink, if the DAG has exactly one.
  std::optional<TaskId> source() const;
  std::optional<TaskId> sink() const;

  /// Kahn order (ties by smaller id); std::nullopt when the graph has a cycle.
  std::optional<std::vector<TaskId>> topological_order() const;
  bool is_acyclic() const { return topological_order().has_value(); }

  bool operator==(const MultiTypedDag& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
  }

 private:
  std::vector<TaskNode> nodes_;
  std::vector<std::pair<TaskId, TaskId>> edges_;
  std::vector<std::vector<TaskId>> preds_;
  std::vector<std::vector<TaskId>> succs_;
};

struct ValidationReport {
  std::vector<std::string> problems;

  bool ok() const { return problems.empty(); }
  /// True when some problem message contains `needle`.
  bool mentions(std::string_view needle) const;
};

ValidationReport validate_dag(const MultiTypedDag& dag, const ProcCatalog& catalog);

/// Adds a zero-time virtual source (and/or sink) when the DAG has several
/// sources (sinks). Virtual nodes take the largest ids and are eligible on
/// every type of `catalog_types` with [0, 0] intervals; when the list is
/// empty they inherit the union of eligible types in the DAG.
/// Throws std::invalid_argument on a cyclic graph.
MultiTypedDag add_virtual_endpoints(const MultiTypedDag& dag,
                                    const std::vector<ProcTypeId>& catalog_types = {});

/// Shortest path length (in edges) from the source to `task`. Throws
/// std::out_of_range for an unknown id and std::invalid_argument when the
/// DAG has no unique source or the task is unreachable.
int bfs_depth(const MultiTypedDag& dag, TaskId task);

/// All depths at once (multi-source BFS, so it also works before normalization).
std::vector<int> bfs_depths(const MultiTypedDag& dag);

/// Multiplies every interval bound by `factor` (factor >= 1).
MultiTypedDag scale_ticks(const MultiTypedDag& dag, Ticks factor);

// --- compiled view used by the schedulers and simulator -------------------

/// One (task, type) option with the type resolved to its dense catalog index.
struct TypeOption {
  int type = 0;
  Ticks bcet = 0;
  Ticks wcet = 0;
};

/// A validated, normalized DAG bound to a catalog, flattened to dense
/// indices. Immutable; cheap to share between concurrent runs.
class TaskSystem {
 public:
  /// Throws std::invalid_argument when validate_dag reports problems or the
  /// DAG does not have a unique source and sink.
  TaskSystem(MultiTypedDag dag, ProcCatalog catalog);

  const MultiTypedDag& dag() const { return dag_; }
  const ProcCatalog& catalog() const { return catalog_; }

  std::size_t task_count() const { return dag_.size(); }
  std::size_t type_count() const { return instance_counts_.size(); }
  int instance_count(int type) const { return instance_counts_[type]; }
  const ProcTypeId& type_id(int type) const { return catalog_.types()[type]; }

  /// Options sorted by dense type index.
  const std::vector<TypeOption>& options(TaskId t) const { return options_[t]; }
  const TypeOption* option_for(TaskId t, int type) const;
  bool is_virtual(TaskId t) const { return is_virtual_[t]; }
  const std::vector<TaskId>& predecessors(TaskId t) const { return dag_.predecessors(t); }
  const std::vector<TaskId>& successors(TaskId t) const { return dag_.successors(t); }
  const std::vector<TaskId>& topological_order() const { return topo_; }
  int depth(TaskId t) const { return depth_[t]; }
  TaskId source() const { return source_; }
  TaskId sink() const { return sink_; }

 private:
  MultiTypedDag dag_;
  ProcCatalog catalog_;
  std::vector<int> instance_counts_;
  std::vector<std::vector<TypeOption>> options_;
  std::vector<bool> is_virtual_;
  std::vector<TaskId> topo_;
  std::vector<int> depth_;
  TaskId source_ = 0;
  TaskId sink_ = 0;
};

}  // namespace tasched
