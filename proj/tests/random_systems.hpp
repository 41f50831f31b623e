#pragma once

#include "tasched/dag_model.hpp"
#include "tasched/rng.hpp"

#include <string>
#include <vector>

namespace tasched::testing {

struct RandomShape {
  int min_tasks = 2;
  int max_tasks = 7;
  Ticks max_bcet = 6;
  Ticks max_spread = 5;
  int edge_per_mille = 350;
  int zero_time_per_mille = 0;  // chance of a [0, 0] interval on a type
};

inline ProcCatalog random_catalog(rng::Stream& s) {
  std::map<ProcTypeId, int> counts;
  const char* archs[] = {"CPU", "GPU"};
  const int types = static_cast<int>(s.uniform(1, 3));
  for (int k = 0; k < types; ++k) {
    counts[ProcTypeId{archs[k % 2], k / 2}] = static_cast<int>(s.uniform(1, 2));
  }
  return ProcCatalog(std::move(counts));
}

// Random small system with virtual endpoints; every task is eligible on a
// non-empty random subset of the catalog types.
inline MultiTypedDag random_dag(rng::Stream& s, const ProcCatalog& catalog, const RandomShape& shape = {}) {
  const int n = static_cast<int>(s.uniform(shape.min_tasks, shape.max_tasks));
  std::vector<TaskNode> nodes(n);
  std::vector<std::pair<TaskId, TaskId>> edges;
  const auto& types = catalog.types();
  for (int i = 0; i < n; ++i) {
    auto& node = nodes[i];
    node.id = static_cast<TaskId>(i);
    for (const auto& type : types) {
      if (!s.bernoulli(2, 3)) continue;
      node.eligible.push_back(type);
    }
    if (node.eligible.empty()) node.eligible.push_back(types[s.uniform(0, static_cast<std::int64_t>(types.size()) - 1)]);
    for (const auto& type : node.eligible) {
      if (s.bernoulli(static_cast<std::uint64_t>(shape.zero_time_per_mille), 1000)) {
        node.intervals[type] = ExecInterval{0, 0};
        continue;
      }
      const Ticks b = s.uniform(1, shape.max_bcet);
      node.intervals[type] = ExecInterval{b, b + s.uniform(0, shape.max_spread)};
    }
    for (int j = 0; j < i; ++j) {
      if (s.bernoulli(static_cast<std::uint64_t>(shape.edge_per_mille), 1000)) edges.emplace_back(j, i);
    }
  }
  return add_virtual_endpoints(MultiTypedDag(std::move(nodes), std::move(edges)), types);
}

}  // namespace tasched::testing
