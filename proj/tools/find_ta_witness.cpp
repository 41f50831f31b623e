// Randomized search for a small system where the HFCFS grid oracle exceeds
// both the all-WCETs estimate and the conservative estimate.
#include "tasched/analysis.hpp"
#include "tasched/io.hpp"
#include "tasched/rng.hpp"

#include <iostream>

using namespace tasched;

namespace {

MultiTypedDag random_small_dag(std::uint64_t seed, const ProcCatalog& catalog) {
  rng::Stream s(seed, "witness", 0);
  const int n = static_cast<int>(s.uniform(3, 6));
  std::vector<TaskNode> nodes(n);
  std::vector<std::pair<TaskId, TaskId>> edges;
  for (int i = 0; i < n; ++i) {
    nodes[i].id = static_cast<TaskId>(i);
    for (const auto& type : catalog.types()) {
      if (!s.bernoulli(2, 3)) continue;
      const Ticks b = s.uniform(1, 6);
      nodes[i].eligible.push_back(type);
      nodes[i].intervals[type] = ExecInterval{b, b + s.uniform(0, 4)};
    }
    if (nodes[i].eligible.empty()) {
      const auto& type = catalog.types().front();
      nodes[i].eligible.push_back(type);
      nodes[i].intervals[type] = ExecInterval{1, 1 + s.uniform(0, 4)};
    }
    for (int j = 0; j < i; ++j) {
      if (s.bernoulli(1, 3)) edges.emplace_back(j, i);
    }
  }
  return add_virtual_endpoints(MultiTypedDag(std::move(nodes), std::move(edges)), catalog.types());
}

}  // namespace

int main(int argc, char** argv) {
  const std::uint64_t limit = argc > 1 ? std::stoull(argv[1]) : 100000;
  const std::string out_dir = argc > 2 ? argv[2] : ".";
  const ProcCatalog catalog({{{"CPU", 0}, 1}, {{"CPU", 1}, 1}, {{"GPU", 0}, 1}});
  OracleOptions o;
  o.grid = parse_oracle_grid("endpoints+mid");
  o.budget = 100000;
  for (std::uint64_t seed = 0; seed < limit; ++seed) {
    const TaskSystem sys(random_small_dag(seed, catalog), catalog);
    const auto policy = hfcfs_policy(sys);
    const Ticks est = wcrt_all_wcets(sys, policy).wcrt;
    const Ticks cons = conservative_wcrt(sys, PolicyKind::Hfcfs);
    if (cons <= est) continue;  // want a conservative estimate above the plain one
    const auto r = exhaustive_oracle(sys, policy, o);
    if (r.max_rt > est && r.max_rt > cons) {
      std::cout << "seed " << seed << ": oracle " << r.max_rt << " > wcrt " << est << ", conservative " << cons
                << "\n";
      io::write_file(out_dir + "/ta_witness_dag.json", io::dag_to_json(sys.dag()));
      io::write_file(out_dir + "/ta_witness_catalog.json", io::catalog_to_json(catalog));
      std::string levels = "{\"durations\":{";
      bool first = true;
      for (TaskId t = 0; t < sys.task_count(); ++t) {
        if (sys.is_virtual(t)) continue;
        // Resolve the maximising grid level against the type HFCFS dispatches.
        const auto run = run_to_completion(sys, policy, TimeSource(GridPoint{r.argmax, o.grid.denominator}));
        const Ticks d = run.trace.entries[t].alloc_es_time;
        levels += std::string(first ? "" : ",") + "\"" + std::to_string(t) + "\":" + std::to_string(d);
        first = false;
      }
      io::write_file(out_dir + "/ta_witness_assignment.json", levels + "}}\n");
      return 0;
    }
  }
  std::cerr << "no witness found\n";
  return 1;
}
