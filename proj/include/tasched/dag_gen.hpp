#pragma once

#include "tasched/dag_model.hpp"

#include <cstdint>

namespace tasched {

struct GenParams {
  int n_min = 10;  // inclusive node-count range
  int n_max = 40;
  double p = 0.1;  // edge probability, resolved to millionths
  Ticks c_min_lo = 1;  // bcet ~ U{c_min_lo, c_min_hi}
  Ticks c_min_hi = 1000;
  double wide_ratio = 0.8;  // share of nodes with the wide multiplier range
  int wide_lo = 1000;  // multiplier ranges in hundredths: wide [10, 30]
  int wide_hi = 3000;
  int narrow_lo = 100;  // narrow [1.0, 1.2]
  int narrow_hi = 120;
  /// Sensitivity mode: interior nodes get a random non-empty subset of the
  /// catalog types instead of all of them.
  bool subset_eligibility = false;
  std::uint64_t seed = 0;
};

/// Throws std::invalid_argument for out-of-range parameters.
void check_gen_params(const GenParams& params);

/// Seeded G(n, p) multi-typed DAG with virtual endpoints added. Real sources
/// and sinks run on the catalog's CPU types only; every other node is
/// eligible on all types (or a random subset), each (node, type) with its
/// own interval.
MultiTypedDag generate_dag(const GenParams& params, const ProcCatalog& catalog);

/// Configuration k in {1, 2, 3}: CPU.0, CPU.1, GPU.0, GPU.1 with 1, 2 or 4
/// instances each. Throws std::invalid_argument otherwise.
ProcCatalog resource_config(int k);

}  // namespace tasched
