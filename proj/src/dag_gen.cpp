#include "tasched/dag_gen.hpp"

#include "tasched/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tasched {

namespace {

constexpr std::uint64_t kProbabilityScale = 1'000'000;

std::uint64_t to_millionths(double p) { return static_cast<std::uint64_t>(std::llround(p * kProbabilityScale)); }

}  // namespace

void check_gen_params(const GenParams& params) {
  if (params.n_min < 1 || params.n_max < params.n_min) {
    throw std::invalid_argument("node-count range must satisfy 1 <= n_min <= n_max");
  }
  if (!(params.p >= 0.0 && params.p < 1.0)) throw std::invalid_argument("edge probability must lie in [0, 1)");
  if (!(params.wide_ratio >= 0.0 && params.wide_ratio <= 1.0)) {
    throw std::invalid_argument("wide_ratio must lie in [0, 1]");
  }
  if (params.c_min_lo < 1 || params.c_min_hi < params.c_min_lo) {
    throw std::invalid_argument("bcet range must satisfy 1 <= lo <= hi");
  }
  if (params.wide_lo < 100 || params.wide_hi < params.wide_lo || params.narrow_lo < 100 ||
      params.narrow_hi < params.narrow_lo) {
    throw std::invalid_argument("multiplier ranges must satisfy 1.00 <= lo <= hi");
  }
}

MultiTypedDag generate_dag(const GenParams& params, const ProcCatalog& catalog) {
  check_gen_params(params);
  if (catalog.type_count() == 0) throw std::invalid_argument("generate_dag: empty catalog");
  const auto seed = params.seed;

  rng::Stream shape(seed, "dag-shape", 0);
  const int n = static_cast<int>(shape.uniform(params.n_min, params.n_max));

  // Random topological labelling: edge perm[a] -> perm[b] for a < b.
  std::vector<TaskId> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[shape.uniform(0, i)]);

  const std::uint64_t threshold = to_millionths(params.p);
  rng::Stream edges_rng(seed, "dag-edges", 0);
  std::vector<std::pair<TaskId, TaskId>> edges;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (edges_rng.bernoulli(threshold, kProbabilityScale)) edges.emplace_back(perm[a], perm[b]);
    }
  }

  std::vector<bool> has_pred(n), has_succ(n);
  for (const auto& [u, v] : edges) {
    has_succ[u] = true;
    has_pred[v] = true;
  }

  // Exactly round(wide_ratio * n) nodes take the wide multiplier range.
  const int wide_count = static_cast<int>(std::llround(params.wide_ratio * n));
  std::vector<int> pick(n);
  std::iota(pick.begin(), pick.end(), 0);
  rng::Stream wide_rng(seed, "dag-wide", 0);
  for (int i = n - 1; i > 0; --i) std::swap(pick[i], pick[wide_rng.uniform(0, i)]);
  std::vector<bool> wide(n);
  for (int i = 0; i < wide_count; ++i) wide[pick[i]] = true;

  std::vector<ProcTypeId> cpu_types;
  for (const auto& type : catalog.types()) {
    if (type.architecture == "CPU") cpu_types.push_back(type);
  }
  if (cpu_types.empty()) cpu_types = catalog.types();

  std::vector<TaskNode> nodes(n);
  for (int i = 0; i < n; ++i) {
    TaskNode& node = nodes[i];
    node.id = static_cast<TaskId>(i);
    const bool endpoint = !has_pred[i] || !has_succ[i];
    if (endpoint) {
      node.eligible = cpu_types;
    } else if (params.subset_eligibility) {
      rng::Stream subset(seed, "dag-subset", static_cast<std::uint64_t>(i));
      const auto& all = catalog.types();
      const auto mask_max = (std::int64_t{1} << all.size()) - 1;
      const auto mask = subset.uniform(1, mask_max);
      for (std::size_t k = 0; k < all.size(); ++k) {
        if (mask & (std::int64_t{1} << k)) node.eligible.push_back(all[k]);
      }
    } else {
      node.eligible = catalog.types();
    }
    const int lo = wide[i] ? params.wide_lo : params.narrow_lo;
    const int hi = wide[i] ? params.wide_hi : params.narrow_hi;
    for (std::size_t k = 0; k < node.eligible.size(); ++k) {
      const auto& type = node.eligible[k];
      rng::Stream draw(seed, "dag-interval", static_cast<std::uint64_t>(i) * 64 + *catalog.index_of(type));
      const Ticks bcet = draw.uniform(params.c_min_lo, params.c_min_hi);
      const Ticks hundredths = draw.uniform(lo, hi);
      const Ticks wcet = (hundredths * bcet + 50) / 100;  // round half up
      node.intervals[type] = ExecInterval{bcet, std::max(wcet, bcet)};
    }
  }
  return add_virtual_endpoints(MultiTypedDag(std::move(nodes), std::move(edges)), catalog.types());
}

ProcCatalog resource_config(int k) {
  int count = 0;
  switch (k) {
    case 1: count = 1; break;
    case 2: count = 2; break;
    case 3: count = 4; break;
    default: throw std::invalid_argument("resource configuration must be 1, 2 or 3");
  }
  return ProcCatalog({{{"CPU", 0}, count}, {{"CPU", 1}, count}, {{"GPU", 0}, count}, {{"GPU", 1}, count}});
}

}  // namespace tasched
