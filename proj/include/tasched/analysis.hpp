#pragma once

#include "tasched/constraint_gen.hpp"
#include "tasched/exec_progress.hpp"
#include "tasched/rational.hpp"
#include "tasched/schedulers.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace tasched {

/// Runs body(worker, begin, end) over [0, count) split into contiguous
/// chunks on up to `jobs` threads (jobs <= 0 means hardware concurrency).
void parallel_for(std::size_t count, int jobs,
                  const std::function<void(int worker, std::size_t begin, std::size_t end)>& body);

struct WcrtResult {
  Ticks wcrt = 0;
  ScheduleTrace trace;
};

/// One all-WCETs run. For a DDE policy this is the WCRT.
WcrtResult wcrt_all_wcets(const TaskSystem& system, const SchedulerPolicy& policy,
                          const RunOptions& options = {});

/// Every eligible type of an architecture gets the task's largest WCET
/// within that architecture. Eligibility is unchanged.
MultiTypedDag conservative_transform(const MultiTypedDag& dag);

/// All-WCETs response time of the conservative transform under `kind`
/// (DDE needs `constraint`).
Ticks conservative_wcrt(const TaskSystem& system, PolicyKind kind,
                        const ExecutionConstraint* constraint = nullptr, const RunOptions& options = {});

struct CampaignMetrics {
  Ticks wcrt = 0;
  Ticks mswcrt = 0;
  Ticks msbcrt = 0;
  Rational avrt = 0;
  Rational jitter = 0;
  std::size_t n_runs = 0;
  bool ta_detected = false;
};

struct CampaignOptions {
  std::size_t n_runs = 10'000;
  std::uint64_t seed = 0;
  int jobs = 1;
  RunOptions run;
};

/// Seed of online run `index` in a campaign seeded with `seed`.
std::uint64_t campaign_run_seed(std::uint64_t seed, std::size_t index);

/// Online response times of every run, in run-index order.
std::vector<Ticks> campaign_response_times(const TaskSystem& system, const SchedulerPolicy& policy,
                                           const CampaignOptions& options);

CampaignMetrics summarize_campaign(Ticks wcrt, const std::vector<Ticks>& response_times);

/// Throws std::invalid_argument when n_runs is zero.
CampaignMetrics monte_carlo_campaign(const TaskSystem& system, const SchedulerPolicy& policy,
                                     const CampaignOptions& options);

struct DominanceResult {
  bool dominated = true;
  Ticks tick = -1;   // cycle after which the order first failed
  TaskId task = 0;   // first task ahead in the all-WCETs run
  Ticks cycles = 0;  // cycles compared

  static DominanceResult ok(Ticks cycles) { return {true, -1, 0, cycles}; }
};

/// Lockstep comparison of the all-WCETs run against the run driven by
/// `assignment`, both under the DDE policy for `constraint`. After every
/// cycle the all-WCETs state must not be ahead of the assignment state.
DominanceResult dominance_check(const TaskSystem& system, const ExecutionConstraint& constraint,
                                const TimeSource& assignment, const RunOptions& options = {});

/// Same, for an arbitrary policy (baselines can fail).
DominanceResult dominance_check(const TaskSystem& system, const SchedulerPolicy& policy,
                                const TimeSource& assignment, const RunOptions& options = {});

/// Per-task duration levels bcet + floor((wcet - bcet) * level / denominator).
struct OracleGrid {
  std::vector<int> levels;
  int denominator = 1;
  std::string name;
};

/// "endpoints", "endpoints+mid" or "uniform:K" (K >= 2 evenly spaced levels).
OracleGrid parse_oracle_grid(const std::string& text);

struct OracleOptions {
  OracleGrid grid = parse_oracle_grid("endpoints+mid");
  std::uint64_t budget = 1'000'000;
  int jobs = 1;
  RunOptions run;
};

struct OracleResult {
  Ticks max_rt = 0;
  Ticks min_rt = 0;
  std::uint64_t run_count = 0;
  std::vector<int> argmax;  // grid levels of the first maximising assignment
};

/// Number of grid points per task: 1 for virtual tasks and for tasks whose
/// policy-eligible intervals are all degenerate.
std::vector<int> oracle_radix(const TaskSystem& system, const SchedulerPolicy& policy, const OracleGrid& grid);

/// Enumerates every grid assignment. Throws std::length_error when the
/// product of grid sizes exceeds the budget.
OracleResult exhaustive_oracle(const TaskSystem& system, const SchedulerPolicy& policy,
                               const OracleOptions& options = {});

/// Visits every grid assignment as a GridPoint time source, in index order
/// per worker. Same budget rule as exhaustive_oracle.
void for_each_grid_point(const TaskSystem& system, const SchedulerPolicy& policy, const OracleOptions& options,
                         const std::function<void(int worker, std::uint64_t index, const TimeSource&)>& visit);

struct RatioSummary {
  Rational ara = 0;
  Rational sra = 0;
  std::size_t n = 0;
};

/// Mean and minimum of x[i] / y[i]. Throws std::invalid_argument on empty
/// or mismatched input or a zero denominator.
RatioSummary ratio_summary(const std::vector<Rational>& x, const std::vector<Rational>& y);

}  // namespace tasched
