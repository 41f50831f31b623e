#include "tasched/analysis.hpp"

#include "tasched/rng.hpp"

#include <algorithm>
#include <limits>
#include <memory>
#include <stdexcept>
#include <thread>

namespace tasched {

void parallel_for(std::size_t count, int jobs,
                  const std::function<void(int, std::size_t, std::size_t)>& body) {
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    body(0, 0, count);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(count, w * chunk);
    const std::size_t end = std::min(count, begin + chunk);
    threads.emplace_back([&, w, begin, end] {
      try {
        body(static_cast<int>(w), begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

WcrtResult wcrt_all_wcets(const TaskSystem& system, const SchedulerPolicy& policy, const RunOptions& options) {
  auto r = run_to_completion(system, policy, TimeSource::all_wcet(), options);
  return {r.response_time, std::move(r.trace)};
}

MultiTypedDag conservative_transform(const MultiTypedDag& dag) {
  std::vector<TaskNode> nodes = dag.nodes();
  for (auto& node : nodes) {
    std::map<std::string, Ticks> slowest;
    for (const auto& [type, iv] : node.intervals) {
      auto& w = slowest[type.architecture];
      w = std::max(w, iv.wcet);
    }
    for (auto& [type, iv] : node.intervals) iv.wcet = slowest[type.architecture];
  }
  return MultiTypedDag(std::move(nodes), dag.edges());
}

Ticks conservative_wcrt(const TaskSystem& system, PolicyKind kind, const ExecutionConstraint* constraint,
                        const RunOptions& options) {
  const TaskSystem slow(conservative_transform(system.dag()), system.catalog());
  SchedulerPolicy policy = [&] {
    switch (kind) {
      case PolicyKind::Hfcfs: return hfcfs_policy(slow);
      case PolicyKind::Hbfs: return hbfs_policy(slow);
      case PolicyKind::Dde:
        if (!constraint) throw std::invalid_argument("conservative_wcrt: dde needs a constraint");
        return dde_policy(slow, *constraint);
    }
    throw std::invalid_argument("conservative_wcrt: unknown policy");
  }();
  return wcrt_all_wcets(slow, policy, options).wcrt;
}

std::uint64_t campaign_run_seed(std::uint64_t seed, std::size_t index) {
  return rng::derive(seed, "mc-run", index);
}

std::vector<Ticks> campaign_response_times(const TaskSystem& system, const SchedulerPolicy& policy,
                                           const CampaignOptions& options) {
  std::vector<Ticks> rts(options.n_runs);
  parallel_for(options.n_runs, options.jobs, [&](int, std::size_t begin, std::size_t end) {
    Simulator sim(system, policy, options.run.handoff);
    for (std::size_t i = begin; i < end; ++i) {
      rts[i] = sim.response_time(TimeSource::seeded(campaign_run_seed(options.seed, i)), options.run);
    }
  });
  return rts;
}

CampaignMetrics summarize_campaign(Ticks wcrt, const std::vector<Ticks>& response_times) {
  if (response_times.empty()) throw std::invalid_argument("campaign needs at least one run");
  CampaignMetrics m;
  m.wcrt = wcrt;
  m.n_runs = response_times.size();
  m.mswcrt = *std::max_element(response_times.begin(), response_times.end());
  m.msbcrt = *std::min_element(response_times.begin(), response_times.end());
  boost::multiprecision::cpp_int sum = 0;
  for (Ticks rt : response_times) sum += rt;
  m.avrt = Rational(sum, m.n_runs);
  m.jitter = m.mswcrt > 0 ? Rational(m.mswcrt - m.msbcrt, m.mswcrt) : Rational(0);
  m.ta_detected = m.mswcrt > wcrt;
  return m;
}

CampaignMetrics monte_carlo_campaign(const TaskSystem& system, const SchedulerPolicy& policy,
                                     const CampaignOptions& options) {
  if (options.n_runs == 0) throw std::invalid_argument("monte_carlo_campaign: n_runs must be positive");
  const Ticks wcrt = wcrt_all_wcets(system, policy, options.run).wcrt;
  return summarize_campaign(wcrt, campaign_response_times(system, policy, options));
}

namespace {

bool all_finished(const SystemState& c) {
  return std::all_of(c.progress.begin(), c.progress.end(),
                     [](const TaskProgress& p) { return p.stage == StageKind::Finish; });
}

Ticks min_exec_tick(const SystemState& c) {
  Ticks m = std::numeric_limits<Ticks>::max();
  for (const auto& p : c.progress) {
    if (p.stage == StageKind::Exec) m = std::min(m, p.tick);
  }
  return m;
}

void count_down(SystemState& c, Ticks k) {
  for (auto& p : c.progress) {
    if (p.stage == StageKind::Exec) p.tick -= k;
  }
  c.elapsed += k;
}

}  // namespace

DominanceResult dominance_check(const TaskSystem& system, const SchedulerPolicy& policy,
                                const TimeSource& assignment, const RunOptions& options) {
  Simulator sim_w(system, policy, options.handoff);
  Simulator sim_a(system, policy, options.handoff);
  const TimeSource wcet = TimeSource::all_wcet();
  SystemState cw = initial_state(system);
  SystemState ca = initial_state(system);
  Ticks idle = 0;
  while (!(all_finished(cw) && all_finished(ca))) {
    if (cw.elapsed > options.tick_limit) throw LivelockError("dominance check exceeded tick limit");
    const bool changed_w = sim_w.step(cw, wcet);
    const bool changed_a = sim_a.step(ca, assignment);
    if (options.check_invariants) {
      for (const auto* c : {&cw, &ca}) {
        if (auto v = check_state(*c, system, options.handoff)) throw InvariantViolation(*v);
      }
    }
    const auto order = cmp_state(cw, ca);
    if (order == StateOrder::GreaterOrEqual || order == StateOrder::Incomparable) {
      for (TaskId t = 0; t < system.task_count(); ++t) {
        if (cmp_progress(cw.progress[t], ca.progress[t]) == ProgressOrder::Greater) {
          return {false, cw.elapsed, t, cw.elapsed};
        }
      }
    }
    if (!changed_w && !changed_a) {
      // Both sides only count down until the nearest Exec completion; the
      // order between them cannot change in between.
      const Ticks m = std::min(min_exec_tick(cw), min_exec_tick(ca));
      if (m == std::numeric_limits<Ticks>::max()) {
        if (++idle > 1) throw LivelockError("dominance check: no task can advance");
      } else if (options.fast_forward && m >= 2) {
        count_down(cw, m - 1);
        count_down(ca, m - 1);
      }
    } else {
      idle = 0;
    }
  }
  return DominanceResult::ok(cw.elapsed);
}

DominanceResult dominance_check(const TaskSystem& system, const ExecutionConstraint& constraint,
                                const TimeSource& assignment, const RunOptions& options) {
  const auto policy = dde_policy(system, constraint);
  return dominance_check(system, policy, assignment, options);
}

OracleGrid parse_oracle_grid(const std::string& text) {
  if (text == "endpoints") return {{0, 1}, 1, text};
  if (text == "endpoints+mid") return {{0, 1, 2}, 2, text};
  const std::string prefix = "uniform:";
  if (text.rfind(prefix, 0) == 0) {
    int k = 0;
    try {
      std::size_t used = 0;
      k = std::stoi(text.substr(prefix.size()), &used);
      if (used != text.size() - prefix.size()) k = 0;
    } catch (const std::exception&) {
      k = 0;
    }
    if (k < 2) throw std::invalid_argument("grid '" + text + "': uniform:K needs an integer K >= 2");
    OracleGrid g{{}, k - 1, text};
    for (int i = 0; i < k; ++i) g.levels.push_back(i);
    return g;
  }
  throw std::invalid_argument("unknown grid '" + text + "' (endpoints | endpoints+mid | uniform:K)");
}

std::vector<int> oracle_radix(const TaskSystem& system, const SchedulerPolicy& policy, const OracleGrid& grid) {
  std::vector<int> radix(system.task_count(), 1);
  for (TaskId t = 0; t < system.task_count(); ++t) {
    if (system.is_virtual(t)) continue;
    for (int r : policy.eligible(t)) {
      const auto* o = system.option_for(t, r);
      if (o && o->bcet != o->wcet) radix[t] = static_cast<int>(grid.levels.size());
    }
  }
  return radix;
}

void for_each_grid_point(const TaskSystem& system, const SchedulerPolicy& policy, const OracleOptions& options,
                         const std::function<void(int, std::uint64_t, const TimeSource&)>& visit) {
  const auto& grid = options.grid;
  if (grid.levels.empty() || grid.denominator <= 0) throw std::invalid_argument("empty oracle grid");
  const auto radix = oracle_radix(system, policy, grid);
  std::uint64_t total = 1;
  for (int r : radix) {
    if (total > options.budget / static_cast<std::uint64_t>(r)) {
      throw std::length_error("oracle grid exceeds the budget of " + std::to_string(options.budget) + " runs");
    }
    total *= static_cast<std::uint64_t>(r);
  }
  if (total > options.budget) {
    throw std::length_error("oracle grid exceeds the budget of " + std::to_string(options.budget) + " runs");
  }
  const std::size_t n = system.task_count();
  parallel_for(total, options.jobs, [&](int worker, std::size_t begin, std::size_t end) {
    std::vector<int> digit(n, 0);
    std::uint64_t rest = begin;
    for (std::size_t t = 0; t < n; ++t) {
      digit[t] = static_cast<int>(rest % radix[t]);
      rest /= radix[t];
    }
    GridPoint point;
    point.denominator = grid.denominator;
    point.level.assign(n, grid.denominator);
    for (std::uint64_t i = begin; i < end; ++i) {
      for (std::size_t t = 0; t < n; ++t) {
        if (radix[t] > 1) point.level[t] = grid.levels[digit[t]];
      }
      visit(worker, i, TimeSource(point));
      for (std::size_t t = 0; t < n; ++t) {
        if (++digit[t] < radix[t]) break;
        digit[t] = 0;
      }
    }
  });
}

OracleResult exhaustive_oracle(const TaskSystem& system, const SchedulerPolicy& policy,
                               const OracleOptions& options) {
  struct Local {
    Ticks max_rt = std::numeric_limits<Ticks>::min();
    Ticks min_rt = std::numeric_limits<Ticks>::max();
    std::uint64_t count = 0;
    std::uint64_t argmax_index = 0;
    std::vector<int> argmax;
  };
  const int workers = options.jobs <= 0 ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))
                                        : options.jobs;
  std::vector<Local> locals(static_cast<std::size_t>(workers));
  std::vector<std::unique_ptr<Simulator>> sims(static_cast<std::size_t>(workers));
  for_each_grid_point(system, policy, options, [&](int w, std::uint64_t index, const TimeSource& ts) {
    auto& sim = sims[static_cast<std::size_t>(w)];
    if (!sim) sim = std::make_unique<Simulator>(system, policy, options.run.handoff);
    const Ticks rt = sim->response_time(ts, options.run);
    auto& l = locals[static_cast<std::size_t>(w)];
    ++l.count;
    l.min_rt = std::min(l.min_rt, rt);
    if (rt > l.max_rt) {
      l.max_rt = rt;
      l.argmax_index = index;
      l.argmax = std::get<GridPoint>(ts.variant()).level;
    }
  });
  // Workers cover increasing index ranges, so a strict comparison keeps the
  // smallest maximising index.
  OracleResult out;
  out.max_rt = std::numeric_limits<Ticks>::min();
  out.min_rt = std::numeric_limits<Ticks>::max();
  for (auto& l : locals) {
    if (l.count == 0) continue;
    out.run_count += l.count;
    out.min_rt = std::min(out.min_rt, l.min_rt);
    if (l.max_rt > out.max_rt) {
      out.max_rt = l.max_rt;
      out.argmax = std::move(l.argmax);
    }
  }
  return out;
}

RatioSummary ratio_summary(const std::vector<Rational>& x, const std::vector<Rational>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("ratio_summary: length mismatch");
  if (x.empty()) throw std::invalid_argument("ratio_summary: no systems");
  RatioSummary s;
  s.n = x.size();
  Rational sum = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] == 0) throw std::invalid_argument("ratio_summary: zero denominator at index " + std::to_string(i));
    const Rational r = x[i] / y[i];
    sum += r;
    s.sra = i == 0 ? r : std::min(s.sra, r);
  }
  s.ara = sum / static_cast<long long>(s.n);
  return s;
}

}  // namespace tasched
