#pragma once

#include "tasched/analysis.hpp"
#include "tasched/constraint_gen.hpp"
#include "tasched/dag_model.hpp"
#include "tasched/exec_progress.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace tasched::io {

/// Malformed input; the message carries "file:line:col:" or "file: at /json/path:".
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

/// DAG document:
///   {"nodes":[{"id":0,"eligible":[{"arch":"CPU","type":0}],
///              "intervals":{"CPU.0":[3,7]},"virtual":false}],
///    "edges":[[0,1]]}
/// Interval bounds may be fractional; each is multiplied by `tick_scale`
/// and must then be an integer.
MultiTypedDag parse_dag(const std::string& text, const std::string& source = "<dag>", Ticks tick_scale = 1);
std::string dag_to_json(const MultiTypedDag& dag);
MultiTypedDag load_dag(const std::string& path, Ticks tick_scale = 1);

/// {"CPU.0":1,"GPU.0":2}
ProcCatalog parse_catalog(const std::string& text, const std::string& source = "<catalog>");
std::string catalog_to_json(const ProcCatalog& catalog);
ProcCatalog load_catalog(const std::string& path);

/// {"order":[0,1,3,2],"alloc":{"0":"CPU.0","1":"GPU.1"}}
ExecutionConstraint parse_constraint(const std::string& text, const std::string& source = "<constraint>");
std::string constraint_to_json(const ExecutionConstraint& constraint);
ExecutionConstraint load_constraint(const std::string& path);

/// {"durations":{"3":5}}; tasks left out run their WCET.
FixedDurations parse_assignment(const std::string& text, std::size_t task_count,
                                const std::string& source = "<assignment>", Ticks tick_scale = 1);
FixedDurations load_assignment(const std::string& path, std::size_t task_count, Ticks tick_scale = 1);

/// task_id,start_tick,finish_tick,arch,type_index,instance_index,alloc_es_time
/// (arch, type_index and instance_index are empty for virtual tasks).
std::string trace_to_csv(const ScheduleTrace& trace);
std::string trace_to_json(const ScheduleTrace& trace);

struct MetricsRow {
  std::string dag_id;
  std::string policy;
  std::string constraint_source;  // "none", "trace:hfcfs", "trace:hbfs", "hacpa" or "file"
  std::uint64_t seed = 0;
  CampaignMetrics metrics;
};

inline constexpr const char* kMetricsHeader =
    "dag_id,policy,constraint_source,n_runs,seed,wcrt,mswcrt,msbcrt,avrt,jitter,ta_detected";

std::string metrics_row_csv(const MetricsRow& row);
std::string metrics_to_csv(const std::vector<MetricsRow>& rows);
std::string metrics_to_json(const std::vector<MetricsRow>& rows);
/// Decimal avrt/jitter fields are read back as exact rationals.
std::vector<MetricsRow> parse_metrics_csv(const std::string& text, const std::string& source = "<metrics>");

struct ManifestRow {
  std::string dag_id;
  std::uint64_t seed = 0;
  std::size_t n_nodes = 0;
  double p = 0;
  int config = 0;
};

inline constexpr const char* kManifestHeader = "dag_id,seed,n_nodes,p,config";

std::string manifest_to_csv(const std::vector<ManifestRow>& rows);
std::vector<ManifestRow> parse_manifest_csv(const std::string& text, const std::string& source = "<manifest>");

/// Exact value of a decimal literal such as "-12.0625".
Rational parse_decimal(const std::string& text);

}  // namespace tasched::io
