#include "tasched/io.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace tasched::io {

using nlohmann::json;

namespace {

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is one past the offending character.
    const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string what = e.what();
    const auto pos = what.find("syntax error");
    throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " +
                     (pos == std::string::npos ? what : what.substr(pos)));
  }
}

[[noreturn]] void fail(const std::string& source, const std::string& where, const std::string& msg) {
  throw ParseError(source + ": at " + (where.empty() ? "/" : where) + ": " + msg);
}

const json& field(const json& obj, const char* key, const std::string& source, const std::string& where) {
  if (!obj.is_object()) fail(source, where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(source, where, std::string("missing field \"") + key + "\"");
  return *it;
}

std::int64_t as_int(const json& v, const std::string& source, const std::string& where) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d) return static_cast<std::int64_t>(d);
  }
  fail(source, where, "expected an integer");
}

Ticks as_ticks(const json& v, Ticks scale, const std::string& source, const std::string& where) {
  if (!v.is_number()) fail(source, where, "expected a number");
  if (v.is_number_integer()) return v.get<Ticks>() * scale;
  const double scaled = v.get<double>() * static_cast<double>(scale);
  const double rounded = std::round(scaled);
  if (std::abs(scaled - rounded) > 1e-9) {
    fail(source, where, "value " + v.dump() + " is not a whole number of ticks at tick scale " + std::to_string(scale) +
                            " (try --tick-scale)");
  }
  return static_cast<Ticks>(rounded);
}

TaskId as_task_key(const std::string& key, const std::string& source, const std::string& where) {
  std::size_t used = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(key, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != key.size()) fail(source, where, "task key \"" + key + "\" is not a task id");
  return static_cast<TaskId>(v);
}

ProcTypeId as_type(const std::string& key, const std::string& source, const std::string& where) {
  try {
    return ProcTypeId::parse(key);
  } catch (const std::exception& e) {
    fail(source, where, e.what());
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::vector<std::string>> read_csv(const std::string& text, const std::string& header,
                                               const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  const auto want = split(header, ',');
  std::vector<std::vector<std::string>> rows;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (!seen_header) {
      if (cells != want) throw ParseError(source + ":" + std::to_string(line_no) + ": expected header " + header);
      seen_header = true;
      continue;
    }
    if (cells.size() != want.size()) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(want.size()) +
                       " fields, found " + std::to_string(cells.size()));
    }
    cells.push_back(std::to_string(line_no));
    rows.push_back(std::move(cells));
  }
  if (!seen_header) throw ParseError(source + ": empty file, expected header " + header);
  return rows;
}

template <typename T, typename F>
T cell(const std::vector<std::string>& row, std::size_t i, const std::string& source, const char* name, F conv) {
  try {
    std::size_t used = 0;
    T v = conv(row[i], &used);
    if (used != row[i].size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError(source + ":" + row.back() + ": bad " + name + " \"" + row[i] + "\"");
  }
}

std::uint64_t to_u64(const std::string& s, std::size_t* used) {
  if (!s.empty() && s[0] == '-') throw std::invalid_argument("negative");
  return std::stoull(s, used);
}
Ticks to_ticks(const std::string& s, std::size_t* used) { return std::stoll(s, used); }
double to_double_cell(const std::string& s, std::size_t* used) { return std::stod(s, used); }
int to_int(const std::string& s, std::size_t* used) { return std::stoi(s, used); }

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot write file");
  out << text;
  if (!out) throw std::runtime_error(path + ": write failed");
}

// --- DAG -------------------------------------------------------------------

MultiTypedDag parse_dag(const std::string& text, const std::string& source, Ticks tick_scale) {
  if (tick_scale < 1) throw std::invalid_argument("tick scale must be positive");
  const json doc = parse_json(text, source);
  const json& jnodes = field(doc, "nodes", source, "");
  if (!jnodes.is_array()) fail(source, "/nodes", "expected an array");
  std::vector<TaskNode> nodes;
  for (std::size_t i = 0; i < jnodes.size(); ++i) {
    const std::string at = "/nodes/" + std::to_string(i);
    const json& jn = jnodes[i];
    TaskNode n;
    const auto id = as_int(field(jn, "id", source, at), source, at + "/id");
    if (id < 0) fail(source, at + "/id", "negative id");
    n.id = static_cast<TaskId>(id);
    if (auto it = jn.find("virtual"); it != jn.end()) {
      if (!it->is_boolean()) fail(source, at + "/virtual", "expected true or false");
      n.is_virtual = it->get<bool>();
    }
    const json& jel = field(jn, "eligible", source, at);
    if (!jel.is_array()) fail(source, at + "/eligible", "expected an array");
    for (std::size_t k = 0; k < jel.size(); ++k) {
      const std::string ek = at + "/eligible/" + std::to_string(k);
      if (jel[k].is_string()) {
        n.eligible.push_back(as_type(jel[k].get<std::string>(), source, ek));
        continue;
      }
      const json& arch = field(jel[k], "arch", source, ek);
      if (!arch.is_string() || arch.get<std::string>().empty()) fail(source, ek + "/arch", "expected a name");
      const auto type = as_int(field(jel[k], "type", source, ek), source, ek + "/type");
      n.eligible.push_back(ProcTypeId{arch.get<std::string>(), static_cast<int>(type)});
    }
    const json& jiv = field(jn, "intervals", source, at);
    if (!jiv.is_object()) fail(source, at + "/intervals", "expected an object");
    for (const auto& [key, val] : jiv.items()) {
      const std::string ik = at + "/intervals/" + key;
      if (!val.is_array() || val.size() != 2) fail(source, ik, "expected [bcet, wcet]");
      n.intervals[as_type(key, source, ik)] =
          ExecInterval{as_ticks(val[0], tick_scale, source, ik + "/0"), as_ticks(val[1], tick_scale, source, ik + "/1")};
    }
    nodes.push_back(std::move(n));
  }
  std::vector<std::pair<TaskId, TaskId>> edges;
  if (auto it = doc.find("edges"); it != doc.end()) {
    if (!it->is_array()) fail(source, "/edges", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string at = "/edges/" + std::to_string(i);
      const json& e = (*it)[i];
      if (!e.is_array() || e.size() != 2) fail(source, at, "expected [from, to]");
      const auto u = as_int(e[0], source, at + "/0");
      const auto v = as_int(e[1], source, at + "/1");
      if (u < 0 || v < 0) fail(source, at, "negative task id");
      edges.emplace_back(static_cast<TaskId>(u), static_cast<TaskId>(v));
    }
  }
  // Nodes may be listed in any order; ids must be dense.
  std::sort(nodes.begin(), nodes.end(), [](const TaskNode& a, const TaskNode& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id != i) fail(source, "/nodes", "task ids must be exactly 0.." + std::to_string(nodes.size() - 1));
  }
  try {
    return MultiTypedDag(std::move(nodes), std::move(edges));
  } catch (const std::out_of_range& e) {
    fail(source, "/edges", e.what());
  }
}

std::string dag_to_json(const MultiTypedDag& dag) {
  // One node per line, keys in a fixed order.
  std::ostringstream out;
  out << "{\"nodes\":[";
  for (std::size_t i = 0; i < dag.size(); ++i) {
    const auto& n = dag.node(static_cast<TaskId>(i));
    nlohmann::ordered_json jn;
    jn["id"] = n.id;
    jn["eligible"] = nlohmann::ordered_json::array();
    for (const auto& t : n.eligible) jn["eligible"].push_back({{"arch", t.architecture}, {"type", t.type_index}});
    jn["intervals"] = nlohmann::ordered_json::object();
    for (const auto& [t, iv] : n.intervals) jn["intervals"][t.key()] = {iv.bcet, iv.wcet};
    if (n.is_virtual) jn["virtual"] = true;
    out << (i ? ",\n " : "\n ") << jn.dump();
  }
  out << "\n],\n\"edges\":[";
  for (std::size_t i = 0; i < dag.edges().size(); ++i) {
    const auto& [u, v] = dag.edges()[i];
    out << (i ? "," : "") << '[' << u << ',' << v << ']';
  }
  out << "]}\n";
  return out.str();
}

MultiTypedDag load_dag(const std::string& path, Ticks tick_scale) {
  return parse_dag(read_file(path), path, tick_scale);
}

// --- catalog ---------------------------------------------------------------

ProcCatalog parse_catalog(const std::string& text, const std::string& source) {
  const json doc = parse_json(text, source);
  if (!doc.is_object()) fail(source, "", "expected an object of type -> instance count");
  std::map<ProcTypeId, int> counts;
  for (const auto& [key, val] : doc.items()) {
    const auto n = as_int(val, source, "/" + key);
    if (n < 1) fail(source, "/" + key, "instance count must be positive");
    counts[as_type(key, source, "/" + key)] = static_cast<int>(n);
  }
  if (counts.empty()) fail(source, "", "catalog has no types");
  return ProcCatalog(std::move(counts));
}

std::string catalog_to_json(const ProcCatalog& catalog) {
  json doc = json::object();
  for (const auto& [t, n] : catalog.counts()) doc[t.key()] = n;
  return doc.dump() + "\n";
}

ProcCatalog load_catalog(const std::string& path) { return parse_catalog(read_file(path), path); }

// --- constraint ------------------------------------------------------------

ExecutionConstraint parse_constraint(const std::string& text, const std::string& source) {
  const json doc = parse_json(text, source);
  ExecutionConstraint c;
  const json& order = field(doc, "order", source, "");
  if (!order.is_array()) fail(source, "/order", "expected an array");
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto t = as_int(order[i], source, "/order/" + std::to_string(i));
    if (t < 0) fail(source, "/order/" + std::to_string(i), "negative task id");
    c.order.push_back(static_cast<TaskId>(t));
  }
  const json& alloc = field(doc, "alloc", source, "");
  if (!alloc.is_object()) fail(source, "/alloc", "expected an object");
  for (const auto& [key, val] : alloc.items()) {
    if (!val.is_string()) fail(source, "/alloc/" + key, "expected a type such as \"CPU.0\"");
    c.alloc[as_task_key(key, source, "/alloc/" + key)] = as_type(val.get<std::string>(), source, "/alloc/" + key);
  }
  return c;
}

std::string constraint_to_json(const ExecutionConstraint& constraint) {
  json alloc = json::object();
  for (const auto& [t, type] : constraint.alloc) alloc[std::to_string(t)] = type.key();
  return json{{"order", constraint.order}, {"alloc", alloc}}.dump() + "\n";
}

ExecutionConstraint load_constraint(const std::string& path) { return parse_constraint(read_file(path), path); }

// --- assignment ------------------------------------------------------------

FixedDurations parse_assignment(const std::string& text, std::size_t task_count, const std::string& source,
                                Ticks tick_scale) {
  const json doc = parse_json(text, source);
  const json& d = field(doc, "durations", source, "");
  if (!d.is_object()) fail(source, "/durations", "expected an object of task -> duration");
  FixedDurations out;
  out.durations.resize(task_count);
  for (const auto& [key, val] : d.items()) {
    const std::string at = "/durations/" + key;
    const TaskId t = as_task_key(key, source, at);
    if (t >= task_count) fail(source, at, "unknown task " + key);
    const Ticks v = as_ticks(val, tick_scale, source, at);
    if (v < 0) fail(source, at, "negative duration");
    out.durations[t] = v;
  }
  return out;
}

FixedDurations load_assignment(const std::string& path, std::size_t task_count, Ticks tick_scale) {
  return parse_assignment(read_file(path), task_count, path, tick_scale);
}

// --- traces ----------------------------------------------------------------

std::string trace_to_csv(const ScheduleTrace& trace) {
  std::ostringstream out;
  out << "task_id,start_tick,finish_tick,arch,type_index,instance_index,alloc_es_time\n";
  for (std::size_t t = 0; t < trace.entries.size(); ++t) {
    const auto& e = trace.entries[t];
    out << t << ',' << e.start << ',' << e.finish << ',';
    if (e.instance) {
      out << e.instance->type.architecture << ',' << e.instance->type.type_index << ',' << e.instance->index;
    } else {
      out << ",,";
    }
    out << ',' << e.alloc_es_time << '\n';
  }
  return out.str();
}

std::string trace_to_json(const ScheduleTrace& trace) {
  json rows = json::array();
  for (std::size_t t = 0; t < trace.entries.size(); ++t) {
    const auto& e = trace.entries[t];
    json row{{"task_id", t}, {"start_tick", e.start}, {"finish_tick", e.finish}, {"alloc_es_time", e.alloc_es_time}};
    if (e.instance) {
      row["arch"] = e.instance->type.architecture;
      row["type_index"] = e.instance->type.type_index;
      row["instance_index"] = e.instance->index;
    }
    if (e.is_virtual) row["virtual"] = true;
    rows.push_back(std::move(row));
  }
  return rows.dump(1) + "\n";
}

// --- metrics ---------------------------------------------------------------

Rational parse_decimal(const std::string& text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) negative = text[i++] == '-';
  boost::multiprecision::cpp_int num = 0, den = 1;
  bool digits = false, dot = false;
  for (; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch == '.' && !dot) {
      dot = true;
      continue;
    }
    if (ch < '0' || ch > '9') throw std::invalid_argument("not a decimal: \"" + text + "\"");
    digits = true;
    num = num * 10 + (ch - '0');
    if (dot) den *= 10;
  }
  if (!digits) throw std::invalid_argument("not a decimal: \"" + text + "\"");
  Rational r(num, den);
  return negative ? Rational(-r) : r;
}

std::string metrics_row_csv(const MetricsRow& row) {
  const auto& m = row.metrics;
  std::ostringstream out;
  out << row.dag_id << ',' << row.policy << ',' << row.constraint_source << ',' << m.n_runs << ',' << row.seed << ','
      << m.wcrt << ',' << m.mswcrt << ',' << m.msbcrt << ',' << format_decimal(m.avrt) << ','
      << format_decimal(m.jitter) << ',' << (m.ta_detected ? "true" : "false");
  return out.str();
}

std::string metrics_to_csv(const std::vector<MetricsRow>& rows) {
  std::string out = std::string(kMetricsHeader) + "\n";
  for (const auto& r : rows) out += metrics_row_csv(r) + "\n";
  return out;
}

std::string metrics_to_json(const std::vector<MetricsRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    arr.push_back({{"dag_id", r.dag_id},
                   {"policy", r.policy},
                   {"constraint_source", r.constraint_source},
                   {"n_runs", m.n_runs},
                   {"seed", r.seed},
                   {"wcrt", m.wcrt},
                   {"mswcrt", m.mswcrt},
                   {"msbcrt", m.msbcrt},
                   {"avrt", format_decimal(m.avrt)},
                   {"jitter", format_decimal(m.jitter)},
                   {"ta_detected", m.ta_detected}});
  }
  return arr.dump(1) + "\n";
}

std::vector<MetricsRow> parse_metrics_csv(const std::string& text, const std::string& source) {
  std::vector<MetricsRow> out;
  for (const auto& row : read_csv(text, kMetricsHeader, source)) {
    MetricsRow r;
    r.dag_id = row[0];
    r.policy = row[1];
    r.constraint_source = row[2];
    r.metrics.n_runs = cell<std::uint64_t>(row, 3, source, "n_runs", to_u64);
    r.seed = cell<std::uint64_t>(row, 4, source, "seed", to_u64);
    r.metrics.wcrt = cell<Ticks>(row, 5, source, "wcrt", to_ticks);
    r.metrics.mswcrt = cell<Ticks>(row, 6, source, "mswcrt", to_ticks);
    r.metrics.msbcrt = cell<Ticks>(row, 7, source, "msbcrt", to_ticks);
    auto dec = [&](std::size_t i, const char* name) {
      try {
        return parse_decimal(row[i]);
      } catch (const std::exception&) {
        throw ParseError(source + ":" + row.back() + ": bad " + name + " \"" + row[i] + "\"");
      }
    };
    r.metrics.avrt = dec(8, "avrt");
    r.metrics.jitter = dec(9, "jitter");
    if (row[10] != "true" && row[10] != "false") {
      throw ParseError(source + ":" + row.back() + ": ta_detected must be true or false");
    }
    r.metrics.ta_detected = row[10] == "true";
    out.push_back(std::move(r));
  }
  return out;
}

// --- manifest --------------------------------------------------------------

std::string manifest_to_csv(const std::vector<ManifestRow>& rows) {
  std::ostringstream out;
  out << kManifestHeader << '\n';
  for (const auto& r : rows) {
    out << r.dag_id << ',' << r.seed << ',' << r.n_nodes << ',' << r.p << ',' << r.config << '\n';
  }
  return out.str();
}

std::vector<ManifestRow> parse_manifest_csv(const std::string& text, const std::string& source) {
  std::vector<ManifestRow> out;
  for (const auto& row : read_csv(text, kManifestHeader, source)) {
    ManifestRow r;
    r.dag_id = row[0];
    r.seed = cell<std::uint64_t>(row, 1, source, "seed", to_u64);
    r.n_nodes = cell<std::uint64_t>(row, 2, source, "n_nodes", to_u64);
    r.p = cell<double>(row, 3, source, "p", to_double_cell);
    r.config = cell<int>(row, 4, source, "config", to_int);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace tasched::io
