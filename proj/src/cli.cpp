#include "tasched/cli.hpp"

#include "tasched/analysis.hpp"
#include "tasched/dag_gen.hpp"
#include "tasched/io.hpp"
#include "tasched/rng.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

namespace tasched::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Input validation problems (exit 1), as opposed to usage errors (exit 2).
struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SystemArgs {
  std::string dag_path;
  std::string catalog_path;
  int config = 0;
  Ticks tick_scale = 1;
};

struct PolicyArgs {
  std::string policy = "hfcfs";
  std::string constraint_path;
  std::string constraint_source;
};

void add_system_options(CLI::App& cmd, SystemArgs& a) {
  cmd.add_option("--dag", a.dag_path, "DAG JSON file")->required();
  auto* cat = cmd.add_option("--catalog", a.catalog_path, "catalog JSON file ({\"CPU.0\":1,...})");
  auto* cfg = cmd.add_option("--config", a.config, "built-in resource configuration 1, 2 or 3")
                  ->check(CLI::Range(1, 3));
  cat->excludes(cfg);
  cmd.add_option("--tick-scale", a.tick_scale, "multiply every time value by this factor at ingest")
      ->check(CLI::PositiveNumber);
}

void add_policy_options(CLI::App& cmd, PolicyArgs& a, bool dde_only = false) {
  if (!dde_only) {
    cmd.add_option("--policy", a.policy, "hfcfs | hbfs | dde")
        ->check(CLI::IsMember({"hfcfs", "hbfs", "dde"}));
  }
  auto* file = cmd.add_option("--constraint", a.constraint_path, "execution constraint JSON file (dde)");
  auto* src = cmd.add_option("--constraint-source", a.constraint_source, "trace:hfcfs | trace:hbfs | hacpa (dde)")
                  ->check(CLI::IsMember({"trace:hfcfs", "trace:hbfs", "hacpa"}));
  file->excludes(src);
}

TaskSystem load_system(const SystemArgs& a) {
  if (a.catalog_path.empty() && a.config == 0) throw CLI::ValidationError("--catalog or --config is required");
  const ProcCatalog catalog = a.catalog_path.empty() ? resource_config(a.config) : io::load_catalog(a.catalog_path);
  if (auto p = catalog.problems(); !p.empty()) throw ValidationFailure(a.catalog_path + ": " + p.front());
  MultiTypedDag dag = io::load_dag(a.dag_path, a.tick_scale);
  auto report = validate_dag(dag, catalog);
  if (report.ok() && (!dag.source() || !dag.sink())) {
    dag = add_virtual_endpoints(dag, catalog.types());
    report = validate_dag(dag, catalog);
  }
  if (!report.ok()) {
    std::string msg = a.dag_path + ": invalid DAG";
    for (const auto& p : report.problems) msg += "\n  " + p;
    throw ValidationFailure(msg);
  }
  return TaskSystem(std::move(dag), catalog);
}

struct ResolvedPolicy {
  SchedulerPolicy policy;
  std::string constraint_source = "none";
};

ExecutionConstraint derive_constraint(const TaskSystem& system, const std::string& source) {
  if (source == "hacpa") return hacpa_schedule(system.dag(), system.catalog()).constraint;
  const auto base = source == "trace:hbfs" ? hbfs_policy(system) : hfcfs_policy(system);
  return extract_constraint(wcrt_all_wcets(system, base).trace, system.dag());
}

ResolvedPolicy resolve_policy(const TaskSystem& system, const PolicyArgs& a) {
  const auto kind = parse_policy_kind(a.policy);
  const bool has_constraint = !a.constraint_path.empty() || !a.constraint_source.empty();
  if (kind != PolicyKind::Dde) {
    if (has_constraint) throw CLI::ValidationError("--constraint/--constraint-source apply to --policy dde only");
    return {kind == PolicyKind::Hfcfs ? hfcfs_policy(system) : hbfs_policy(system), "none"};
  }
  if (!has_constraint) throw CLI::ValidationError("--policy dde needs --constraint FILE or --constraint-source");
  ExecutionConstraint c;
  std::string label;
  if (!a.constraint_path.empty()) {
    c = io::load_constraint(a.constraint_path);
    label = "file";
  } else {
    c = derive_constraint(system, a.constraint_source);
    label = a.constraint_source;
  }
  const auto report = validate_constraint(system.dag(), c);
  if (!report.ok()) {
    std::string msg = "invalid execution constraint";
    for (const auto& p : report.problems) msg += "\n  " + p;
    throw ValidationFailure(msg);
  }
  return {dde_policy(system, c), label};
}

std::uint64_t parse_seed(const std::string& text) {
  try {
    std::size_t used = 0;
    if (!text.empty() && text[0] == '-') throw std::invalid_argument("negative");
    const auto v = std::stoull(text, &used, 0);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw CLI::ValidationError("--seed must be a non-negative integer, got '" + text + "'");
  }
}

std::string default_dag_id(const std::string& path) { return fs::path(path).stem().string(); }

void emit(std::ostream& out, const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    io::write_file(path, text);
  }
}

// --- gen -------------------------------------------------------------------

struct GenArgs {
  int count = 1;
  int n_min = 10;
  int n_max = 40;
  double p = 0.1;
  int config = 2;
  double wide_ratio = 0.8;
  bool subset = false;
  std::string seed = "0";
  std::string out_dir = ".";
  std::string prefix = "dag";
};

int run_gen(const GenArgs& a, std::ostream& out) {
  const auto seed = parse_seed(a.seed);
  const auto catalog = resource_config(a.config);
  fs::create_directories(a.out_dir);
  io::write_file((fs::path(a.out_dir) / "catalog.json").string(), io::catalog_to_json(catalog));
  std::vector<io::ManifestRow> manifest;
  const int width = std::max<int>(4, static_cast<int>(std::to_string(a.count - 1).size()));
  for (int i = 0; i < a.count; ++i) {
    GenParams g;
    g.n_min = a.n_min;
    g.n_max = a.n_max;
    g.p = a.p;
    g.wide_ratio = a.wide_ratio;
    g.subset_eligibility = a.subset;
    g.seed = rng::derive(seed, "gen-dag", static_cast<std::uint64_t>(i));
    const auto dag = generate_dag(g, catalog);
    std::ostringstream id;
    id << a.prefix << '_' << std::setw(width) << std::setfill('0') << i;
    io::write_file((fs::path(a.out_dir) / (id.str() + ".json")).string(), io::dag_to_json(dag));
    std::size_t real = 0;
    for (const auto& n : dag.nodes()) real += !n.is_virtual;
    manifest.push_back({id.str(), g.seed, real, a.p, a.config});
  }
  io::write_file((fs::path(a.out_dir) / "manifest.csv").string(), io::manifest_to_csv(manifest));
  out << "wrote " << a.count << " DAGs to " << a.out_dir << "\n";
  return kExitOk;
}

// --- wcrt ------------------------------------------------------------------

struct WcrtArgs {
  SystemArgs sys;
  PolicyArgs pol;
  bool conservative = false;
  std::string trace_path;
  std::string format = "csv";
};

int run_wcrt(const WcrtArgs& a, std::ostream& out) {
  const TaskSystem system = load_system(a.sys);
  const auto rp = resolve_policy(system, a.pol);
  const auto r = wcrt_all_wcets(system, rp.policy);
  std::optional<Ticks> cons;
  if (a.conservative) {
    cons = conservative_wcrt(system, rp.policy.kind(), rp.policy.constraint());
  }
  if (!a.trace_path.empty()) {
    io::write_file(a.trace_path, a.format == "json" ? io::trace_to_json(r.trace) : io::trace_to_csv(r.trace));
  }
  if (a.format == "json") {
    json j{{"policy", rp.policy.name()}, {"constraint_source", rp.constraint_source}, {"wcrt", r.wcrt}};
    if (cons) j["conservative_wcrt"] = *cons;
    out << j.dump() << "\n";
  } else {
    out << "policy,constraint_source,wcrt" << (cons ? ",conservative_wcrt" : "") << "\n";
    out << rp.policy.name() << ',' << rp.constraint_source << ',' << r.wcrt;
    if (cons) out << ',' << *cons;
    out << "\n";
  }
  return kExitOk;
}

// --- constraints -----------------------------------------------------------

struct ConstraintArgs {
  SystemArgs sys;
  std::string method = "hacpa";
  std::string from = "hfcfs";
  std::string out_path;
};

int run_constraints(const ConstraintArgs& a, std::ostream& out, std::ostream& err) {
  const TaskSystem system = load_system(a.sys);
  ExecutionConstraint c;
  if (a.method == "hacpa") {
    const auto h = hacpa_schedule(system.dag(), system.catalog());
    c = h.constraint;
    err << "hacpa list-schedule wcrt " << h.wcrt << "\n";
  } else {
    c = derive_constraint(system, "trace:" + a.from);
  }
  emit(out, a.out_path, io::constraint_to_json(c));
  return kExitOk;
}

// --- mc --------------------------------------------------------------------

struct McArgs {
  SystemArgs sys;
  PolicyArgs pol;
  std::size_t runs = 10'000;
  std::string seed = "0";
  int jobs = 1;
  std::string dag_id;
  std::string out_path;
  std::string format = "csv";
  bool append = false;
};

int run_mc(const McArgs& a, std::ostream& out) {
  const TaskSystem system = load_system(a.sys);
  const auto rp = resolve_policy(system, a.pol);
  CampaignOptions o;
  o.n_runs = a.runs;
  o.seed = parse_seed(a.seed);
  o.jobs = a.jobs;
  io::MetricsRow row;
  row.dag_id = a.dag_id.empty() ? default_dag_id(a.sys.dag_path) : a.dag_id;
  if (row.dag_id.find(',') != std::string::npos) throw CLI::ValidationError("--dag-id must not contain commas");
  row.policy = rp.policy.name();
  row.constraint_source = rp.constraint_source;
  row.seed = o.seed;
  row.metrics = monte_carlo_campaign(system, rp.policy, o);
  if (a.format == "json") {
    emit(out, a.out_path, io::metrics_to_json({row}));
  } else if (a.append && !a.out_path.empty() && fs::exists(a.out_path) && fs::file_size(a.out_path) > 0) {
    std::ofstream f(a.out_path, std::ios::app);
    f << io::metrics_row_csv(row) << "\n";
  } else {
    emit(out, a.out_path, io::metrics_to_csv({row}));
  }
  return kExitOk;
}

// --- oracle ----------------------------------------------------------------

struct OracleArgs {
  SystemArgs sys;
  PolicyArgs pol;
  std::string grid = "endpoints+mid";
  std::uint64_t budget = 1'000'000;
  int jobs = 1;
  std::string format = "csv";
};

int run_oracle(const OracleArgs& a, std::ostream& out) {
  const TaskSystem system = load_system(a.sys);
  const auto rp = resolve_policy(system, a.pol);
  OracleOptions o;
  try {
    o.grid = parse_oracle_grid(a.grid);
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError(e.what());
  }
  o.budget = a.budget;
  o.jobs = a.jobs;
  OracleResult r;
  try {
    r = exhaustive_oracle(system, rp.policy, o);
  } catch (const std::length_error& e) {
    throw ValidationFailure(e.what());
  }
  const Ticks wcrt = wcrt_all_wcets(system, rp.policy).wcrt;
  if (a.format == "json") {
    out << json{{"policy", rp.policy.name()}, {"grid", o.grid.name}, {"run_count", r.run_count},
                {"max_rt", r.max_rt}, {"min_rt", r.min_rt}, {"wcrt", wcrt}}
               .dump()
        << "\n";
  } else {
    out << "policy,grid,run_count,max_rt,min_rt,wcrt\n"
        << rp.policy.name() << ',' << o.grid.name << ',' << r.run_count << ',' << r.max_rt << ',' << r.min_rt << ','
        << wcrt << "\n";
  }
  return kExitOk;
}

// --- dominance -------------------------------------------------------------

struct DominanceArgs {
  SystemArgs sys;
  PolicyArgs pol;
  std::string assignment_path;
  std::string format = "csv";
};

int run_dominance(const DominanceArgs& a, std::ostream& out) {
  const TaskSystem system = load_system(a.sys);
  PolicyArgs pol = a.pol;
  pol.policy = "dde";
  const auto rp = resolve_policy(system, pol);
  const auto assignment = io::load_assignment(a.assignment_path, system.task_count(), a.sys.tick_scale);
  for (TaskId t = 0; t < system.task_count(); ++t) {
    const auto& d = assignment.durations[t];
    if (!d) continue;
    const auto* o = system.option_for(t, rp.policy.eligible(t).front());
    if (*d < o->bcet || *d > o->wcet) {
      throw ValidationFailure(a.assignment_path + ": duration " + std::to_string(*d) + " of task " +
                              std::to_string(t) + " lies outside [" + std::to_string(o->bcet) + ", " +
                              std::to_string(o->wcet) + "] on its constrained type");
    }
  }
  const auto r = dominance_check(system, rp.policy, TimeSource(assignment));
  if (a.format == "json") {
    json j{{"dominated", r.dominated}};
    if (!r.dominated) j.update({{"tick", r.tick}, {"task", r.task}});
    out << j.dump() << "\n";
  } else if (r.dominated) {
    out << "Dominated\n";
  } else {
    out << "ViolationAt(tick=" << r.tick << ", task=" << r.task << ")\n";
  }
  return r.dominated ? kExitOk : kExitValidation;
}

// --- report ----------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> inputs;
  bool ta_only = false;
  std::string ravrt_path;
  std::string format = "csv";
};

std::string policy_label(const io::MetricsRow& r) {
  return r.constraint_source == "none" ? r.policy : r.policy + "[" + r.constraint_source + "]";
}

int run_report(const ReportArgs& a, std::ostream& out) {
  // label -> dag_id -> row
  std::map<std::string, std::map<std::string, io::MetricsRow>> table;
  std::set<std::string> ta_dags;
  for (const auto& path : a.inputs) {
    for (auto& row : io::parse_metrics_csv(io::read_file(path), path)) {
      if (row.metrics.ta_detected) ta_dags.insert(row.dag_id);
      table[policy_label(row)][row.dag_id] = std::move(row);
    }
  }
  json summary = json::array();
  std::ostringstream csv, ravrt;
  csv << "x,y,n,ARA,SRA\n";
  ravrt << "dag_id,x,y,avrt_x,avrt_y,ravrt\n";
  for (auto ix = table.begin(); ix != table.end(); ++ix) {
    for (auto iy = std::next(ix); iy != table.end(); ++iy) {
      std::vector<Rational> xs, ys;
      for (const auto& [dag, rx] : ix->second) {
        const auto it = iy->second.find(dag);
        if (it == iy->second.end()) continue;
        if (a.ta_only && !ta_dags.count(dag)) continue;
        xs.push_back(rx.metrics.avrt);
        ys.push_back(it->second.metrics.avrt);
        ravrt << dag << ',' << ix->first << ',' << iy->first << ',' << format_decimal(rx.metrics.avrt) << ','
              << format_decimal(it->second.metrics.avrt) << ','
              << (ys.back() == 0 ? std::string("nan") : format_decimal(xs.back() / ys.back())) << "\n";
      }
      if (xs.empty()) continue;
      RatioSummary s;
      try {
        s = ratio_summary(xs, ys);
      } catch (const std::invalid_argument& e) {
        throw ValidationFailure(e.what());
      }
      csv << ix->first << ',' << iy->first << ',' << s.n << ',' << format_decimal(s.ara) << ','
          << format_decimal(s.sra) << "\n";
      summary.push_back({{"x", ix->first}, {"y", iy->first}, {"n", s.n}, {"ARA", format_decimal(s.ara)},
                         {"SRA", format_decimal(s.sra)}});
    }
  }
  out << (a.format == "json" ? summary.dump(1) + "\n" : csv.str());
  if (!a.ravrt_path.empty()) io::write_file(a.ravrt_path, ravrt.str());
  return kExitOk;
}

}  // namespace

int cmd_execute(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation and analysis of non-preemptive multi-typed DAG scheduling"};
  app.name("tasched");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto add_format = [](CLI::App* cmd, std::string& format) {
    cmd->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  };
  auto add_seed = [](CLI::App* cmd, std::string& seed) {
    cmd->add_option("--seed", seed, "root seed (default: $TASCHED_SEED or 0)")->envname("TASCHED_SEED");
  };

  GenArgs gen;
  auto* c_gen = app.add_subcommand("gen", "generate random G(n,p) multi-typed DAGs");
  c_gen->add_option("--count", gen.count, "number of DAGs")->check(CLI::PositiveNumber);
  c_gen->add_option("--n-min", gen.n_min, "smallest node count");
  c_gen->add_option("--n-max", gen.n_max, "largest node count");
  c_gen->add_option("--p", gen.p, "edge probability")->check(CLI::Range(0.0, 1.0));
  c_gen->add_option("--config", gen.config, "resource configuration 1, 2 or 3")->check(CLI::Range(1, 3));
  c_gen->add_option("--wide-ratio", gen.wide_ratio, "share of nodes with wide execution intervals");
  c_gen->add_flag("--subset-eligibility", gen.subset, "interior nodes get a random subset of types");
  add_seed(c_gen, gen.seed);
  c_gen->add_option("--out-dir", gen.out_dir, "output directory");
  c_gen->add_option("--prefix", gen.prefix, "DAG id prefix");

  WcrtArgs wcrt;
  auto* c_wcrt = app.add_subcommand("wcrt", "all-WCETs response time");
  add_system_options(*c_wcrt, wcrt.sys);
  add_policy_options(*c_wcrt, wcrt.pol);
  c_wcrt->add_flag("--conservative", wcrt.conservative, "also report the slowest-type-per-architecture estimate");
  c_wcrt->add_option("--trace", wcrt.trace_path, "write the all-WCETs trace here");
  add_format(c_wcrt, wcrt.format);

  ConstraintArgs cons;
  auto* c_cons = app.add_subcommand("constraints", "derive an execution constraint");
  add_system_options(*c_cons, cons.sys);
  c_cons->add_option("--method", cons.method, "trace | hacpa")->check(CLI::IsMember({"trace", "hacpa"}));
  c_cons->add_option("--from", cons.from, "baseline whose all-WCETs trace is used (trace method)")
      ->check(CLI::IsMember({"hfcfs", "hbfs"}));
  c_cons->add_option("--out", cons.out_path, "output file (default stdout)");

  McArgs mc;
  auto* c_mc = app.add_subcommand("mc", "Monte Carlo campaign over random execution times");
  add_system_options(*c_mc, mc.sys);
  add_policy_options(*c_mc, mc.pol);
  c_mc->add_option("--runs", mc.runs, "number of online runs")->check(CLI::PositiveNumber);
  add_seed(c_mc, mc.seed);
  c_mc->add_option("--jobs", mc.jobs, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  c_mc->add_option("--dag-id", mc.dag_id, "id written to the metrics row (default: DAG file stem)");
  c_mc->add_option("--out", mc.out_path, "metrics CSV file (default stdout)");
  c_mc->add_flag("--append", mc.append, "append the row to an existing metrics CSV");
  add_format(c_mc, mc.format);

  OracleArgs orc;
  auto* c_orc = app.add_subcommand("oracle", "exhaustive grid enumeration of execution times");
  add_system_options(*c_orc, orc.sys);
  add_policy_options(*c_orc, orc.pol);
  c_orc->add_option("--grid", orc.grid, "endpoints | endpoints+mid | uniform:K");
  c_orc->add_option("--budget", orc.budget, "maximum number of runs")->check(CLI::PositiveNumber);
  c_orc->add_option("--jobs", orc.jobs, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  add_format(c_orc, orc.format);

  DominanceArgs dom;
  auto* c_dom = app.add_subcommand("dominance", "per-cycle dominance of the all-WCETs DDE run");
  add_system_options(*c_dom, dom.sys);
  add_policy_options(*c_dom, dom.pol, true);
  c_dom->add_option("--assignment", dom.assignment_path, "JSON {\"durations\":{\"task\":ticks}}")->required();
  add_format(c_dom, dom.format);

  ReportArgs rep;
  auto* c_rep = app.add_subcommand("report", "ARA/SRA tables from metrics CSV files");
  c_rep->add_option("--in", rep.inputs, "metrics CSV files")->required()->expected(1, -1);
  c_rep->add_flag("--ta-only", rep.ta_only, "only DAGs where some row detected a timing anomaly");
  c_rep->add_option("--ravrt-out", rep.ravrt_path, "per-DAG AVRT ratio CSV");
  add_format(c_rep, rep.format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (e.get_exit_code() == 0) return kExitOk;
    err << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (c_gen->parsed()) return run_gen(gen, out);
    if (c_wcrt->parsed()) return run_wcrt(wcrt, out);
    if (c_cons->parsed()) return run_constraints(cons, out, err);
    if (c_mc->parsed()) return run_mc(mc, out);
    if (c_orc->parsed()) return run_oracle(orc, out);
    if (c_dom->parsed()) return run_dominance(dom, out);
    if (c_rep->parsed()) return run_report(rep, out);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const io::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ValidationFailure& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}

int cmd_execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"tasched"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return cmd_execute(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace tasched::cli
