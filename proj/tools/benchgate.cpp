// benchgate: suite optimization, change detection, and plan generation for
// continuous benchmarking. Subcommands: optimize, analyze, plan rmit,
// plan duet, simulate, report.
//
// Exit codes: 0 clean, 1 definite regression detected (CI gate), 2 usage or
// validation error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "benchgate/bootstrap.hpp"
#include "benchgate/callgraph.hpp"
#include "benchgate/detection.hpp"
#include "benchgate/errors.hpp"
#include "benchgate/measurements.hpp"
#include "benchgate/reporting.hpp"
#include "benchgate/scheduler.hpp"
#include "benchgate/simulator.hpp"
#include "benchgate/suite_optimizer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;

  std::string scenario_path;                // simulate
  std::vector<std::string> suite_override;  // plan rmit
  std::string base_ref, variation_ref;      // plan duet
  std::string workload_preset;              // plan duet
  std::string reports_path;                 // report
  std::string detections_path;              // report
};

struct ProjectConfig {
  fs::path dir;  // directory of the config file; relative paths resolve here
  json doc = json::object();

  fs::path resolve(const std::string& path) const {
    fs::path p(path);
    return p.is_absolute() ? p : dir / p;
  }
};

ProjectConfig load_config(const CliOptions& opts, bool required) {
  ProjectConfig config;
  if (opts.config_path.empty()) {
    if (required)
      throw benchgate::ValidationError("this command needs --config <file>");
    config.dir = fs::current_path();
    return config;
  }
  std::ifstream in(opts.config_path);
  if (!in)
    throw benchgate::ParseError("cannot open config " + opts.config_path);
  try {
    in >> config.doc;
  } catch (const json::exception& e) {
    throw benchgate::ParseError("bad config JSON in " + opts.config_path + ": " +
                                e.what());
  }
  if (!config.doc.is_object())
    throw benchgate::ParseError("config root must be a JSON object");
  config.dir = fs::absolute(fs::path(opts.config_path)).parent_path();
  return config;
}

fs::path output_dir(const ProjectConfig& config, const CliOptions& opts) {
  fs::path dir;
  if (!opts.out_dir.empty())
    dir = opts.out_dir;
  else if (config.doc.contains("output_dir"))
    dir = config.resolve(config.doc.at("output_dir").get<std::string>());
  else
    dir = "out";
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw benchgate::Error("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw benchgate::Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

benchgate::GraphFormat graph_format(const fs::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".json") return benchgate::GraphFormat::json;
  if (ext == ".csv") return benchgate::GraphFormat::edge_csv;
  throw benchgate::ParseError("cannot infer call graph format from '" +
                              path.string() + "'");
}

benchgate::OptimizerConfig optimizer_config(const json& doc) {
  benchgate::OptimizerConfig cfg;
  if (doc.contains("optimizer")) {
    const json& section = doc.at("optimizer");
    cfg.min_gain = section.value("min_gain", cfg.min_gain);
    if (section.contains("top_k") && !section.at("top_k").is_null())
      cfg.top_k = section.at("top_k").get<std::size_t>();
  }
  cfg.validate();
  return cfg;
}

benchgate::BootstrapConfig bootstrap_config(const json& doc,
                                            const CliOptions& opts) {
  benchgate::BootstrapConfig cfg;
  if (doc.contains("bootstrap")) {
    const json& section = doc.at("bootstrap");
    cfg.samples = section.value("samples", cfg.samples);
    cfg.alpha = section.value("alpha", cfg.alpha);
    cfg.rng_seed = section.value("rng_seed", cfg.rng_seed);
    if (section.contains("scheme"))
      cfg.scheme = benchgate::resample_scheme_from_string(
          section.at("scheme").get<std::string>());
  }
  if (opts.seed) cfg.rng_seed = *opts.seed;
  cfg.validate();
  return cfg;
}

benchgate::DetectorConfig detector_config(const json& doc) {
  benchgate::DetectorConfig cfg;
  if (doc.contains("detector")) {
    const json& section = doc.at("detector");
    cfg.threshold_factor = section.value("threshold_factor", cfg.threshold_factor);
    cfg.min_threshold_pct =
        section.value("min_threshold_pct", cfg.min_threshold_pct);
    cfg.instability_window =
        section.value("instability_window", cfg.instability_window);
    cfg.trend_window = section.value("trend_window", cfg.trend_window);
    cfg.initial_threshold_default_pct = section.value(
        "initial_threshold_default_pct", cfg.initial_threshold_default_pct);
    if (section.contains("initial_threshold_pct"))
      cfg.initial_threshold_pct =
          section.at("initial_threshold_pct")
              .get<std::map<std::string, double>>();
    cfg.round_initial_to_whole_pct = section.value("round_initial_to_whole_pct",
                                                   cfg.round_initial_to_whole_pct);
  }
  cfg.validate();
  return cfg;
}

benchgate::TrimConfig trim_config(const json& doc) {
  benchgate::TrimConfig cfg;
  if (doc.contains("trim")) {
    const json& section = doc.at("trim");
    cfg.head_frac = section.value("head_frac", cfg.head_frac);
    cfg.tail_frac = section.value("tail_frac", cfg.tail_frac);
  }
  return cfg;
}

benchgate::CallGraph load_app_graph(const ProjectConfig& config) {
  if (!config.doc.contains("app_callgraph"))
    throw benchgate::ValidationError("config is missing 'app_callgraph'");
  fs::path path =
      config.resolve(config.doc.at("app_callgraph").get<std::string>());
  return benchgate::load_callgraph(path, graph_format(path));
}

std::vector<benchgate::CallGraph> load_micro_graphs(const ProjectConfig& config) {
  if (!config.doc.contains("micro_callgraphs"))
    throw benchgate::ValidationError("config is missing 'micro_callgraphs'");
  std::vector<benchgate::CallGraph> graphs;
  for (const auto& entry : config.doc.at("micro_callgraphs")) {
    fs::path path = config.resolve(entry.get<std::string>());
    graphs.push_back(benchgate::load_callgraph(path, graph_format(path)));
  }
  if (graphs.empty())
    throw benchgate::ValidationError("config lists no microbenchmark call graphs");
  return graphs;
}

int cmd_optimize(const CliOptions& opts) {
  ProjectConfig config = load_config(opts, true);
  benchgate::CallGraph app = load_app_graph(config);
  std::vector<benchgate::CallGraph> micros = load_micro_graphs(config);
  benchgate::OptimizedSuite suite =
      benchgate::optimize(app, micros, optimizer_config(config.doc));

  const fs::path out = output_dir(config, opts);
  write_json(out / "suite.json", benchgate::suite_to_json(suite));
  const std::string table = benchgate::suite_table(suite);
  write_text(out / "suite.txt", table);
  std::cout << table;
  return 0;
}

int cmd_analyze(const CliOptions& opts) {
  ProjectConfig config = load_config(opts, true);
  if (!config.doc.contains("manifest"))
    throw benchgate::ValidationError("config is missing 'manifest'");
  benchgate::CommitSeries series = benchgate::load_commit_series(
      config.resolve(config.doc.at("manifest").get<std::string>()));

  benchgate::AnalysisResult result = benchgate::analyze_series(
      series, detector_config(config.doc), bootstrap_config(config.doc, opts),
      trim_config(config.doc));

  // Detections rank by how much application time the flagging benchmark
  // touches; only metrics with configured call graphs get a value.
  std::map<std::string, double> impacts;
  if (config.doc.contains("app_callgraph") &&
      config.doc.contains("micro_callgraphs")) {
    benchgate::CallGraph app = load_app_graph(config);
    for (const benchgate::CallGraph& micro : load_micro_graphs(config))
      impacts[micro.origin().id] = benchgate::reference_impact(app, micro);
  }

  const fs::path out = output_dir(config, opts);
  write_text(out / "reports.csv", benchgate::reports_to_csv(result.reports));
  write_json(out / "reports.json", benchgate::reports_to_json(result.reports));
  write_text(out / "detections.csv",
             benchgate::detections_to_csv(result.detections));
  write_json(out / "detections.json",
             benchgate::detections_to_json(result.detections,
                                           impacts.empty() ? nullptr : &impacts));
  write_text(out / "plot_data.csv",
             benchgate::plot_data_csv(result, series.commits()));

  std::cout << benchgate::reports_table(result.reports) << '\n'
            << benchgate::detection_summary_table(result.detections);

  bool definite_regression = false;
  for (const benchgate::Detection& d : result.detections) {
    if (d.intensity == benchgate::Intensity::definite &&
        d.direction == benchgate::Direction::up)
      definite_regression = true;
    else if (d.intensity == benchgate::Intensity::potential)
      std::cout << "warning: potential " << benchgate::to_string(d.kind) << " "
                << benchgate::to_string(d.direction) << " at " << d.commit_id
                << " (" << d.metric_id << ")\n";
  }
  return definite_regression ? 1 : 0;
}

int cmd_plan_rmit(const CliOptions& opts) {
  ProjectConfig config = load_config(opts, opts.suite_override.empty());

  std::vector<std::string> suite = opts.suite_override;
  if (suite.empty() && config.doc.contains("suite"))
    suite = config.doc.at("suite").get<std::vector<std::string>>();
  if (suite.empty() && config.doc.contains("micro_callgraphs"))
    for (const benchgate::CallGraph& graph : load_micro_graphs(config))
      suite.push_back(graph.origin().id);
  if (suite.empty())
    throw benchgate::ValidationError(
        "no suite: pass --benchmark or list 'suite' in the config");

  benchgate::RmitParams params;
  if (config.doc.contains("rmit")) {
    const json& section = config.doc.at("rmit");
    params.instance_runs = section.value("instance_runs", params.instance_runs);
    params.suite_runs = section.value("suite_runs", params.suite_runs);
    params.iterations = section.value("iterations", params.iterations);
    params.iteration_duration_s =
        section.value("iteration_duration_s", params.iteration_duration_s);
  }

  benchgate::RmitPlan plan =
      benchgate::make_rmit_plan(std::move(suite), params, opts.seed.value_or(0));
  const fs::path out = output_dir(config, opts);
  write_json(out / "rmit_plan.json", benchgate::rmit_plan_to_json(plan));
  std::cout << "rmit plan: " << plan.suite.size() << " benchmarks, "
            << plan.params.instance_runs << "x" << plan.params.suite_runs
            << " suite runs, " << plan.measurements_per_benchmark()
            << " measurements per benchmark per version\n";
  return 0;
}

benchgate::DuetWorkload workload_from_json(const json& section) {
  benchgate::DuetWorkload w;
  w.simulated_servers = section.value("simulated_servers", w.simulated_servers);
  w.sending_interval_s =
      section.value("sending_interval_s", w.sending_interval_s);
  w.simulated_duration_h =
      section.value("simulated_duration_h", w.simulated_duration_h);
  w.insert_clients = section.value("insert_clients", w.insert_clients);
  w.batch_size = section.value("batch_size", w.batch_size);
  w.batches = section.value("batches", w.batches);
  w.simple_queries = section.value("simple_queries", w.simple_queries);
  w.groupby_queries = section.value("groupby_queries", w.groupby_queries);
  w.query_clients = section.value("query_clients", w.query_clients);
  return w;
}

benchgate::DuetWorkload workload_preset(const std::string& name) {
  if (name == "victoriametrics")
    return benchgate::DuetWorkload::victoriametrics_defaults();
  if (name == "influxdb") return benchgate::DuetWorkload::influxdb_defaults();
  throw benchgate::ValidationError("unknown workload preset '" + name +
                                   "' (victoriametrics, influxdb)");
}

int cmd_plan_duet(const CliOptions& opts) {
  const bool refs_on_cli = !opts.base_ref.empty() && !opts.variation_ref.empty();
  ProjectConfig config = load_config(opts, !refs_on_cli);
  const json duet_section = config.doc.value("duet", json::object());

  std::string base_ref = opts.base_ref;
  std::string variation_ref = opts.variation_ref;
  if (base_ref.empty()) base_ref = duet_section.value("base_ref", "");
  if (variation_ref.empty())
    variation_ref = duet_section.value("variation_ref", "");

  benchgate::DuetWorkload workload;
  if (!opts.workload_preset.empty())
    workload = workload_preset(opts.workload_preset);
  else if (duet_section.contains("workload") &&
           duet_section.at("workload").is_string())
    workload = workload_preset(duet_section.at("workload").get<std::string>());
  else if (duet_section.contains("workload"))
    workload = workload_from_json(duet_section.at("workload"));
  else
    workload = benchgate::DuetWorkload::victoriametrics_defaults();

  benchgate::DuetPlan plan = benchgate::make_duet_plan(
      std::move(base_ref), std::move(variation_ref), workload,
      duet_section.value("repetitions", std::size_t{3}));
  if (plan.aa)
    std::cerr << "warning: base and variation refs are identical, planning an "
                 "A/A noise-floor run\n";

  const fs::path out = output_dir(config, opts);
  write_json(out / "duet_plan.json", benchgate::duet_plan_to_json(plan));
  std::cout << "duet plan: " << plan.base_ref << " vs " << plan.variation_ref
            << ", " << plan.repetitions << " repetitions, "
            << plan.workload.batches << " insert batches\n";
  return 0;
}

int cmd_simulate(const CliOptions& opts) {
  ProjectConfig config = load_config(opts, false);

  std::ifstream in(opts.scenario_path);
  if (!in)
    throw benchgate::ParseError("cannot open scenario " + opts.scenario_path);
  json scenario_doc;
  try {
    in >> scenario_doc;
  } catch (const json::exception& e) {
    throw benchgate::ParseError("bad scenario JSON in " + opts.scenario_path +
                                ": " + e.what());
  }
  benchgate::SimScenario scenario = benchgate::scenario_from_json(scenario_doc);
  if (opts.seed) scenario.seed = *opts.seed;

  benchgate::LabeledHistory history = benchgate::generate_history(scenario);
  benchgate::DetectorScore score = benchgate::evaluate_detector(
      history, detector_config(config.doc), bootstrap_config(config.doc, opts));

  const fs::path out = output_dir(config, opts);
  std::vector<benchgate::MeasurementSet> sets;
  for (const std::string& metric : history.series.micro_metric_ids())
    for (const auto& [idx, pair] : history.series.micro_series(metric)) {
      sets.push_back(pair.base);
      sets.push_back(pair.variation);
    }
  benchgate::write_micro_measurements(out / "sim_measurements.csv", sets,
                                      benchgate::MeasurementFormat::csv);
  benchgate::write_manifest(out / "sim_manifest.json",
                            history.series.project_id(),
                            history.series.base_commit_id(),
                            history.series.commits(), {"sim_measurements.csv"},
                            {});

  json evaluation{
      {"precision", score.precision},
      {"recall", score.recall},
      {"jump",
       {{"true_positives", score.jump.true_positives},
        {"false_positives", score.jump.false_positives},
        {"false_negatives", score.jump.false_negatives}}},
      {"trend",
       {{"true_positives", score.trend.true_positives},
        {"false_positives", score.trend.false_positives},
        {"false_negatives", score.trend.false_negatives}}},
      {"flagged_commits", score.flagged_commits},
      {"total_commits", score.total_commits}};
  write_json(out / "sim_evaluation.json", evaluation);
  std::cout << "simulated " << score.total_commits << " commits: precision "
            << score.precision << ", recall " << score.recall << ", flagged "
            << score.flagged_commits << " commits\n";
  return 0;
}

int cmd_report(const CliOptions& opts) {
  if (opts.reports_path.empty() && opts.detections_path.empty())
    throw benchgate::ValidationError(
        "report needs --reports and/or --detections");

  if (!opts.reports_path.empty()) {
    std::ifstream in(opts.reports_path);
    if (!in)
      throw benchgate::ParseError("cannot open reports " + opts.reports_path);
    json doc;
    try {
      in >> doc;
      std::vector<benchgate::ChangeReport> reports;
      for (const auto& entry : doc) {
        benchgate::ChangeReport r;
        r.commit_id = entry.at("commit").get<std::string>();
        r.metric_id = entry.at("metric").get<std::string>();
        r.median_change_pct = entry.at("median_change_pct").get<double>();
        r.ci_low_pct = entry.at("ci_low_pct").get<double>();
        r.ci_high_pct = entry.at("ci_high_pct").get<double>();
        r.instability_pct = entry.at("instability_pct").get<double>();
        r.intensity = benchgate::intensity_from_string(
            entry.at("intensity").get<std::string>());
        reports.push_back(std::move(r));
      }
      std::cout << benchgate::reports_table(reports);
    } catch (const json::exception& e) {
      throw benchgate::ParseError("bad reports JSON in " + opts.reports_path +
                                  ": " + e.what());
    }
  }

  if (!opts.detections_path.empty()) {
    std::ifstream in(opts.detections_path);
    if (!in)
      throw benchgate::ParseError("cannot open detections " +
                                  opts.detections_path);
    json doc;
    try {
      in >> doc;
      std::vector<benchgate::Detection> detections;
      for (const auto& entry : doc) {
        benchgate::Detection d;
        d.commit_id = entry.at("commit").get<std::string>();
        d.metric_id = entry.at("metric").get<std::string>();
        const std::string kind = entry.at("kind").get<std::string>();
        if (kind == "jump")
          d.kind = benchgate::ChangeKind::jump;
        else if (kind == "trend")
          d.kind = benchgate::ChangeKind::trend;
        else
          throw benchgate::ParseError("unknown change kind '" + kind + "'");
        d.direction = entry.at("direction").get<std::string>() == "down"
                          ? benchgate::Direction::down
                          : benchgate::Direction::up;
        d.intensity = benchgate::intensity_from_string(
            entry.at("intensity").get<std::string>());
        d.magnitude_pct = entry.at("magnitude_pct").get<double>();
        d.threshold_used_pct = entry.at("threshold_pct").get<double>();
        detections.push_back(std::move(d));
      }
      std::cout << benchgate::detection_summary_table(detections);
    } catch (const json::exception& e) {
      throw benchgate::ParseError("bad detections JSON in " +
                                  opts.detections_path + ": " + e.what());
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CliOptions opts;
  std::uint64_t seed_value = 0;

  CLI::App app{"continuous-benchmarking analysis: suite optimization, change "
               "detection, benchmark planning"};
  app.require_subcommand(1);
  app.add_option("--config", opts.config_path, "project config JSON");
  app.add_option("--out", opts.out_dir, "output directory (overrides config)");
  auto* seed_opt =
      app.add_option("--seed", seed_value, "RNG seed (overrides config)");

  auto* optimize =
      app.add_subcommand("optimize", "minimize a microbenchmark suite by "
                                     "application call-graph coverage");
  auto* analyze = app.add_subcommand(
      "analyze", "detect performance changes across a commit series");
  auto* plan = app.add_subcommand("plan", "generate benchmark execution plans");
  plan->require_subcommand(1);
  auto* rmit =
      plan->add_subcommand("rmit", "randomized interleaved trials plan");
  rmit->add_option("--benchmark", opts.suite_override,
                   "benchmark id (repeatable; overrides config suite)");
  auto* duet = plan->add_subcommand("duet", "co-located duet plan");
  duet->add_option("--base", opts.base_ref, "base version ref");
  duet->add_option("--variation", opts.variation_ref, "variation version ref");
  duet->add_option("--workload", opts.workload_preset,
                   "workload preset: victoriametrics or influxdb");
  auto* simulate = app.add_subcommand(
      "simulate", "generate a synthetic history and score the detector");
  simulate->add_option("scenario", opts.scenario_path, "scenario JSON file")
      ->required();
  auto* report =
      app.add_subcommand("report", "render saved analysis outputs as tables");
  report->add_option("--reports", opts.reports_path, "reports JSON file");
  report->add_option("--detections", opts.detections_path,
                     "detections JSON file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (seed_opt->count() > 0) opts.seed = seed_value;

  try {
    if (*optimize) return cmd_optimize(opts);
    if (*analyze) return cmd_analyze(opts);
    if (*rmit) return cmd_plan_rmit(opts);
    if (*duet) return cmd_plan_duet(opts);
    if (*simulate) return cmd_simulate(opts);
    if (*report) return cmd_report(opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
