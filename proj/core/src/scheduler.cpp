#include "benchgate/scheduler.hpp"

#include <set>

#include <nlohmann/json.hpp>

#include "benchgate/errors.hpp"
#include "benchgate/rng.hpp"

namespace benchgate {

void RmitParams::validate() const {
  if (instance_runs == 0 || suite_runs == 0 || iterations == 0)
    throw ValidationError("RMIT run counts must be positive");
  if (!(iteration_duration_s > 0.0))
    throw ValidationError("iteration duration must be positive");
}

std::size_t RmitPlan::measurements_per_benchmark() const {
  return params.instance_runs * params.suite_runs * params.iterations;
}

RmitPlan make_rmit_plan(std::vector<std::string> suite, const RmitParams& params,
                        std::uint64_t seed) {
  params.validate();
  if (suite.empty()) throw ValidationError("RMIT plan needs a non-empty suite");
  std::set<std::string> unique(suite.begin(), suite.end());
  if (unique.size() != suite.size())
    throw ValidationError("RMIT suite has duplicate benchmark ids");

  RmitPlan plan;
  plan.suite = std::move(suite);
  plan.params = params;
  plan.rng_seed = seed;

  const std::uint64_t stream = stream_seed(seed, {"rmit"});
  plan.schedule.resize(params.instance_runs);
  for (std::size_t instance = 0; instance < params.instance_runs; ++instance) {
    auto& runs = plan.schedule[instance];
    runs.resize(params.suite_runs);
    for (std::size_t run = 0; run < params.suite_runs; ++run) {
      SplitMix64 rng(substream(stream, instance * params.suite_runs + run));
      SuiteRunSchedule& schedule = runs[run];
      schedule.order = plan.suite;
      fisher_yates(std::span(schedule.order), rng);
      schedule.first_version.reserve(schedule.order.size());
      for (std::size_t b = 0; b < schedule.order.size(); ++b)
        schedule.first_version.push_back(
            (rng.next() & 1u) == 0 ? Version::base : Version::variation);
    }
  }
  return plan;
}

DuetWorkload DuetWorkload::victoriametrics_defaults() {
  DuetWorkload w;
  w.simulated_servers = 800;
  w.sending_interval_s = 60;
  w.simulated_duration_h = 72;
  w.insert_clients = 4;
  w.batch_size = 400;
  w.batches = 259200;
  w.simple_queries = 8640;
  w.groupby_queries = 1440;
  w.query_clients = 10;
  return w;
}

DuetWorkload DuetWorkload::influxdb_defaults() {
  DuetWorkload w;
  w.simulated_servers = 100;
  w.sending_interval_s = 60;
  w.simulated_duration_h = 168;
  w.insert_clients = 10;
  w.batch_size = 60;
  w.batches = 113400;
  w.simple_queries = 1008;
  w.groupby_queries = 168;
  w.query_clients = 10;
  return w;
}

DuetPlan make_duet_plan(std::string base_ref, std::string variation_ref,
                        const DuetWorkload& workload, std::size_t repetitions) {
  if (base_ref.empty() || variation_ref.empty())
    throw ValidationError("duet plan needs non-empty version refs");
  if (repetitions < 3)
    throw ValidationError("duet plans repeat at least three times");
  DuetPlan plan;
  plan.aa = base_ref == variation_ref;
  plan.base_ref = std::move(base_ref);
  plan.variation_ref = std::move(variation_ref);
  plan.co_located = true;
  plan.repetitions = repetitions;
  plan.workload = workload;
  return plan;
}

nlohmann::json rmit_plan_to_json(const RmitPlan& plan) {
  nlohmann::json schedule = nlohmann::json::array();
  for (const auto& instance : plan.schedule) {
    nlohmann::json runs = nlohmann::json::array();
    for (const SuiteRunSchedule& run : instance) {
      nlohmann::json firsts = nlohmann::json::array();
      for (Version v : run.first_version)
        firsts.push_back(std::string(to_string(v)));
      runs.push_back({{"order", run.order}, {"first_version", std::move(firsts)}});
    }
    schedule.push_back(std::move(runs));
  }
  return {{"suite", plan.suite},
          {"instance_runs", plan.params.instance_runs},
          {"suite_runs", plan.params.suite_runs},
          {"iterations", plan.params.iterations},
          {"iteration_duration_s", plan.params.iteration_duration_s},
          {"rng_seed", plan.rng_seed},
          {"schedule", std::move(schedule)}};
}

RmitPlan rmit_plan_from_json(const nlohmann::json& j) {
  try {
    RmitPlan plan;
    plan.suite = j.at("suite").get<std::vector<std::string>>();
    plan.params.instance_runs = j.at("instance_runs").get<std::size_t>();
    plan.params.suite_runs = j.at("suite_runs").get<std::size_t>();
    plan.params.iterations = j.at("iterations").get<std::size_t>();
    plan.params.iteration_duration_s = j.at("iteration_duration_s").get<double>();
    plan.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    for (const auto& instance : j.at("schedule")) {
      std::vector<SuiteRunSchedule> runs;
      for (const auto& run : instance) {
        SuiteRunSchedule schedule;
        schedule.order = run.at("order").get<std::vector<std::string>>();
        for (const auto& v : run.at("first_version"))
          schedule.first_version.push_back(
              version_from_string(v.get<std::string>()));
        runs.push_back(std::move(schedule));
      }
      plan.schedule.push_back(std::move(runs));
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad RMIT plan JSON: ") + e.what());
  }
}

nlohmann::json duet_plan_to_json(const DuetPlan& plan) {
  return {{"base_ref", plan.base_ref},
          {"variation_ref", plan.variation_ref},
          {"co_located", plan.co_located},
          {"aa", plan.aa},
          {"repetitions", plan.repetitions},
          {"workload",
           {{"simulated_servers", plan.workload.simulated_servers},
            {"sending_interval_s", plan.workload.sending_interval_s},
            {"simulated_duration_h", plan.workload.simulated_duration_h},
            {"insert_clients", plan.workload.insert_clients},
            {"batch_size", plan.workload.batch_size},
            {"batches", plan.workload.batches},
            {"simple_queries", plan.workload.simple_queries},
            {"groupby_queries", plan.workload.groupby_queries},
            {"query_clients", plan.workload.query_clients}}}};
}

DuetPlan duet_plan_from_json(const nlohmann::json& j) {
  try {
    DuetPlan plan;
    plan.base_ref = j.at("base_ref").get<std::string>();
    plan.variation_ref = j.at("variation_ref").get<std::string>();
    plan.co_located = j.at("co_located").get<bool>();
    plan.aa = j.at("aa").get<bool>();
    plan.repetitions = j.at("repetitions").get<std::size_t>();
    const auto& w = j.at("workload");
    plan.workload.simulated_servers = w.at("simulated_servers").get<std::size_t>();
    plan.workload.sending_interval_s =
        w.at("sending_interval_s").get<std::size_t>();
    plan.workload.simulated_duration_h =
        w.at("simulated_duration_h").get<std::size_t>();
    plan.workload.insert_clients = w.at("insert_clients").get<std::size_t>();
    plan.workload.batch_size = w.at("batch_size").get<std::size_t>();
    plan.workload.batches = w.at("batches").get<std::size_t>();
    plan.workload.simple_queries = w.at("simple_queries").get<std::size_t>();
    plan.workload.groupby_queries = w.at("groupby_queries").get<std::size_t>();
    plan.workload.query_clients = w.at("query_clients").get<std::size_t>();
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad duet plan JSON: ") + e.what());
  }
}

}  // namespace benchgate
