#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "benchgate/measurements.hpp"

namespace benchgate {

struct RmitParams {
  std::size_t instance_runs = 3;
  std::size_t suite_runs = 3;
  std::size_t iterations = 5;
  double iteration_duration_s = 1.0;  // metadata for the runner, not enforced

  void validate() const;
};

/// One suite run: a fresh permutation of the suite, and per benchmark which
/// version executes first in its back-to-back pair.
struct SuiteRunSchedule {
  std::vector<std::string> order;            // permutation of the suite
  std::vector<Version> first_version;        // aligned with order
};

/// Randomized multiple interleaved trials plan: per (instance run, suite run)
/// a fresh random suite order, each benchmark executed back-to-back for both
/// versions with a coin-flipped version order. Fully reproducible from
/// rng_seed; generation never launches anything.
struct RmitPlan {
  std::vector<std::string> suite;
  RmitParams params;
  std::uint64_t rng_seed = 0;
  std::vector<std::vector<SuiteRunSchedule>> schedule;  // [instance][suite_run]

  /// instance_runs * suite_runs * iterations.
  std::size_t measurements_per_benchmark() const;
};

/// Builds the plan. Per (instance, suite run), in instance-major order, one
/// RNG substream drives a Fisher-Yates shuffle of the suite followed by one
/// coin flip per benchmark in shuffled order (low bit: 0 = base first).
RmitPlan make_rmit_plan(std::vector<std::string> suite,
                        const RmitParams& params = {},
                        std::uint64_t seed = 0);

/// DevOps-style duet workload: an insert phase, then simple queries, then
/// group-by queries. Counts mirror the published study setups.
struct DuetWorkload {
  std::size_t simulated_servers = 0;
  std::size_t sending_interval_s = 60;
  std::size_t simulated_duration_h = 0;
  std::size_t insert_clients = 0;
  std::size_t batch_size = 0;
  std::size_t batches = 0;
  std::size_t simple_queries = 0;
  std::size_t groupby_queries = 0;
  std::size_t query_clients = 0;

  static DuetWorkload victoriametrics_defaults();
  static DuetWorkload influxdb_defaults();
};

/// Both versions co-located on one host, benchmarked simultaneously.
struct DuetPlan {
  std::string base_ref;
  std::string variation_ref;
  bool co_located = true;
  bool aa = false;  // base and variation are the same ref (noise-floor run)
  std::size_t repetitions = 3;
  DuetWorkload workload;
};

/// repetitions must be >= 3. Identical refs yield a valid A/A plan with the
/// aa flag set.
DuetPlan make_duet_plan(std::string base_ref, std::string variation_ref,
                        const DuetWorkload& workload,
                        std::size_t repetitions = 3);

nlohmann::json rmit_plan_to_json(const RmitPlan& plan);
RmitPlan rmit_plan_from_json(const nlohmann::json& j);
nlohmann::json duet_plan_to_json(const DuetPlan& plan);
DuetPlan duet_plan_from_json(const nlohmann::json& j);

}  // namespace benchgate
