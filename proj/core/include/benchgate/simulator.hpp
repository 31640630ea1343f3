#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "benchgate/bootstrap.hpp"
#include "benchgate/detection.hpp"
#include "benchgate/measurements.hpp"

namespace benchgate {

/// Multiplicative lognormal noise per hierarchy level: every instance run,
/// suite run, and iteration draws a factor exp(sigma * N(0,1)). The factors
/// have median 1, so injected changes stay the exact ground-truth median.
struct NoiseModel {
  double sigma_instance = 0.0;
  double sigma_suite = 0.0;
  double sigma_iteration = 0.0;

  void validate() const;  // all sigmas >= 0
};

/// A ground-truth performance change planted into the synthetic history.
/// Jumps apply their full magnitude from commit_index on; trends ramp up
/// linearly by magnitude/span per commit over span commits and then persist.
struct InjectedChange {
  std::size_t commit_index = 0;  // 0-based position in the commit list
  ChangeKind kind = ChangeKind::jump;
  double magnitude_pct = 0.0;  // > 0 slows the variation down (regression)
  std::size_t span = 1;        // >= 2 for trends
  std::vector<std::string> metric_ids;
};

struct MeasurementShape {
  std::size_t instance_runs = 3;
  std::size_t suite_runs = 3;
  std::size_t iterations = 5;
};

struct SimScenario {
  std::size_t n_commits = 1;
  double base_latency_s = 1.0;
  NoiseModel noise;
  std::vector<InjectedChange> injections;
  MeasurementShape shape;
  std::uint64_t seed = 0;
  std::vector<std::string> metrics = {"synthetic"};

  void validate() const;
};

struct LabeledHistory {
  CommitSeries series;
  std::vector<InjectedChange> labels;
};

/// Generates base + variation measurement sets for every commit and metric.
/// The variation's true median equals base_latency_s times the product of the
/// factors of all injections active at that commit; the base version is never
/// injected. Commit ids are c0001..cNNNN with base commit c0000. Two
/// injections of the same kind hitting the same metric at the same commit are
/// contradictory and rejected. Deterministic per seed.
LabeledHistory generate_history(const SimScenario& scenario);

/// Ground-truth change in percent for one metric at one commit index.
double true_change_pct(const SimScenario& scenario, const std::string& metric,
                       std::size_t commit_index);

struct ConfusionCounts {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
};

struct DetectorScore {
  double precision = 1.0;  // 1.0 when there are no detections
  double recall = 1.0;     // 1.0 when there are no labels
  ConfusionCounts jump;
  ConfusionCounts trend;
  std::size_t flagged_commits = 0;  // commits with at least one detection
  std::size_t total_commits = 0;
};

/// Runs the analysis pipeline on a labeled history and scores the detections.
/// A detection matches a label when kind, direction, and metric agree and the
/// commit lies within +-1 of the label (jumps) or inside
/// [commit_index, commit_index + span] (trends).
DetectorScore evaluate_detector(const LabeledHistory& history,
                                const DetectorConfig& cfg_detect,
                                const BootstrapConfig& cfg_boot);

SimScenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const SimScenario& scenario);

}  // namespace benchgate
