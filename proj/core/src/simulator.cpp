#include "benchgate/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "benchgate/errors.hpp"
#include "benchgate/rng.hpp"

namespace benchgate {

void NoiseModel::validate() const {
  for (double sigma : {sigma_instance, sigma_suite, sigma_iteration})
    if (!std::isfinite(sigma) || sigma < 0.0)
      throw ValidationError("noise sigmas must be non-negative and finite");
}

namespace {

bool applies_to(const InjectedChange& injection, const std::string& metric) {
  return injection.metric_ids.empty() ||
         std::find(injection.metric_ids.begin(), injection.metric_ids.end(),
                   metric) != injection.metric_ids.end();
}

// Shared by generation and ground truth so both agree bit for bit.
double injection_factor(const SimScenario& scenario, const std::string& metric,
                        std::size_t commit_index) {
  double factor = 1.0;
  for (const InjectedChange& injection : scenario.injections) {
    if (!applies_to(injection, metric) || commit_index < injection.commit_index)
      continue;
    double fraction = 1.0;
    if (injection.kind == ChangeKind::trend) {
      const std::size_t steps = commit_index - injection.commit_index + 1;
      if (steps < injection.span)
        fraction = static_cast<double>(steps) /
                   static_cast<double>(injection.span);
    }
    factor *= 1.0 + injection.magnitude_pct / 100.0 * fraction;
  }
  return factor;
}

std::string commit_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "c%04zu", index);
  return buf;
}

ChangeKind change_kind_from_string(std::string_view s) {
  if (s == "jump") return ChangeKind::jump;
  if (s == "trend") return ChangeKind::trend;
  throw ParseError("unknown change kind '" + std::string(s) + "'");
}

double noise_factor(double sigma, SplitMix64& rng) {
  return std::exp(sigma * rng.next_normal());
}

MeasurementSet::Values sample_values(const MeasurementShape& shape,
                                     double median_s, const NoiseModel& noise,
                                     SplitMix64& rng) {
  MeasurementSet::Values values(shape.instance_runs);
  for (auto& instance : values) {
    const double f_instance = noise_factor(noise.sigma_instance, rng);
    instance.resize(shape.suite_runs);
    for (auto& suite : instance) {
      const double f_suite = noise_factor(noise.sigma_suite, rng);
      suite.reserve(shape.iterations);
      for (std::size_t t = 0; t < shape.iterations; ++t)
        suite.push_back(median_s * f_instance * f_suite *
                        noise_factor(noise.sigma_iteration, rng));
    }
  }
  return values;
}

}  // namespace

void SimScenario::validate() const {
  if (n_commits == 0) throw ValidationError("scenario needs at least one commit");
  if (!std::isfinite(base_latency_s) || base_latency_s <= 0.0)
    throw ValidationError("base latency must be positive");
  noise.validate();
  if (shape.instance_runs == 0 || shape.suite_runs == 0 || shape.iterations == 0)
    throw ValidationError("measurement shape counts must be positive");
  if (metrics.empty()) throw ValidationError("scenario needs at least one metric");
  std::set<std::string> metric_set;
  for (const std::string& metric : metrics) {
    if (metric.empty()) throw ValidationError("empty metric id");
    if (!metric_set.insert(metric).second)
      throw ValidationError("duplicate metric '" + metric + "'");
  }

  // (kind, metric, commit) triples must be unique or the ground truth would
  // be ambiguous.
  std::set<std::tuple<ChangeKind, std::string, std::size_t>> starts;
  for (const InjectedChange& injection : injections) {
    if (injection.commit_index >= n_commits)
      throw ValidationError("injection commit index out of range");
    if (!std::isfinite(injection.magnitude_pct) ||
        injection.magnitude_pct == 0.0 || injection.magnitude_pct <= -100.0)
      throw ValidationError("injection magnitude must be nonzero and > -100%");
    if (injection.kind == ChangeKind::trend && injection.span < 2)
      throw ValidationError("trend injections need span >= 2");
    if (injection.span == 0) throw ValidationError("injection span must be >= 1");
    for (const std::string& metric : injection.metric_ids)
      if (!metric_set.count(metric))
        throw ValidationError("injection targets unknown metric '" + metric + "'");
    const auto& targets =
        injection.metric_ids.empty() ? metrics : injection.metric_ids;
    for (const std::string& metric : targets)
      if (!starts.insert({injection.kind, metric, injection.commit_index}).second)
        throw ValidationError("contradictory injections for '" + metric +
                              "' at commit " +
                              std::to_string(injection.commit_index));
  }
}

double true_change_pct(const SimScenario& scenario, const std::string& metric,
                       std::size_t commit_index) {
  if (commit_index >= scenario.n_commits)
    throw ValidationError("commit index out of range");
  if (std::find(scenario.metrics.begin(), scenario.metrics.end(), metric) ==
      scenario.metrics.end())
    throw ValidationError("unknown metric '" + metric + "'");
  return 100.0 * (injection_factor(scenario, metric, commit_index) - 1.0);
}

LabeledHistory generate_history(const SimScenario& scenario) {
  scenario.validate();

  std::vector<std::string> commits;
  commits.reserve(scenario.n_commits);
  for (std::size_t k = 0; k < scenario.n_commits; ++k)
    commits.push_back(commit_name(k + 1));

  std::vector<MeasurementSet> sets;
  sets.reserve(2 * scenario.n_commits * scenario.metrics.size());
  for (const std::string& metric : scenario.metrics) {
    for (std::size_t k = 0; k < scenario.n_commits; ++k) {
      const double variation_median =
          scenario.base_latency_s * injection_factor(scenario, metric, k);
      for (Version version : {Version::base, Version::variation}) {
        SplitMix64 rng(stream_seed(
            scenario.seed, {"sim", metric, commits[k], to_string(version)}));
        const double median_s = version == Version::base ? scenario.base_latency_s
                                                         : variation_median;
        sets.emplace_back(metric, commits[k], version,
                          sample_values(scenario.shape, median_s, scenario.noise,
                                        rng));
      }
    }
  }

  return {CommitSeries("synthetic", "c0000", std::move(commits), std::move(sets),
                       {}),
          scenario.injections};
}

namespace {

struct ExpandedLabel {
  ChangeKind kind;
  Direction direction;
  std::string metric;
  std::size_t commit_index;
  std::size_t span;
  bool matched = false;
};

bool label_matches(const ExpandedLabel& label, const Detection& detection,
                   std::size_t detection_index) {
  if (label.kind != detection.kind || label.direction != detection.direction ||
      label.metric != detection.metric_id)
    return false;
  if (label.kind == ChangeKind::jump) {
    const std::size_t lo = label.commit_index > 0 ? label.commit_index - 1 : 0;
    return detection_index >= lo && detection_index <= label.commit_index + 1;
  }
  return detection_index >= label.commit_index &&
         detection_index <= label.commit_index + label.span;
}

}  // namespace

DetectorScore evaluate_detector(const LabeledHistory& history,
                                const DetectorConfig& cfg_detect,
                                const BootstrapConfig& cfg_boot) {
  const AnalysisResult analysis =
      analyze_series(history.series, cfg_detect, cfg_boot);

  std::map<std::string, std::size_t> commit_index;
  const auto& commits = history.series.commits();
  for (std::size_t i = 0; i < commits.size(); ++i)
    commit_index.emplace(commits[i], i);

  const std::vector<std::string> all_metrics = history.series.micro_metric_ids();
  std::vector<ExpandedLabel> labels;
  for (const InjectedChange& injection : history.labels) {
    const auto& targets =
        injection.metric_ids.empty() ? all_metrics : injection.metric_ids;
    for (const std::string& metric : targets)
      labels.push_back({injection.kind,
                        injection.magnitude_pct > 0.0 ? Direction::up
                                                      : Direction::down,
                        metric, injection.commit_index, injection.span});
  }

  DetectorScore score;
  score.total_commits = commits.size();
  std::set<std::string> flagged;
  std::size_t matched_detections = 0;
  for (const Detection& detection : analysis.detections) {
    flagged.insert(detection.commit_id);
    const std::size_t index = commit_index.at(detection.commit_id);
    bool matched = false;
    for (ExpandedLabel& label : labels) {
      if (!label_matches(label, detection, index)) continue;
      label.matched = true;
      matched = true;
    }
    auto& counts = detection.kind == ChangeKind::jump ? score.jump : score.trend;
    if (matched)
      ++matched_detections;
    else
      ++counts.false_positives;
  }
  for (const ExpandedLabel& label : labels) {
    auto& counts = label.kind == ChangeKind::jump ? score.jump : score.trend;
    if (label.matched)
      ++counts.true_positives;
    else
      ++counts.false_negatives;
  }

  score.flagged_commits = flagged.size();
  const std::size_t total_detections = analysis.detections.size();
  if (total_detections > 0)
    score.precision = static_cast<double>(matched_detections) /
                      static_cast<double>(total_detections);
  const std::size_t total_labels = labels.size();
  const std::size_t matched_labels =
      score.jump.true_positives + score.trend.true_positives;
  if (total_labels > 0)
    score.recall = static_cast<double>(matched_labels) /
                   static_cast<double>(total_labels);
  return score;
}

SimScenario scenario_from_json(const nlohmann::json& j) {
  try {
    SimScenario scenario;
    scenario.n_commits = j.value("n_commits", scenario.n_commits);
    scenario.base_latency_s = j.value("base_latency_s", scenario.base_latency_s);
    if (j.contains("noise")) {
      const auto& noise = j.at("noise");
      scenario.noise.sigma_instance =
          noise.value("sigma_instance", scenario.noise.sigma_instance);
      scenario.noise.sigma_suite =
          noise.value("sigma_suite", scenario.noise.sigma_suite);
      scenario.noise.sigma_iteration =
          noise.value("sigma_iteration", scenario.noise.sigma_iteration);
    }
    if (j.contains("shape")) {
      const auto& shape = j.at("shape");
      scenario.shape.instance_runs =
          shape.value("instance_runs", scenario.shape.instance_runs);
      scenario.shape.suite_runs =
          shape.value("suite_runs", scenario.shape.suite_runs);
      scenario.shape.iterations =
          shape.value("iterations", scenario.shape.iterations);
    }
    scenario.seed = j.value("seed", scenario.seed);
    if (j.contains("metrics"))
      scenario.metrics = j.at("metrics").get<std::vector<std::string>>();
    if (j.contains("injections")) {
      scenario.injections.clear();
      for (const auto& entry : j.at("injections")) {
        InjectedChange injection;
        injection.commit_index = entry.at("commit_index").get<std::size_t>();
        injection.kind =
            change_kind_from_string(entry.at("kind").get<std::string>());
        injection.magnitude_pct = entry.at("magnitude_pct").get<double>();
        injection.span = entry.value("span", injection.kind == ChangeKind::trend
                                                 ? std::size_t{2}
                                                 : std::size_t{1});
        if (entry.contains("metric_ids"))
          injection.metric_ids =
              entry.at("metric_ids").get<std::vector<std::string>>();
        scenario.injections.push_back(std::move(injection));
      }
    }
    return scenario;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad scenario JSON: ") + e.what());
  }
}

nlohmann::json scenario_to_json(const SimScenario& scenario) {
  nlohmann::json injections = nlohmann::json::array();
  for (const InjectedChange& injection : scenario.injections)
    injections.push_back({{"commit_index", injection.commit_index},
                          {"kind", std::string(to_string(injection.kind))},
                          {"magnitude_pct", injection.magnitude_pct},
                          {"span", injection.span},
                          {"metric_ids", injection.metric_ids}});
  return {{"n_commits", scenario.n_commits},
          {"base_latency_s", scenario.base_latency_s},
          {"noise",
           {{"sigma_instance", scenario.noise.sigma_instance},
            {"sigma_suite", scenario.noise.sigma_suite},
            {"sigma_iteration", scenario.noise.sigma_iteration}}},
          {"shape",
           {{"instance_runs", scenario.shape.instance_runs},
            {"suite_runs", scenario.shape.suite_runs},
            {"iterations", scenario.shape.iterations}}},
          {"seed", scenario.seed},
          {"metrics", scenario.metrics},
          {"injections", std::move(injections)}};
}

}  // namespace benchgate
