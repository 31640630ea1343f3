#include "benchgate/detection.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "benchgate/errors.hpp"

namespace benchgate {

std::string_view to_string(ChangeKind k) {
  return k == ChangeKind::jump ? "jump" : "trend";
}

std::string_view to_string(Direction d) { return d == Direction::up ? "up" : "down"; }

double DetectorConfig::initial_threshold_for(const std::string& metric_id) const {
  auto it = initial_threshold_pct.find(metric_id);
  return it != initial_threshold_pct.end() ? it->second
                                           : initial_threshold_default_pct;
}

void DetectorConfig::validate() const {
  if (!(threshold_factor > 0.0 && threshold_factor <= 1.0))
    throw ValidationError("threshold_factor must be in (0, 1]");
  if (min_threshold_pct < 0.0)
    throw ValidationError("min_threshold_pct must be non-negative");
  if (instability_window < 2 || trend_window < 2)
    throw ValidationError("detector windows must span at least 2 commits");
  if (initial_threshold_default_pct < 0.0)
    throw ValidationError("initial thresholds must be non-negative");
  for (const auto& [metric, threshold] : initial_threshold_pct)
    if (threshold < 0.0)
      throw ValidationError("initial threshold for '" + metric +
                            "' must be non-negative");
}

double dynamic_threshold(std::span<const double> instability_history,
                         const DetectorConfig& cfg, const std::string& metric_id) {
  if (instability_history.empty())
    return std::max(cfg.min_threshold_pct, cfg.initial_threshold_for(metric_id));
  const std::size_t window =
      std::min(instability_history.size(), cfg.instability_window);
  double sum = 0.0;
  for (std::size_t i = instability_history.size() - window;
       i < instability_history.size(); ++i)
    sum += instability_history[i];
  return std::max(cfg.min_threshold_pct,
                  cfg.threshold_factor * (sum / static_cast<double>(window)));
}

double initial_threshold_from_instability(double aa_instability_pct,
                                          const DetectorConfig& cfg) {
  double threshold = cfg.threshold_factor * aa_instability_pct;
  if (cfg.round_initial_to_whole_pct) threshold = std::round(threshold);
  return std::max(cfg.min_threshold_pct, threshold);
}

namespace {

void require_single_metric(std::span<const ChangeReport> series) {
  for (const ChangeReport& report : series)
    if (report.metric_id != series.front().metric_id)
      throw ValidationError("detection input mixes metrics '" +
                            series.front().metric_id + "' and '" +
                            report.metric_id + "'");
}

bool cis_disjoint(const ChangeReport& a, const ChangeReport& b) {
  return a.ci_high_pct < b.ci_low_pct || b.ci_high_pct < a.ci_low_pct;
}

}  // namespace

std::vector<Detection> detect_jumps(std::span<const ChangeReport> series,
                                    const DetectorConfig& cfg) {
  cfg.validate();
  if (series.size() < 2)
    throw ValidationError("jump detection needs at least two reports");
  require_single_metric(series);

  std::vector<Detection> out;
  std::vector<double> history;
  history.reserve(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (i >= 1) {
      const double delta =
          series[i].median_change_pct - series[i - 1].median_change_pct;
      const double threshold = dynamic_threshold(history, cfg, series[i].metric_id);
      if (std::abs(delta) > threshold) {
        out.push_back({series[i].commit_id, series[i].metric_id, ChangeKind::jump,
                       delta > 0.0 ? Direction::up : Direction::down,
                       cis_disjoint(series[i - 1], series[i])
                           ? Intensity::definite
                           : Intensity::potential,
                       delta, threshold});
      }
    }
    history.push_back(series[i].instability_pct);
  }
  return out;
}

std::vector<Detection> detect_trends(std::span<const ChangeReport> series,
                                     const DetectorConfig& cfg) {
  cfg.validate();
  if (series.size() < cfg.trend_window)
    throw ValidationError("trend detection needs at least " +
                          std::to_string(cfg.trend_window) + " reports");
  require_single_metric(series);

  const std::size_t window = cfg.trend_window;
  std::vector<Detection> out;
  std::vector<double> history;
  history.reserve(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (i >= window) {
      const double threshold = dynamic_threshold(history, cfg, series[i].metric_id);
      // Steps that would fire the jump detector on their own are someone
      // else's report; the trend answers for the residual drift only.
      double residual =
          series[i].median_change_pct - series[i - window].median_change_pct;
      for (std::size_t j = i - window + 1; j <= i; ++j) {
        const double step =
            series[j].median_change_pct - series[j - 1].median_change_pct;
        if (std::abs(step) > threshold) residual -= step;
      }
      if (std::abs(residual) > threshold) {
        out.push_back({series[i].commit_id, series[i].metric_id, ChangeKind::trend,
                       residual > 0.0 ? Direction::up : Direction::down,
                       cis_disjoint(series[i - window], series[i])
                           ? Intensity::definite
                           : Intensity::potential,
                       residual, threshold});
      }
    }
    history.push_back(series[i].instability_pct);
  }
  return out;
}

namespace {

struct MetricAnalysis {
  std::vector<ChangeReport> reports;
  std::vector<Detection> detections;
};

MetricAnalysis analyze_metric(std::vector<ChangeReport> reports,
                              const DetectorConfig& cfg) {
  MetricAnalysis result;
  if (reports.size() >= 2) {
    auto jumps = detect_jumps(reports, cfg);
    result.detections.insert(result.detections.end(), jumps.begin(), jumps.end());
  }
  if (reports.size() >= cfg.trend_window) {
    auto trends = detect_trends(reports, cfg);
    result.detections.insert(result.detections.end(), trends.begin(),
                             trends.end());
  }
  std::set<std::string> flagged_commits;
  for (const Detection& d : result.detections) flagged_commits.insert(d.commit_id);
  result.reports.reserve(reports.size());
  for (ChangeReport& report : reports) {
    const bool flagged = flagged_commits.count(report.commit_id) > 0;
    result.reports.push_back(classify_intensity(std::move(report), flagged));
  }
  return result;
}

}  // namespace

AnalysisResult analyze_series(const CommitSeries& series,
                              const DetectorConfig& cfg_detect,
                              const BootstrapConfig& cfg_boot,
                              const TrimConfig& trim) {
  cfg_detect.validate();
  cfg_boot.validate();

  AnalysisResult result;
  auto absorb = [&](MetricAnalysis analysis) {
    std::move(analysis.reports.begin(), analysis.reports.end(),
              std::back_inserter(result.reports));
    std::move(analysis.detections.begin(), analysis.detections.end(),
              std::back_inserter(result.detections));
  };

  for (const std::string& metric : series.micro_metric_ids()) {
    std::vector<ChangeReport> reports;
    for (const auto& [commit_idx, pair] : series.micro_series(metric))
      reports.push_back(bootstrap_ci(pair.base, pair.variation, cfg_boot));
    absorb(analyze_metric(std::move(reports), cfg_detect));
  }
  for (const std::string& metric : series.app_metric_ids()) {
    std::vector<ChangeReport> reports;
    for (const auto& [commit_idx, pair] : series.app_series(metric)) {
      TrimmedPair trimmed = trim_duet_pair(pair.base, pair.variation, trim);
      reports.push_back(bootstrap_ci(trimmed.base, trimmed.variation, cfg_boot));
    }
    absorb(analyze_metric(std::move(reports), cfg_detect));
  }

  std::map<std::string, std::size_t> commit_index;
  for (std::size_t i = 0; i < series.commits().size(); ++i)
    commit_index.emplace(series.commits()[i], i);
  std::stable_sort(result.detections.begin(), result.detections.end(),
                   [&](const Detection& a, const Detection& b) {
                     auto ka = std::tuple(commit_index.at(a.commit_id),
                                          a.metric_id, a.kind);
                     auto kb = std::tuple(commit_index.at(b.commit_id),
                                          b.metric_id, b.kind);
                     return ka < kb;
                   });
  return result;
}

}  // namespace benchgate
