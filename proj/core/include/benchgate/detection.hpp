#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "benchgate/bootstrap.hpp"
#include "benchgate/measurements.hpp"

namespace benchgate {

struct DetectorConfig {
  /// Fraction of the recent mean instability used as detection threshold.
  double threshold_factor = 0.75;
  /// Changes below this are never flagged.
  double min_threshold_pct = 1.0;
  /// How many previous instability values feed the dynamic threshold
  /// (10 for dense series, 3 for sparse every-fifth-commit series).
  std::size_t instability_window = 10;
  /// Trend drift is measured across this many commits.
  std::size_t trend_window = 10;

  /// Threshold applied while no instability history exists yet, normally
  /// derived from A/A runs. Per-metric overrides win over the default.
  double initial_threshold_default_pct = 1.0;
  std::map<std::string, double> initial_threshold_pct;
  /// Round A/A-derived initial thresholds to whole percent (as one would
  /// quote them in a project config).
  bool round_initial_to_whole_pct = false;

  double initial_threshold_for(const std::string& metric_id) const;
  void validate() const;  // 0 < factor <= 1, windows >= 2
};

enum class ChangeKind { jump, trend };
enum class Direction { up, down };

std::string_view to_string(ChangeKind k);
std::string_view to_string(Direction d);

/// A flagged performance change. up means the duration/latency increased
/// (a regression), down an improvement. |magnitude_pct| > threshold_used_pct
/// by construction.
struct Detection {
  std::string commit_id;
  std::string metric_id;
  ChangeKind kind = ChangeKind::jump;
  Direction direction = Direction::up;
  Intensity intensity = Intensity::potential;
  double magnitude_pct = 0.0;
  double threshold_used_pct = 0.0;
};

/// max(min_threshold, factor * mean of the last instability_window history
/// values). With empty history the metric's initial threshold applies
/// (floored at min_threshold as well).
double dynamic_threshold(std::span<const double> instability_history,
                         const DetectorConfig& cfg,
                         const std::string& metric_id = std::string());

/// Initial threshold from a metric's A/A instability: factor * instability,
/// floored at min_threshold, optionally rounded to whole percent.
double initial_threshold_from_instability(double aa_instability_pct,
                                          const DetectorConfig& cfg);

// Jump detection over one metric's reports, ordered by commit, all anchored
// to the fixed base version. The step between successive commits is
// delta_i = median_change[i] - median_change[i-1] (valid because changes
// against the fixed base are transitive); commit i is flagged when |delta_i|
// exceeds the dynamic threshold over the instabilities before i. Intensity is
// definite when the CIs of reports i-1 and i do not overlap.
// Needs at least two reports.
std::vector<Detection> detect_jumps(std::span<const ChangeReport> series,
                                    const DetectorConfig& cfg);

// Trend detection: drift_i = median_change[i] - median_change[i - W] with
// W = cfg.trend_window, flagged when |drift_i| exceeds the dynamic threshold.
// Jumps subsume trends: constituent steps inside the window that exceed the
// threshold on their own are removed from the drift, and the trend only fires
// if the residual drift still exceeds the threshold. A window whose drift is
// attributable solely to one jump therefore never also reports a trend.
// Intensity is definite when the CIs at the window endpoints do not overlap.
// Needs at least trend_window reports.
std::vector<Detection> detect_trends(std::span<const ChangeReport> series,
                                     const DetectorConfig& cfg);

struct AnalysisResult {
  /// Grouped by metric (micro benchmarks first, then app request types, each
  /// sorted by id), ordered by commit within a metric.
  std::vector<ChangeReport> reports;
  /// Ordered by commit index, then metric, then kind.
  std::vector<Detection> detections;
};

/// Full pipeline over a commit series: bootstrap per (metric, commit), then
/// jump detection, then trend detection, per metric. Microbenchmark pairs use
/// cfg_boot.scheme; application request series are trimmed with trim and
/// bootstrapped with the flat scheme, sample size = series length.
AnalysisResult analyze_series(const CommitSeries& series,
                              const DetectorConfig& cfg_detect,
                              const BootstrapConfig& cfg_boot,
                              const TrimConfig& trim = {});

}  // namespace benchgate
