#pragma once

#include <map>
#include <span>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "benchgate/bootstrap.hpp"
#include "benchgate/detection.hpp"

namespace benchgate {

// Deterministic serialization of analysis outputs. Reruns with identical
// inputs and seeds must produce byte-identical files, so doubles are written
// as shortest round-trip decimals and JSON keys are emitted sorted.

/// Rows: commit,metric,median_change_pct,ci_low_pct,ci_high_pct,instability_pct,intensity
std::string reports_to_csv(std::span<const ChangeReport> reports);
nlohmann::json reports_to_json(std::span<const ChangeReport> reports);

/// Rows: commit,metric,kind,direction,intensity,magnitude_pct,threshold_pct
std::string detections_to_csv(std::span<const Detection> detections);
/// The JSON form additionally carries reference_impact_s per detection when a
/// map of per-benchmark impacts is supplied (null for unlisted metrics).
nlohmann::json detections_to_json(
    std::span<const Detection> detections,
    const std::map<std::string, double>* reference_impacts = nullptr);

/// Per-(metric, commit) plot rows with CI band and detection markers:
/// metric,commit_index,commit,median_change_pct,ci_low_pct,ci_high_pct,jump,trend
/// Marker cells hold "up"/"down" (empty when nothing fired). Commit indices
/// refer to positions in `commits`.
std::string plot_data_csv(const AnalysisResult& result,
                          std::span<const std::string> commits);

/// Counts by kind and direction, definite first, potential in parentheses.
std::string detection_summary_table(std::span<const Detection> detections);

/// Fixed-width change-report table for terminal output.
std::string reports_table(std::span<const ChangeReport> reports);

}  // namespace benchgate
