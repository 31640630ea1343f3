#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "benchgate/measurements.hpp"

namespace benchgate {

enum class ResampleScheme { hierarchical, flat };

std::string_view to_string(ResampleScheme s);
ResampleScheme resample_scheme_from_string(std::string_view s);

struct BootstrapConfig {
  std::size_t samples = 10000;
  /// Tail fraction per side; 0.005 gives the 99% confidence interval.
  double alpha = 0.005;
  std::uint64_t rng_seed = 0;
  ResampleScheme scheme = ResampleScheme::hierarchical;

  void validate() const;  // samples >= 100, 0 < alpha < 0.5
};

enum class Intensity { definite, potential, none };

std::string_view to_string(Intensity i);
Intensity intensity_from_string(std::string_view s);

/// Relative performance change of one metric at one commit against the fixed
/// base version, with its bootstrap confidence interval. instability_pct is
/// the CI width. The median change is not necessarily inside the CI (bootstrap
/// medians can be skewed) but ci_low <= ci_high always holds.
struct ChangeReport {
  std::string commit_id;
  std::string metric_id;
  double median_change_pct = 0.0;
  double ci_low_pct = 0.0;
  double ci_high_pct = 0.0;
  double instability_pct = 0.0;
  Intensity intensity = Intensity::none;
};

/// Median; the mean of the two central order statistics for even lengths.
double median(std::span<const double> values);

/// 100 * (median(variation) - median(base)) / median(base).
/// median(base) must be nonzero.
double median_change_pct(std::span<const double> base,
                         std::span<const double> variation);

// Bootstrap confidence interval for the median change.
//
// cfg.samples resampled pairs are drawn; each computes the median change of a
// base resample against a variation resample. The CI is
//   [ changes_(ceil(alpha*S)) , changes_(floor((1-alpha)*S)) ]
// of the sorted per-sample changes (1-based order statistics, clamped to the
// valid range).
//
// Hierarchical resampling redraws with replacement at every level of the
// recorded hierarchy: each instance slot picks an instance run uniformly, then
// the slot re-draws that instance's suite runs (one uniform pick per suite the
// chosen instance has), then each chosen suite's iterations the same way. For
// regular shapes the resample size equals the original (45 for 3 x 3 x 5).
// The flat scheme resamples leaves i.i.d., sample size = series length.
//
// Streams: draws come from stream_seed(cfg.rng_seed, {metric, commit}), one
// substream per bootstrap sample, base drawn fully before variation. The whole
// computation is a pure function of (data, cfg).
ChangeReport bootstrap_ci(const MeasurementSet& base,
                          const MeasurementSet& variation,
                          const BootstrapConfig& cfg);

/// Flat-scheme bootstrap over plain value lists (application request series
/// after trimming). Ids are used for stream derivation and the report.
ChangeReport bootstrap_ci_flat(std::span<const double> base,
                               std::span<const double> variation,
                               const BootstrapConfig& cfg,
                               const std::string& commit_id = "",
                               const std::string& metric_id = "");

/// Flat bootstrap of a duet pair; the series must already be trimmed.
ChangeReport bootstrap_ci(const AppRequestSeries& base,
                          const AppRequestSeries& variation,
                          const BootstrapConfig& cfg);

/// Records the CI-versus-zero relation: definite when the CI excludes zero
/// (both bounds of the same sign, neither zero); potential when the CI
/// straddles or touches zero but the change was flagged; none otherwise.
/// Without an explicit detector verdict a nonzero median counts as flagged.
ChangeReport classify_intensity(ChangeReport report);
ChangeReport classify_intensity(ChangeReport report, bool detector_flagged);

/// A/A comparison (both sets from the same code version). The resulting
/// instability seeds the initial detection thresholds.
ChangeReport aa_instability(const MeasurementSet& set_a,
                            const MeasurementSet& set_b,
                            const BootstrapConfig& cfg);

}  // namespace benchgate
