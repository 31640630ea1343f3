#include "benchgate/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "benchgate/errors.hpp"
#include "benchgate/rng.hpp"

namespace benchgate {

std::string_view to_string(ResampleScheme s) {
  return s == ResampleScheme::hierarchical ? "hierarchical" : "flat";
}

ResampleScheme resample_scheme_from_string(std::string_view s) {
  if (s == "hierarchical") return ResampleScheme::hierarchical;
  if (s == "flat") return ResampleScheme::flat;
  throw ParseError("unknown resample scheme '" + std::string(s) + "'");
}

void BootstrapConfig::validate() const {
  if (samples < 100) throw ValidationError("bootstrap needs at least 100 samples");
  if (!(alpha > 0.0 && alpha < 0.5))
    throw ValidationError("alpha must be in (0, 0.5)");
}

std::string_view to_string(Intensity i) {
  switch (i) {
    case Intensity::definite: return "definite";
    case Intensity::potential: return "potential";
    default: return "none";
  }
}

Intensity intensity_from_string(std::string_view s) {
  if (s == "definite") return Intensity::definite;
  if (s == "potential") return Intensity::potential;
  if (s == "none") return Intensity::none;
  throw ParseError("unknown intensity '" + std::string(s) + "'");
}

namespace {

// Reorders v. Even lengths average the two central order statistics.
double median_inplace(std::vector<double>& v) {
  const std::size_t n = v.size();
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  double lower = *std::max_element(v.begin(), mid);
  return (lower + *mid) / 2.0;
}

double change_pct(double base_median, double variation_median) {
  return 100.0 * (variation_median - base_median) / base_median;
}

void resample_hierarchical(const MeasurementSet::Values& values, SplitMix64& rng,
                           std::vector<double>& out) {
  out.clear();
  const std::size_t n_instances = values.size();
  for (std::size_t i = 0; i < n_instances; ++i) {
    const auto& instance = values[rng.bounded(n_instances)];
    const std::size_t n_suites = instance.size();
    for (std::size_t s = 0; s < n_suites; ++s) {
      const auto& suite = instance[rng.bounded(n_suites)];
      const std::size_t n_iterations = suite.size();
      for (std::size_t t = 0; t < n_iterations; ++t)
        out.push_back(suite[rng.bounded(n_iterations)]);
    }
  }
}

void resample_flat(std::span<const double> leaves, SplitMix64& rng,
                   std::vector<double>& out) {
  out.clear();
  const std::size_t n = leaves.size();
  for (std::size_t i = 0; i < n; ++i) out.push_back(leaves[rng.bounded(n)]);
}

struct SeriesView {
  const MeasurementSet::Values* hierarchy = nullptr;  // null means flat
  std::span<const double> leaves;

  void resample(SplitMix64& rng, std::vector<double>& out) const {
    if (hierarchy)
      resample_hierarchical(*hierarchy, rng, out);
    else
      resample_flat(leaves, rng, out);
  }
};

ChangeReport run_bootstrap(const std::string& commit_id,
                           const std::string& metric_id, const SeriesView& base,
                           const SeriesView& variation,
                           const BootstrapConfig& cfg) {
  cfg.validate();
  if (base.leaves.empty() || variation.leaves.empty())
    throw ValidationError("bootstrap input for " + metric_id + "@" + commit_id +
                          " is empty");

  ChangeReport report;
  report.commit_id = commit_id;
  report.metric_id = metric_id;
  report.median_change_pct = median_change_pct(base.leaves, variation.leaves);

  const std::uint64_t stream = stream_seed(cfg.rng_seed, {metric_id, commit_id});
  std::vector<double> changes(cfg.samples);

  auto worker = [&](std::size_t first, std::size_t last) {
    std::vector<double> b, v;
    b.reserve(base.leaves.size());
    v.reserve(variation.leaves.size());
    for (std::size_t s = first; s < last; ++s) {
      SplitMix64 rng(substream(stream, s));
      base.resample(rng, b);
      variation.resample(rng, v);
      double mb = median_inplace(b);
      changes[s] = change_pct(mb, median_inplace(v));
    }
  };

  // Per-sample substreams make parallel chunks agree with a serial run.
  const std::size_t hw = std::thread::hardware_concurrency();
  const std::size_t n_threads =
      cfg.samples >= 2000 && hw > 1 ? std::min<std::size_t>(hw, 8) : 1;
  if (n_threads == 1) {
    worker(0, cfg.samples);
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (cfg.samples + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
      std::size_t first = t * chunk;
      std::size_t last = std::min(cfg.samples, first + chunk);
      if (first >= last) break;
      threads.emplace_back(worker, first, last);
    }
    for (std::thread& t : threads) t.join();
  }

  std::sort(changes.begin(), changes.end());
  const double s = static_cast<double>(cfg.samples);
  auto order_stat = [&](double index_1based) {
    auto clamped = std::clamp<std::size_t>(
        static_cast<std::size_t>(index_1based), 1, cfg.samples);
    return changes[clamped - 1];
  };
  report.ci_low_pct = order_stat(std::ceil(cfg.alpha * s));
  report.ci_high_pct = order_stat(std::floor((1.0 - cfg.alpha) * s));
  report.instability_pct = report.ci_high_pct - report.ci_low_pct;
  report.intensity = Intensity::none;
  return report;
}

void require_positive(std::span<const double> values, const std::string& label) {
  for (double v : values)
    if (!std::isfinite(v) || v <= 0.0)
      throw ValidationError(label + " values must be positive and finite");
}

}  // namespace

double median(std::span<const double> values) {
  if (values.empty()) throw ValidationError("median of an empty list");
  std::vector<double> copy(values.begin(), values.end());
  return median_inplace(copy);
}

double median_change_pct(std::span<const double> base,
                         std::span<const double> variation) {
  const double mb = median(base);
  const double mv = median(variation);
  if (mb == 0.0) throw ValidationError("base median is zero");
  return change_pct(mb, mv);
}

ChangeReport bootstrap_ci(const MeasurementSet& base,
                          const MeasurementSet& variation,
                          const BootstrapConfig& cfg) {
  if (base.benchmark_id() != variation.benchmark_id())
    throw ValidationError("bootstrap pair mixes benchmarks '" +
                          base.benchmark_id() + "' and '" +
                          variation.benchmark_id() + "'");
  const std::vector<double> base_leaves = base.flatten();
  const std::vector<double> variation_leaves = variation.flatten();
  SeriesView base_view{cfg.scheme == ResampleScheme::hierarchical ? &base.values()
                                                                  : nullptr,
                       base_leaves};
  SeriesView variation_view{
      cfg.scheme == ResampleScheme::hierarchical ? &variation.values() : nullptr,
      variation_leaves};
  return run_bootstrap(variation.commit_id(), base.benchmark_id(), base_view,
                       variation_view, cfg);
}

ChangeReport bootstrap_ci_flat(std::span<const double> base,
                               std::span<const double> variation,
                               const BootstrapConfig& cfg,
                               const std::string& commit_id,
                               const std::string& metric_id) {
  require_positive(base, "base");
  require_positive(variation, "variation");
  return run_bootstrap(commit_id, metric_id, SeriesView{nullptr, base},
                       SeriesView{nullptr, variation}, cfg);
}

ChangeReport bootstrap_ci(const AppRequestSeries& base,
                          const AppRequestSeries& variation,
                          const BootstrapConfig& cfg) {
  if (base.request_type() != variation.request_type())
    throw ValidationError("bootstrap pair mixes request types '" +
                          base.request_type() + "' and '" +
                          variation.request_type() + "'");
  const std::vector<double> base_latencies = base.latencies();
  const std::vector<double> variation_latencies = variation.latencies();
  return run_bootstrap(variation.commit_id(), base.request_type(),
                       SeriesView{nullptr, base_latencies},
                       SeriesView{nullptr, variation_latencies}, cfg);
}

ChangeReport classify_intensity(ChangeReport report) {
  const bool flagged = report.median_change_pct != 0.0;
  return classify_intensity(std::move(report), flagged);
}

ChangeReport classify_intensity(ChangeReport report, bool detector_flagged) {
  const bool excludes_zero =
      (report.ci_low_pct > 0.0 && report.ci_high_pct > 0.0) ||
      (report.ci_low_pct < 0.0 && report.ci_high_pct < 0.0);
  if (excludes_zero)
    report.intensity = Intensity::definite;
  else
    report.intensity = detector_flagged ? Intensity::potential : Intensity::none;
  return report;
}

ChangeReport aa_instability(const MeasurementSet& set_a,
                            const MeasurementSet& set_b,
                            const BootstrapConfig& cfg) {
  return bootstrap_ci(set_a, set_b, cfg);
}

}  // namespace benchgate
