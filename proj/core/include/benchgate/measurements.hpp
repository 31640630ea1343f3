#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace benchgate {

enum class Version { base, variation };

std::string_view to_string(Version v);
Version version_from_string(std::string_view s);

/// Measurements of one microbenchmark at one commit, for one version, in the
/// three-level hierarchy instance run -> suite run -> iteration. The default
/// recording shape is 3 x 3 x 5 = 45 leaves but any non-empty shape, ragged
/// included, is accepted. Leaves are durations in seconds, finite and > 0.
/// Immutable after construction.
class MeasurementSet {
 public:
  using Values = std::vector<std::vector<std::vector<double>>>;

  MeasurementSet(std::string benchmark_id, std::string commit_id,
                 Version version, Values values);

  const std::string& benchmark_id() const { return benchmark_id_; }
  const std::string& commit_id() const { return commit_id_; }
  Version version() const { return version_; }
  const Values& values() const { return values_; }

  std::size_t leaf_count() const;
  /// Iteration counts per (instance, suite), row per instance.
  std::vector<std::vector<std::size_t>> shape() const;

  /// Leaves in hierarchy order: instance, then suite, then iteration.
  std::vector<double> flatten() const;

 private:
  std::string benchmark_id_;
  std::string commit_id_;
  Version version_;
  Values values_;
};

struct LatencyPoint {
  std::int64_t seq = 0;  // strictly increasing within a series
  double latency_s = 0.0;
};

/// Time-ordered request latencies of one application-benchmark run for one
/// request type (insert, simple_query, groupby_query, or any free label).
class AppRequestSeries {
 public:
  AppRequestSeries(std::string commit_id, Version version,
                   std::string request_type, std::vector<LatencyPoint> points);

  const std::string& commit_id() const { return commit_id_; }
  Version version() const { return version_; }
  const std::string& request_type() const { return request_type_; }
  const std::vector<LatencyPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

  std::vector<double> latencies() const;

 private:
  std::string commit_id_;
  Version version_;
  std::string request_type_;
  std::vector<LatencyPoint> points_;
};

struct TrimConfig {
  double head_frac = 0.05;
  double tail_frac = 0.20;
};

struct TrimmedSeries {
  AppRequestSeries series;
  // Cut points recorded so reports can state exactly what was dropped.
  std::size_t head_cut = 0;  // entries removed from the front
  std::size_t tail_cut = 0;  // entries removed from the back
};

struct TrimmedPair {
  AppRequestSeries base;
  AppRequestSeries variation;
  std::size_t head_cut = 0;
  std::size_t tail_cut = 0;
};

/// Drops floor(n * head_frac) leading and floor(n * tail_frac) trailing
/// entries, in sequence order. head_frac + tail_frac must be < 1 and the
/// series must be non-empty after trimming.
TrimmedSeries trim_duet_series(const AppRequestSeries& series,
                               const TrimConfig& cfg = {});

/// Trims both halves of a duet pair with cut indices computed once (from the
/// base series) and applied to both by sequence index, since both versions saw
/// the same random factors at the same time.
TrimmedPair trim_duet_pair(const AppRequestSeries& base,
                           const AppRequestSeries& variation,
                           const TrimConfig& cfg = {});

enum class MeasurementFormat { csv, json };

// File I/O. The CSV schemas are:
//   micro: benchmark,commit,version,instance,suite,iteration,duration_s
//   app:   commit,version,request_type,seq,latency_s
// Numbers are written as shortest round-trip decimal strings so that
// ingest -> serialize -> ingest is bit-identical. One file may carry several
// sets/series; rows are grouped by their identifying columns.
std::vector<MeasurementSet> ingest_micro_measurements(
    const std::filesystem::path& path, MeasurementFormat format);
std::vector<AppRequestSeries> ingest_app_series(
    const std::filesystem::path& path, MeasurementFormat format);

void write_micro_measurements(const std::filesystem::path& path,
                              std::span<const MeasurementSet> sets,
                              MeasurementFormat format);
void write_app_series(const std::filesystem::path& path,
                      std::span<const AppRequestSeries> series,
                      MeasurementFormat format);

struct MicroPair {
  MeasurementSet base;
  MeasurementSet variation;
};

struct AppPair {
  AppRequestSeries base;
  AppRequestSeries variation;
};

/// All measurements of one project over an ordered commit range, paired
/// base + variation per (metric, commit). The base version is fixed for the
/// whole series. A metric need not be present at every commit (suites change
/// over time); analysis walks the commits it has, in series order.
class CommitSeries {
 public:
  CommitSeries(std::string project_id, std::string base_commit_id,
               std::vector<std::string> commits,
               std::vector<MeasurementSet> micro,
               std::vector<AppRequestSeries> app);

  const std::string& project_id() const { return project_id_; }
  const std::string& base_commit_id() const { return base_commit_id_; }
  const std::vector<std::string>& commits() const { return commits_; }

  std::vector<std::string> micro_metric_ids() const;
  std::vector<std::string> app_metric_ids() const;

  /// Commit-index-ordered pairs for one benchmark / request type.
  const std::map<std::size_t, MicroPair>& micro_series(
      const std::string& benchmark_id) const;
  const std::map<std::size_t, AppPair>& app_series(
      const std::string& request_type) const;

 private:
  std::string project_id_;
  std::string base_commit_id_;
  std::vector<std::string> commits_;
  std::map<std::string, std::map<std::size_t, MicroPair>> micro_;
  std::map<std::string, std::map<std::size_t, AppPair>> app_;
};

/// Reads a manifest JSON ({project, base_commit, commits, micro_files,
/// app_files}) and ingests every listed file. Relative paths resolve against
/// the manifest's directory; format is inferred from the file extension.
CommitSeries load_commit_series(const std::filesystem::path& manifest_path);

void write_manifest(const std::filesystem::path& path,
                    const std::string& project_id,
                    const std::string& base_commit_id,
                    const std::vector<std::string>& commits,
                    const std::vector<std::string>& micro_files,
                    const std::vector<std::string>& app_files);

}  // namespace benchgate
