#include "benchgate/measurements.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <tuple>

#include <nlohmann/json.hpp>

#include "benchgate/errors.hpp"
#include "text_util.hpp"

namespace benchgate {

std::string_view to_string(Version v) {
  return v == Version::base ? "base" : "variation";
}

Version version_from_string(std::string_view s) {
  if (s == "base") return Version::base;
  if (s == "variation") return Version::variation;
  throw ParseError("unknown version '" + std::string(s) + "'");
}

MeasurementSet::MeasurementSet(std::string benchmark_id, std::string commit_id,
                               Version version, Values values)
    : benchmark_id_(std::move(benchmark_id)),
      commit_id_(std::move(commit_id)),
      version_(version),
      values_(std::move(values)) {
  if (benchmark_id_.empty()) throw ValidationError("empty benchmark id");
  if (commit_id_.empty()) throw ValidationError("empty commit id");
  const std::string who = benchmark_id_ + "@" + commit_id_;
  if (values_.empty())
    throw ValidationError("measurement set " + who + " has no instance runs");
  for (const auto& instance : values_) {
    if (instance.empty())
      throw ValidationError("measurement set " + who + " has an empty instance run");
    for (const auto& suite : instance) {
      if (suite.empty())
        throw ValidationError("measurement set " + who + " has an empty suite run");
      for (double leaf : suite)
        if (!std::isfinite(leaf) || leaf <= 0.0)
          throw ValidationError("measurement set " + who +
                                " has a non-positive duration");
    }
  }
}

std::size_t MeasurementSet::leaf_count() const {
  std::size_t n = 0;
  for (const auto& instance : values_)
    for (const auto& suite : instance) n += suite.size();
  return n;
}

std::vector<std::vector<std::size_t>> MeasurementSet::shape() const {
  std::vector<std::vector<std::size_t>> rows;
  rows.reserve(values_.size());
  for (const auto& instance : values_) {
    std::vector<std::size_t> row;
    row.reserve(instance.size());
    for (const auto& suite : instance) row.push_back(suite.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> MeasurementSet::flatten() const {
  std::vector<double> leaves;
  leaves.reserve(leaf_count());
  for (const auto& instance : values_)
    for (const auto& suite : instance)
      leaves.insert(leaves.end(), suite.begin(), suite.end());
  return leaves;
}

AppRequestSeries::AppRequestSeries(std::string commit_id, Version version,
                                   std::string request_type,
                                   std::vector<LatencyPoint> points)
    : commit_id_(std::move(commit_id)),
      version_(version),
      request_type_(std::move(request_type)),
      points_(std::move(points)) {
  if (commit_id_.empty()) throw ValidationError("empty commit id");
  if (request_type_.empty()) throw ValidationError("empty request type");
  const std::string who = request_type_ + "@" + commit_id_;
  if (points_.empty()) throw ValidationError("request series " + who + " is empty");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const LatencyPoint& p = points_[i];
    if (!std::isfinite(p.latency_s) || p.latency_s <= 0.0)
      throw ValidationError("request series " + who + " has a non-positive latency");
    if (i > 0 && p.seq <= points_[i - 1].seq)
      throw ValidationError("request series " + who +
                            " has non-increasing sequence indices");
  }
}

std::vector<double> AppRequestSeries::latencies() const {
  std::vector<double> out;
  out.reserve(points_.size());
  for (const LatencyPoint& p : points_) out.push_back(p.latency_s);
  return out;
}

namespace {

struct TrimCuts {
  std::size_t head;
  std::size_t tail;
};

TrimCuts trim_cuts(std::size_t n, const TrimConfig& cfg) {
  if (cfg.head_frac < 0.0 || cfg.tail_frac < 0.0 ||
      cfg.head_frac + cfg.tail_frac >= 1.0)
    throw ValidationError("trim fractions must be non-negative and sum below 1");
  return {static_cast<std::size_t>(std::floor(static_cast<double>(n) * cfg.head_frac)),
          static_cast<std::size_t>(std::floor(static_cast<double>(n) * cfg.tail_frac))};
}

AppRequestSeries cut_series(const AppRequestSeries& series, TrimCuts cuts) {
  const auto& points = series.points();
  if (cuts.head + cuts.tail >= points.size())
    throw ValidationError("request series " + series.request_type() + "@" +
                          series.commit_id() + " is empty after trimming");
  std::vector<LatencyPoint> kept(points.begin() + static_cast<std::ptrdiff_t>(cuts.head),
                                 points.end() - static_cast<std::ptrdiff_t>(cuts.tail));
  return AppRequestSeries(series.commit_id(), series.version(),
                          series.request_type(), std::move(kept));
}

}  // namespace

TrimmedSeries trim_duet_series(const AppRequestSeries& series,
                               const TrimConfig& cfg) {
  TrimCuts cuts = trim_cuts(series.size(), cfg);
  return {cut_series(series, cuts), cuts.head, cuts.tail};
}

TrimmedPair trim_duet_pair(const AppRequestSeries& base,
                           const AppRequestSeries& variation,
                           const TrimConfig& cfg) {
  if (base.request_type() != variation.request_type())
    throw ValidationError("duet halves measure different request types");
  // Both containers saw the same random factors at the same time, so the cut
  // indices come from one half and apply to both.
  TrimCuts cuts = trim_cuts(base.size(), cfg);
  return {cut_series(base, cuts), cut_series(variation, cuts), cuts.head,
          cuts.tail};
}

namespace {

MeasurementFormat format_from_extension(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".csv") return MeasurementFormat::csv;
  if (ext == ".json") return MeasurementFormat::json;
  throw ParseError("cannot infer measurement format from '" + path.string() + "'");
}

std::vector<std::string> read_csv_rows(const std::filesystem::path& path,
                                       std::string_view header) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open measurement file " + path.string());
  std::string line;
  if (!std::getline(in, line) || detail::strip(line) != header)
    throw ParseError(path.string() + ": expected header '" + std::string(header) +
                     "'");
  std::vector<std::string> rows;
  while (std::getline(in, line))
    if (!detail::strip(line).empty()) rows.push_back(line);
  return rows;
}

using LeafKey = std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>;

MeasurementSet assemble_set(const std::string& benchmark, const std::string& commit,
                            Version version,
                            const std::map<LeafKey, double>& leaves,
                            const std::string& where) {
  MeasurementSet::Values values;
  for (const auto& [key, duration] : leaves) {
    const auto [instance, suite, iteration] = key;
    if (instance >= values.size()) values.resize(instance + 1);
    auto& suites = values[instance];
    if (suite >= suites.size()) suites.resize(suite + 1);
    auto& iterations = suites[suite];
    if (iteration >= iterations.size())
      iterations.resize(iteration + 1, std::numeric_limits<double>::quiet_NaN());
    iterations[iteration] = duration;
  }
  // Index gaps at any level mean a row went missing.
  for (const auto& instance : values) {
    if (instance.empty())
      throw ParseError(where + ": instance run without suite runs for " + benchmark);
    for (const auto& suite : instance) {
      if (suite.empty())
        throw ParseError(where + ": suite run without iterations for " + benchmark);
      for (double leaf : suite)
        if (std::isnan(leaf))
          throw ParseError(where + ": gap in measurement indices for " + benchmark +
                           "@" + commit);
    }
  }
  return MeasurementSet(benchmark, commit, version, std::move(values));
}

constexpr std::string_view kMicroHeader =
    "benchmark,commit,version,instance,suite,iteration,duration_s";
constexpr std::string_view kAppHeader = "commit,version,request_type,seq,latency_s";

std::vector<MeasurementSet> micro_from_csv(const std::filesystem::path& path) {
  using GroupKey = std::tuple<std::string, std::string, Version>;
  std::vector<GroupKey> order;
  std::map<GroupKey, std::map<LeafKey, double>> groups;

  std::size_t line_no = 1;
  for (const std::string& row : read_csv_rows(path, kMicroHeader)) {
    ++line_no;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    auto fields = detail::split(detail::strip(row), ',');
    if (fields.size() != 7) throw ParseError(where + ": expected 7 fields");

    GroupKey key{std::string(detail::strip(fields[0])),
                 std::string(detail::strip(fields[1])),
                 version_from_string(detail::strip(fields[2]))};
    LeafKey leaf{detail::parse_u64(detail::strip(fields[3]), where),
                 detail::parse_u64(detail::strip(fields[4]), where),
                 detail::parse_u64(detail::strip(fields[5]), where)};
    double duration = detail::parse_double(detail::strip(fields[6]), where);

    auto [it, new_group] = groups.try_emplace(key);
    if (new_group) order.push_back(key);
    if (!it->second.emplace(leaf, duration).second)
      throw ParseError(where + ": duplicate (instance, suite, iteration) key");
  }

  std::vector<MeasurementSet> sets;
  sets.reserve(order.size());
  for (const GroupKey& key : order) {
    const auto& [benchmark, commit, version] = key;
    sets.push_back(assemble_set(benchmark, commit, version, groups.at(key),
                                path.string()));
  }
  return sets;
}

std::vector<MeasurementSet> micro_from_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open measurement file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
    std::vector<MeasurementSet> sets;
    for (const auto& entry : j) {
      sets.emplace_back(entry.at("benchmark").get<std::string>(),
                        entry.at("commit").get<std::string>(),
                        version_from_string(entry.at("version").get<std::string>()),
                        entry.at("values").get<MeasurementSet::Values>());
    }
    return sets;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": bad measurement JSON: " + e.what());
  }
}

std::vector<AppRequestSeries> app_from_csv(const std::filesystem::path& path) {
  using GroupKey = std::tuple<std::string, Version, std::string>;
  std::vector<GroupKey> order;
  std::map<GroupKey, std::vector<LatencyPoint>> groups;

  std::size_t line_no = 1;
  for (const std::string& row : read_csv_rows(path, kAppHeader)) {
    ++line_no;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    auto fields = detail::split(detail::strip(row), ',');
    if (fields.size() != 5) throw ParseError(where + ": expected 5 fields");

    GroupKey key{std::string(detail::strip(fields[0])),
                 version_from_string(detail::strip(fields[1])),
                 std::string(detail::strip(fields[2]))};
    LatencyPoint point{detail::parse_i64(detail::strip(fields[3]), where),
                       detail::parse_double(detail::strip(fields[4]), where)};

    auto [it, new_group] = groups.try_emplace(key);
    if (new_group) order.push_back(key);
    it->second.push_back(point);
  }

  std::vector<AppRequestSeries> series;
  series.reserve(order.size());
  for (const GroupKey& key : order) {
    const auto& [commit, version, request_type] = key;
    series.emplace_back(commit, version, request_type, std::move(groups.at(key)));
  }
  return series;
}

std::vector<AppRequestSeries> app_from_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open measurement file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
    std::vector<AppRequestSeries> series;
    for (const auto& entry : j) {
      std::vector<LatencyPoint> points;
      for (const auto& p : entry.at("points"))
        points.push_back({p.at("seq").get<std::int64_t>(),
                          p.at("latency_s").get<double>()});
      series.emplace_back(entry.at("commit").get<std::string>(),
                          version_from_string(entry.at("version").get<std::string>()),
                          entry.at("request_type").get<std::string>(),
                          std::move(points));
    }
    return series;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": bad request series JSON: " + e.what());
  }
}

}  // namespace

std::vector<MeasurementSet> ingest_micro_measurements(
    const std::filesystem::path& path, MeasurementFormat format) {
  return format == MeasurementFormat::csv ? micro_from_csv(path)
                                          : micro_from_json(path);
}

std::vector<AppRequestSeries> ingest_app_series(const std::filesystem::path& path,
                                                MeasurementFormat format) {
  return format == MeasurementFormat::csv ? app_from_csv(path)
                                          : app_from_json(path);
}

void write_micro_measurements(const std::filesystem::path& path,
                              std::span<const MeasurementSet> sets,
                              MeasurementFormat format) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write measurement file " + path.string());
  if (format == MeasurementFormat::csv) {
    out << kMicroHeader << '\n';
    for (const MeasurementSet& set : sets) {
      const auto& values = set.values();
      for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t s = 0; s < values[i].size(); ++s)
          for (std::size_t t = 0; t < values[i][s].size(); ++t)
            out << set.benchmark_id() << ',' << set.commit_id() << ','
                << to_string(set.version()) << ',' << i << ',' << s << ',' << t
                << ',' << detail::format_double(values[i][s][t]) << '\n';
    }
    return;
  }
  nlohmann::json j = nlohmann::json::array();
  for (const MeasurementSet& set : sets)
    j.push_back({{"benchmark", set.benchmark_id()},
                 {"commit", set.commit_id()},
                 {"version", std::string(to_string(set.version()))},
                 {"values", set.values()}});
  out << j.dump(2) << '\n';
}

void write_app_series(const std::filesystem::path& path,
                      std::span<const AppRequestSeries> series,
                      MeasurementFormat format) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write measurement file " + path.string());
  if (format == MeasurementFormat::csv) {
    out << kAppHeader << '\n';
    for (const AppRequestSeries& s : series)
      for (const LatencyPoint& p : s.points())
        out << s.commit_id() << ',' << to_string(s.version()) << ','
            << s.request_type() << ',' << p.seq << ','
            << detail::format_double(p.latency_s) << '\n';
    return;
  }
  nlohmann::json j = nlohmann::json::array();
  for (const AppRequestSeries& s : series) {
    nlohmann::json points = nlohmann::json::array();
    for (const LatencyPoint& p : s.points())
      points.push_back({{"seq", p.seq}, {"latency_s", p.latency_s}});
    j.push_back({{"commit", s.commit_id()},
                 {"version", std::string(to_string(s.version()))},
                 {"request_type", s.request_type()},
                 {"points", std::move(points)}});
  }
  out << j.dump(2) << '\n';
}

CommitSeries::CommitSeries(std::string project_id, std::string base_commit_id,
                           std::vector<std::string> commits,
                           std::vector<MeasurementSet> micro,
                           std::vector<AppRequestSeries> app)
    : project_id_(std::move(project_id)),
      base_commit_id_(std::move(base_commit_id)),
      commits_(std::move(commits)) {
  if (project_id_.empty()) throw ValidationError("empty project id");
  if (base_commit_id_.empty()) throw ValidationError("empty base commit id");
  if (commits_.empty()) throw ValidationError("commit series has no commits");

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < commits_.size(); ++i)
    if (!index.emplace(commits_[i], i).second)
      throw ValidationError("duplicate commit '" + commits_[i] + "'");

  auto commit_index = [&](const std::string& commit) {
    auto it = index.find(commit);
    if (it == index.end())
      throw ValidationError("measurement references unknown commit '" + commit +
                            "'");
    return it->second;
  };

  std::map<std::string,
           std::map<std::size_t, std::pair<std::optional<MeasurementSet>,
                                           std::optional<MeasurementSet>>>>
      micro_staging;
  for (MeasurementSet& set : micro) {
    auto& slot = micro_staging[set.benchmark_id()][commit_index(set.commit_id())];
    auto& half = set.version() == Version::base ? slot.first : slot.second;
    if (half)
      throw ValidationError("duplicate measurement set for " + set.benchmark_id() +
                            "@" + set.commit_id());
    half = std::move(set);
  }
  for (auto& [benchmark, by_commit] : micro_staging) {
    for (auto& [commit_idx, halves] : by_commit) {
      if (!halves.first || !halves.second)
        throw ValidationError("benchmark " + benchmark + "@" +
                              commits_[commit_idx] +
                              " is missing one version of the pair");
      micro_[benchmark].emplace(
          commit_idx,
          MicroPair{std::move(*halves.first), std::move(*halves.second)});
    }
  }

  std::map<std::string,
           std::map<std::size_t, std::pair<std::optional<AppRequestSeries>,
                                           std::optional<AppRequestSeries>>>>
      app_staging;
  for (AppRequestSeries& series : app) {
    auto& slot =
        app_staging[series.request_type()][commit_index(series.commit_id())];
    auto& half = series.version() == Version::base ? slot.first : slot.second;
    if (half)
      throw ValidationError("duplicate request series for " +
                            series.request_type() + "@" + series.commit_id());
    half = std::move(series);
  }
  for (auto& [request_type, by_commit] : app_staging) {
    for (auto& [commit_idx, halves] : by_commit) {
      if (!halves.first || !halves.second)
        throw ValidationError("request series " + request_type + "@" +
                              commits_[commit_idx] +
                              " is missing one version of the pair");
      app_[request_type].emplace(
          commit_idx,
          AppPair{std::move(*halves.first), std::move(*halves.second)});
    }
  }
}

std::vector<std::string> CommitSeries::micro_metric_ids() const {
  std::vector<std::string> ids;
  ids.reserve(micro_.size());
  for (const auto& [id, unused] : micro_) ids.push_back(id);
  return ids;
}

std::vector<std::string> CommitSeries::app_metric_ids() const {
  std::vector<std::string> ids;
  ids.reserve(app_.size());
  for (const auto& [id, unused] : app_) ids.push_back(id);
  return ids;
}

const std::map<std::size_t, MicroPair>& CommitSeries::micro_series(
    const std::string& benchmark_id) const {
  auto it = micro_.find(benchmark_id);
  if (it == micro_.end())
    throw ValidationError("unknown benchmark '" + benchmark_id + "'");
  return it->second;
}

const std::map<std::size_t, AppPair>& CommitSeries::app_series(
    const std::string& request_type) const {
  auto it = app_.find(request_type);
  if (it == app_.end())
    throw ValidationError("unknown request type '" + request_type + "'");
  return it->second;
}

CommitSeries load_commit_series(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw ParseError("cannot open manifest " + manifest_path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest_path.string() + ": bad manifest JSON: " + e.what());
  }

  const std::filesystem::path dir = manifest_path.parent_path();
  auto resolve = [&](const std::string& file) {
    std::filesystem::path p(file);
    return p.is_absolute() ? p : dir / p;
  };

  try {
    std::vector<MeasurementSet> micro;
    for (const auto& file : j.at("micro_files")) {
      auto path = resolve(file.get<std::string>());
      auto sets = ingest_micro_measurements(path, format_from_extension(path));
      std::move(sets.begin(), sets.end(), std::back_inserter(micro));
    }
    std::vector<AppRequestSeries> app;
    for (const auto& file : j.at("app_files")) {
      auto path = resolve(file.get<std::string>());
      auto series = ingest_app_series(path, format_from_extension(path));
      std::move(series.begin(), series.end(), std::back_inserter(app));
    }
    return CommitSeries(j.at("project").get<std::string>(),
                        j.at("base_commit").get<std::string>(),
                        j.at("commits").get<std::vector<std::string>>(),
                        std::move(micro), std::move(app));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest_path.string() + ": bad manifest JSON: " + e.what());
  }
}

void write_manifest(const std::filesystem::path& path,
                    const std::string& project_id,
                    const std::string& base_commit_id,
                    const std::vector<std::string>& commits,
                    const std::vector<std::string>& micro_files,
                    const std::vector<std::string>& app_files) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write manifest " + path.string());
  nlohmann::json j{{"project", project_id},
                   {"base_commit", base_commit_id},
                   {"commits", commits},
                   {"micro_files", micro_files},
                   {"app_files", app_files}};
  out << j.dump(2) << '\n';
}

}  // namespace benchgate
