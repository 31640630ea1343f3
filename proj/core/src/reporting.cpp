#include "benchgate/reporting.hpp"

#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "benchgate/errors.hpp"
#include "text_util.hpp"

namespace benchgate {

std::string reports_to_csv(std::span<const ChangeReport> reports) {
  std::string out =
      "commit,metric,median_change_pct,ci_low_pct,ci_high_pct,instability_pct,"
      "intensity\n";
  for (const ChangeReport& r : reports) {
    out += r.commit_id;
    out += ',';
    out += r.metric_id;
    out += ',';
    out += detail::format_double(r.median_change_pct);
    out += ',';
    out += detail::format_double(r.ci_low_pct);
    out += ',';
    out += detail::format_double(r.ci_high_pct);
    out += ',';
    out += detail::format_double(r.instability_pct);
    out += ',';
    out += to_string(r.intensity);
    out += '\n';
  }
  return out;
}

nlohmann::json reports_to_json(std::span<const ChangeReport> reports) {
  nlohmann::json j = nlohmann::json::array();
  for (const ChangeReport& r : reports)
    j.push_back({{"commit", r.commit_id},
                 {"metric", r.metric_id},
                 {"median_change_pct", r.median_change_pct},
                 {"ci_low_pct", r.ci_low_pct},
                 {"ci_high_pct", r.ci_high_pct},
                 {"instability_pct", r.instability_pct},
                 {"intensity", std::string(to_string(r.intensity))}});
  return j;
}

std::string detections_to_csv(std::span<const Detection> detections) {
  std::string out =
      "commit,metric,kind,direction,intensity,magnitude_pct,threshold_pct\n";
  for (const Detection& d : detections) {
    out += d.commit_id;
    out += ',';
    out += d.metric_id;
    out += ',';
    out += to_string(d.kind);
    out += ',';
    out += to_string(d.direction);
    out += ',';
    out += to_string(d.intensity);
    out += ',';
    out += detail::format_double(d.magnitude_pct);
    out += ',';
    out += detail::format_double(d.threshold_used_pct);
    out += '\n';
  }
  return out;
}

nlohmann::json detections_to_json(
    std::span<const Detection> detections,
    const std::map<std::string, double>* reference_impacts) {
  nlohmann::json j = nlohmann::json::array();
  for (const Detection& d : detections) {
    nlohmann::json entry{{"commit", d.commit_id},
                         {"metric", d.metric_id},
                         {"kind", std::string(to_string(d.kind))},
                         {"direction", std::string(to_string(d.direction))},
                         {"intensity", std::string(to_string(d.intensity))},
                         {"magnitude_pct", d.magnitude_pct},
                         {"threshold_pct", d.threshold_used_pct}};
    if (reference_impacts) {
      auto it = reference_impacts->find(d.metric_id);
      entry["reference_impact_s"] =
          it != reference_impacts->end() ? nlohmann::json(it->second)
                                         : nlohmann::json(nullptr);
    }
    j.push_back(std::move(entry));
  }
  return j;
}

std::string plot_data_csv(const AnalysisResult& result,
                          std::span<const std::string> commits) {
  std::map<std::string, std::size_t> commit_index;
  for (std::size_t i = 0; i < commits.size(); ++i)
    commit_index.emplace(commits[i], i);

  // marker[metric][commit] per kind
  std::map<std::string, std::map<std::string, std::string>> jump_marks;
  std::map<std::string, std::map<std::string, std::string>> trend_marks;
  for (const Detection& d : result.detections) {
    auto& marks = d.kind == ChangeKind::jump ? jump_marks : trend_marks;
    marks[d.metric_id][d.commit_id] = to_string(d.direction);
  }

  std::string out =
      "metric,commit_index,commit,median_change_pct,ci_low_pct,ci_high_pct,"
      "jump,trend\n";
  for (const ChangeReport& r : result.reports) {
    auto index_it = commit_index.find(r.commit_id);
    if (index_it == commit_index.end())
      throw ValidationError("report references commit '" + r.commit_id +
                            "' outside the plotted series");
    out += r.metric_id;
    out += ',';
    out += std::to_string(index_it->second);
    out += ',';
    out += r.commit_id;
    out += ',';
    out += detail::format_double(r.median_change_pct);
    out += ',';
    out += detail::format_double(r.ci_low_pct);
    out += ',';
    out += detail::format_double(r.ci_high_pct);
    out += ',';
    out += jump_marks[r.metric_id][r.commit_id];
    out += ',';
    out += trend_marks[r.metric_id][r.commit_id];
    out += '\n';
  }
  return out;
}

std::string detection_summary_table(std::span<const Detection> detections) {
  std::size_t jump_up = 0, jump_up_potential = 0;
  std::size_t jump_down = 0, jump_down_potential = 0;
  std::size_t trend_up = 0, trend_up_potential = 0;
  std::size_t trend_down = 0, trend_down_potential = 0;
  for (const Detection& d : detections) {
    const bool potential = d.intensity != Intensity::definite;
    if (d.kind == ChangeKind::jump) {
      if (d.direction == Direction::up) {
        ++(potential ? jump_up_potential : jump_up);
      } else {
        ++(potential ? jump_down_potential : jump_down);
      }
    } else {
      if (d.direction == Direction::up) {
        ++(potential ? trend_up_potential : trend_up);
      } else {
        ++(potential ? trend_down_potential : trend_down);
      }
    }
  }
  std::ostringstream out;
  out << "detections: " << detections.size() << " total\n";
  auto line = [&](const char* label, std::size_t definite, std::size_t potential) {
    out << "  " << std::left << std::setw(12) << label << definite << " definite ("
        << potential << " potential)\n";
  };
  line("jump up", jump_up, jump_up_potential);
  line("jump down", jump_down, jump_down_potential);
  line("trend up", trend_up, trend_up_potential);
  line("trend down", trend_down, trend_down_potential);
  return out.str();
}

std::string reports_table(std::span<const ChangeReport> reports) {
  std::ostringstream out;
  out << std::left << std::setw(10) << "commit" << std::setw(28) << "metric"
      << std::right << std::setw(10) << "change%" << std::setw(10) << "ci_low"
      << std::setw(10) << "ci_high" << std::setw(12) << "instab%"
      << "  intensity\n";
  out << std::fixed << std::setprecision(3);
  for (const ChangeReport& r : reports) {
    out << std::left << std::setw(10) << r.commit_id << std::setw(28)
        << r.metric_id << std::right << std::setw(10) << r.median_change_pct
        << std::setw(10) << r.ci_low_pct << std::setw(10) << r.ci_high_pct
        << std::setw(12) << r.instability_pct << "  " << to_string(r.intensity)
        << '\n';
  }
  return out.str();
}

}  // namespace benchgate
