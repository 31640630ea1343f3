#include "benchgate/suite_optimizer.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "benchgate/errors.hpp"
#include "text_util.hpp"

namespace benchgate {

void OptimizerConfig::validate() const {
  if (min_gain == 0) throw ValidationError("min_gain must be at least 1");
  if (top_k && *top_k == 0) throw ValidationError("top_k must be at least 1 when set");
}

std::vector<std::string> OptimizedSuite::selected_ids() const {
  std::vector<std::string> ids;
  ids.reserve(steps.size());
  for (const SelectionStep& step : steps) ids.push_back(step.benchmark_id);
  return ids;
}

double reference_impact(const CallGraph& app, const CallGraph& micro) {
  return overlap(app, micro).duration_sum;
}

double practical_relevance(const CallGraph& app,
                           const std::vector<CallGraph>& micros) {
  return static_cast<double>(union_coverage(app, micros).count()) /
         static_cast<double>(app.node_count());
}

OptimizedSuite optimize(const CallGraph& app, const std::vector<CallGraph>& micros,
                        const OptimizerConfig& cfg) {
  cfg.validate();
  if (app.origin().kind != GraphKind::application)
    throw ValidationError("optimize requires an application graph as reference");

  struct Candidate {
    const CallGraph* graph;
    std::set<FunctionId> common;  // overlap with the app graph
    double impact_s;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(micros.size());
  std::set<std::string> seen_ids;
  for (const CallGraph& micro : micros) {
    if (!seen_ids.insert(micro.origin().id).second)
      throw ValidationError("duplicate benchmark id '" + micro.origin().id + "'");
    GraphOverlap ov = overlap(app, micro);
    candidates.push_back({&micro, std::move(ov.common), ov.duration_sum});
  }

  OptimizedSuite suite;
  suite.app_id = app.origin().id;
  suite.app_total_nodes = app.node_count();
  suite.full_suite_relevance = practical_relevance(app, micros);

  std::set<FunctionId> covered;
  std::vector<bool> taken(candidates.size(), false);
  const std::size_t max_picks = cfg.top_k.value_or(candidates.size());

  while (suite.steps.size() < max_picks) {
    std::size_t best = candidates.size();
    std::size_t best_gain = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (taken[i]) continue;
      const Candidate& cand = candidates[i];
      std::size_t gain = 0;
      for (const FunctionId& fn : cand.common)
        if (!covered.count(fn)) ++gain;
      if (best == candidates.size() || gain > best_gain ||
          (gain == best_gain &&
           (cand.impact_s > candidates[best].impact_s ||
            (cand.impact_s == candidates[best].impact_s &&
             cand.graph->origin().id < candidates[best].graph->origin().id)))) {
        best = i;
        best_gain = gain;
      }
    }
    if (best == candidates.size() || best_gain < cfg.min_gain) break;

    taken[best] = true;
    const Candidate& pick = candidates[best];
    covered.insert(pick.common.begin(), pick.common.end());
    suite.steps.push_back({pick.graph->origin().id, best_gain, covered.size(),
                           pick.impact_s});
  }

  suite.practical_relevance = static_cast<double>(covered.size()) /
                              static_cast<double>(suite.app_total_nodes);
  return suite;
}

nlohmann::json suite_to_json(const OptimizedSuite& suite) {
  nlohmann::json steps = nlohmann::json::array();
  for (const SelectionStep& step : suite.steps)
    steps.push_back({{"benchmark_id", step.benchmark_id},
                     {"gain_nodes", step.gain_nodes},
                     {"cumulative_nodes", step.cumulative_nodes},
                     {"reference_impact_s", step.reference_impact_s}});
  return {
      {"app_id", suite.app_id},
      {"app_total_nodes", suite.app_total_nodes},
      {"steps", std::move(steps)},
      {"practical_relevance", suite.practical_relevance},
      {"full_suite_relevance", suite.full_suite_relevance},
  };
}

OptimizedSuite suite_from_json(const nlohmann::json& j) {
  try {
    OptimizedSuite suite;
    suite.app_id = j.at("app_id").get<std::string>();
    suite.app_total_nodes = j.at("app_total_nodes").get<std::size_t>();
    for (const auto& step : j.at("steps"))
      suite.steps.push_back({step.at("benchmark_id").get<std::string>(),
                             step.at("gain_nodes").get<std::size_t>(),
                             step.at("cumulative_nodes").get<std::size_t>(),
                             step.at("reference_impact_s").get<double>()});
    suite.practical_relevance = j.at("practical_relevance").get<double>();
    suite.full_suite_relevance = j.at("full_suite_relevance").get<double>();
    return suite;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad suite JSON: ") + e.what());
  }
}

std::string suite_table(const OptimizedSuite& suite) {
  std::ostringstream out;
  out << "suite for " << suite.app_id << " (" << suite.app_total_nodes
      << " application nodes)\n";
  out << std::left << std::setw(4) << "#" << std::setw(32) << "benchmark"
      << std::right << std::setw(8) << "gain" << std::setw(10) << "covered"
      << std::setw(14) << "impact_s" << '\n';
  for (std::size_t i = 0; i < suite.steps.size(); ++i) {
    const SelectionStep& step = suite.steps[i];
    out << std::left << std::setw(4) << (i + 1) << std::setw(32)
        << step.benchmark_id << std::right << std::setw(8) << step.gain_nodes
        << std::setw(10) << step.cumulative_nodes << std::setw(14) << std::fixed
        << std::setprecision(3) << step.reference_impact_s << '\n';
  }
  out << "practical relevance " << std::fixed << std::setprecision(1)
      << suite.practical_relevance * 100.0 << "% (full suite "
      << suite.full_suite_relevance * 100.0 << "%)\n";
  return out.str();
}

}  // namespace benchgate
