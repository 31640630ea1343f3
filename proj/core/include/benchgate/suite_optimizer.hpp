#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "benchgate/callgraph.hpp"

namespace benchgate {

struct OptimizerConfig {
  /// A candidate must add at least this many new application nodes to be
  /// selected. 1 keeps every benchmark that contributes anything; the default
  /// of 4 drops benchmarks adding three nodes or fewer.
  std::size_t min_gain = 4;
  /// Keep only the first top_k greedy picks (selection order ranks relevance).
  std::optional<std::size_t> top_k;

  void validate() const;
};

struct SelectionStep {
  std::string benchmark_id;
  std::size_t gain_nodes = 0;        // newly covered application nodes
  std::size_t cumulative_nodes = 0;  // covered after this step
  double reference_impact_s = 0.0;   // app durations summed over this benchmark's full overlap
};

struct OptimizedSuite {
  std::string app_id;
  std::size_t app_total_nodes = 0;
  std::vector<SelectionStep> steps;
  /// Coverage of the selected suite: last cumulative_nodes / app_total_nodes.
  double practical_relevance = 0.0;
  /// Coverage of the complete candidate suite, for comparison.
  double full_suite_relevance = 0.0;

  std::vector<std::string> selected_ids() const;
};

/// Greedy redundancy removal: repeatedly picks the microbenchmark covering the
/// most not-yet-covered application nodes until the best gain falls below
/// cfg.min_gain (or top_k picks were made). Ties break on larger reference
/// impact, then lexicographically smaller benchmark id, so runs are
/// reproducible. Gain evaluation may be parallelized but the result must equal
/// sequential execution.
OptimizedSuite optimize(const CallGraph& app, const std::vector<CallGraph>& micros,
                        const OptimizerConfig& cfg = {});

/// Fraction of application nodes covered by the union of the given suite.
double practical_relevance(const CallGraph& app,
                           const std::vector<CallGraph>& micros);

/// Sum of the application-graph execution durations of the functions the
/// microbenchmark covers. Invariant to the microbenchmark's own durations.
double reference_impact(const CallGraph& app, const CallGraph& micro);

nlohmann::json suite_to_json(const OptimizedSuite& suite);
OptimizedSuite suite_from_json(const nlohmann::json& j);

/// Fixed-width table for terminal output.
std::string suite_table(const OptimizedSuite& suite);

}  // namespace benchgate
