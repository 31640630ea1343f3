#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace benchgate {

/// Fully qualified function name; opaque, case-sensitive, compared exactly.
using FunctionId = std::string;

enum class GraphKind { application, microbenchmark };

std::string_view to_string(GraphKind kind);
GraphKind graph_kind_from_string(std::string_view s);

struct GraphOrigin {
  GraphKind kind = GraphKind::microbenchmark;
  std::string id;
};

enum class GraphFormat { json, edge_csv };

/// A call graph recorded during one benchmark run. Node weights are the
/// cumulative execution durations of the functions, in seconds. Edges are
/// retained for inspection but carry no role in coverage computations.
/// Immutable after construction and safe to share across threads.
class CallGraph {
 public:
  using NodeMap = std::map<FunctionId, double>;
  using Edge = std::pair<FunctionId, FunctionId>;
  using EdgeSet = std::set<Edge>;

  /// Validates: at least one node, finite durations >= 0, no dangling edges.
  CallGraph(GraphOrigin origin, NodeMap nodes, EdgeSet edges = {});

  const GraphOrigin& origin() const { return origin_; }
  const NodeMap& nodes() const { return nodes_; }
  const EdgeSet& edges() const { return edges_; }

  std::size_t node_count() const { return nodes_.size(); }
  bool contains(const FunctionId& fn) const { return nodes_.count(fn) != 0; }

  /// Sum of all node durations.
  double total_duration() const;

 private:
  GraphOrigin origin_;
  NodeMap nodes_;
  EdgeSet edges_;
};

/// Node-id intersection of an application graph with one or more
/// microbenchmark graphs. duration_sum is taken from the application graph's
/// durations only.
struct GraphOverlap {
  std::set<FunctionId> common;
  double duration_sum = 0.0;

  std::size_t count() const { return common.size(); }
};

CallGraph load_callgraph(const std::filesystem::path& path, GraphFormat format);
void save_callgraph(const CallGraph& graph, const std::filesystem::path& path,
                    GraphFormat format);

nlohmann::json callgraph_to_json(const CallGraph& graph);
CallGraph callgraph_from_json(const nlohmann::json& j);

/// Nodes common to both graphs, weighted by the application graph.
/// The first argument must have application origin.
GraphOverlap overlap(const CallGraph& app, const CallGraph& micro);

/// Union of the per-microbenchmark overlaps with the application graph.
GraphOverlap union_coverage(const CallGraph& app,
                            const std::vector<CallGraph>& micros);

}  // namespace benchgate
