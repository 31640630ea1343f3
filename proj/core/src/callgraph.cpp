#include "benchgate/callgraph.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "benchgate/errors.hpp"
#include "text_util.hpp"

namespace benchgate {

std::string_view to_string(GraphKind kind) {
  return kind == GraphKind::application ? "application" : "microbenchmark";
}

GraphKind graph_kind_from_string(std::string_view s) {
  if (s == "application") return GraphKind::application;
  if (s == "microbenchmark") return GraphKind::microbenchmark;
  throw ParseError("unknown graph kind '" + std::string(s) + "'");
}

CallGraph::CallGraph(GraphOrigin origin, NodeMap nodes, EdgeSet edges)
    : origin_(std::move(origin)), nodes_(std::move(nodes)), edges_(std::move(edges)) {
  if (nodes_.empty())
    throw ValidationError("call graph '" + origin_.id + "' has no nodes");
  for (const auto& [fn, duration] : nodes_) {
    if (fn.empty())
      throw ValidationError("call graph '" + origin_.id + "' has an empty function id");
    if (!std::isfinite(duration) || duration < 0.0)
      throw ValidationError("node '" + fn + "' in graph '" + origin_.id +
                            "' has invalid duration");
  }
  for (const auto& [caller, callee] : edges_) {
    if (!nodes_.count(caller) || !nodes_.count(callee))
      throw ValidationError("edge (" + caller + ", " + callee + ") in graph '" +
                            origin_.id + "' references a missing node");
  }
}

double CallGraph::total_duration() const {
  double sum = 0.0;
  for (const auto& [fn, duration] : nodes_) sum += duration;
  return sum;
}

nlohmann::json callgraph_to_json(const CallGraph& graph) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& [fn, duration] : graph.nodes())
    nodes.push_back({{"fn", fn}, {"duration_s", duration}});
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [caller, callee] : graph.edges())
    edges.push_back(nlohmann::json::array({caller, callee}));
  return {
      {"origin",
       {{"kind", std::string(to_string(graph.origin().kind))},
        {"id", graph.origin().id}}},
      {"nodes", std::move(nodes)},
      {"edges", std::move(edges)},
  };
}

CallGraph callgraph_from_json(const nlohmann::json& j) {
  try {
    GraphOrigin origin;
    origin.kind = graph_kind_from_string(j.at("origin").at("kind").get<std::string>());
    origin.id = j.at("origin").at("id").get<std::string>();

    CallGraph::NodeMap nodes;
    for (const auto& node : j.at("nodes")) {
      auto fn = node.at("fn").get<std::string>();
      auto [it, inserted] = nodes.emplace(fn, node.at("duration_s").get<double>());
      if (!inserted) throw ParseError("duplicate node '" + fn + "'");
    }

    CallGraph::EdgeSet edges;
    if (j.contains("edges")) {
      for (const auto& edge : j.at("edges")) {
        if (!edge.is_array() || edge.size() != 2)
          throw ParseError("edge entries must be [caller, callee] pairs");
        edges.emplace(edge.at(0).get<std::string>(), edge.at(1).get<std::string>());
      }
    }
    return CallGraph(std::move(origin), std::move(nodes), std::move(edges));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad call graph JSON: ") + e.what());
  }
}

namespace {

CallGraph load_edge_csv(const std::filesystem::path& path, std::istream& in) {
  GraphOrigin origin{GraphKind::microbenchmark, path.stem().string()};
  bool origin_seen = false;
  CallGraph::NodeMap nodes;
  CallGraph::EdgeSet edges;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = detail::strip(line);
    if (text.empty() || text.front() == '#') continue;

    const std::string where = path.string() + ":" + std::to_string(line_no);
    auto fields = detail::split(text, ',');
    if (fields.size() != 3)
      throw ParseError("expected 3 fields at " + where);

    std::string_view kind = detail::strip(fields[0]);
    if (kind == "node") {
      std::string fn{detail::strip(fields[1])};
      double duration = detail::parse_double(detail::strip(fields[2]), where);
      auto [it, inserted] = nodes.emplace(std::move(fn), duration);
      if (!inserted)
        throw ParseError("duplicate node '" + it->first + "' at " + where);
    } else if (kind == "edge") {
      edges.emplace(std::string(detail::strip(fields[1])),
                    std::string(detail::strip(fields[2])));
    } else if (kind == "origin") {
      if (origin_seen) throw ParseError("second origin record at " + where);
      origin.kind = graph_kind_from_string(detail::strip(fields[1]));
      origin.id = std::string(detail::strip(fields[2]));
      origin_seen = true;
    } else {
      throw ParseError("unknown record type '" + std::string(kind) + "' at " + where);
    }
  }
  return CallGraph(std::move(origin), std::move(nodes), std::move(edges));
}

}  // namespace

CallGraph load_callgraph(const std::filesystem::path& path, GraphFormat format) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open call graph file " + path.string());
  if (format == GraphFormat::json) {
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("bad JSON in " + path.string() + ": " + e.what());
    }
    return callgraph_from_json(j);
  }
  return load_edge_csv(path, in);
}

void save_callgraph(const CallGraph& graph, const std::filesystem::path& path,
                    GraphFormat format) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write call graph file " + path.string());
  if (format == GraphFormat::json) {
    out << callgraph_to_json(graph).dump(2) << '\n';
    return;
  }
  out << "origin," << to_string(graph.origin().kind) << ',' << graph.origin().id
      << '\n';
  for (const auto& [fn, duration] : graph.nodes())
    out << "node," << fn << ',' << detail::format_double(duration) << '\n';
  for (const auto& [caller, callee] : graph.edges())
    out << "edge," << caller << ',' << callee << '\n';
}

GraphOverlap overlap(const CallGraph& app, const CallGraph& micro) {
  if (app.origin().kind != GraphKind::application)
    throw ValidationError("overlap requires an application graph as reference, got '" +
                          app.origin().id + "'");
  GraphOverlap result;
  // Walk the smaller map, look up in the other; durations always from app.
  if (micro.node_count() < app.node_count()) {
    for (const auto& [fn, unused] : micro.nodes()) {
      auto it = app.nodes().find(fn);
      if (it == app.nodes().end()) continue;
      result.common.insert(fn);
      result.duration_sum += it->second;
    }
  } else {
    for (const auto& [fn, duration] : app.nodes()) {
      if (!micro.contains(fn)) continue;
      result.common.insert(fn);
      result.duration_sum += duration;
    }
  }
  return result;
}

GraphOverlap union_coverage(const CallGraph& app,
                            const std::vector<CallGraph>& micros) {
  if (app.origin().kind != GraphKind::application)
    throw ValidationError("union_coverage requires an application graph as reference");
  GraphOverlap result;
  for (const CallGraph& micro : micros) {
    for (const auto& [fn, unused] : micro.nodes()) {
      auto it = app.nodes().find(fn);
      if (it == app.nodes().end()) continue;
      if (result.common.insert(fn).second) result.duration_sum += it->second;
    }
  }
  return result;
}

}  // namespace benchgate
