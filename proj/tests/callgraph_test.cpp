// Tests for call-graph construction, (de)serialization, and overlap algebra.
//
// Expected overlap and union values come from a brute-force oracle in this
// file (set operations over node maps), never from the library under test.

#include "benchgate/callgraph.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "benchgate/errors.hpp"
#include "benchgate/rng.hpp"
#include "testutil.hpp"

namespace benchgate {
namespace {

using testutil::make_app;
using testutil::make_micro;

// Brute-force oracle: intersect node-id sets, summing app durations.
GraphOverlap oracle_overlap(const CallGraph& app, const CallGraph& micro) {
  GraphOverlap result;
  for (const auto& [fn, dur] : app.nodes()) {
    if (micro.contains(fn)) {
      result.common.insert(fn);
      result.duration_sum += dur;
    }
  }
  return result;
}

// Brute-force oracle: union of covered app node ids, app-duration weighted.
GraphOverlap oracle_union(const CallGraph& app,
                          const std::vector<CallGraph>& micros) {
  GraphOverlap result;
  for (const auto& [fn, dur] : app.nodes()) {
    for (const CallGraph& m : micros) {
      if (m.contains(fn)) {
        result.common.insert(fn);
        result.duration_sum += dur;
        break;
      }
    }
  }
  return result;
}

TEST(CallGraphTest, ConstructionAndAccessors) {
  CallGraph g({GraphKind::application, "svc"},
              {{"a", 1.5}, {"b", 0.0}, {"c", 2.5}}, {{"a", "b"}, {"a", "c"}});
  EXPECT_EQ(g.origin().id, "svc");
  EXPECT_EQ(g.origin().kind, GraphKind::application);
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_TRUE(g.contains("a"));
  EXPECT_FALSE(g.contains("z"));
  EXPECT_DOUBLE_EQ(g.total_duration(), 4.0);
  EXPECT_EQ(g.edges().size(), 2u);
}

TEST(CallGraphTest, RejectsEmptyGraph) {
  EXPECT_THROW(CallGraph({GraphKind::application, "x"}, {}),
               ValidationError);
}

TEST(CallGraphTest, RejectsEmptyFunctionName) {
  EXPECT_THROW(CallGraph({GraphKind::application, "x"}, {{"", 1.0}}),
               ValidationError);
}

TEST(CallGraphTest, RejectsNegativeOrNonFiniteDuration) {
  EXPECT_THROW(CallGraph({GraphKind::application, "x"}, {{"a", -1.0}}),
               ValidationError);
  EXPECT_THROW(
      CallGraph({GraphKind::application, "x"},
                {{"a", std::numeric_limits<double>::infinity()}}),
      ValidationError);
  EXPECT_THROW(
      CallGraph({GraphKind::application, "x"},
                {{"a", std::numeric_limits<double>::quiet_NaN()}}),
      ValidationError);
}

TEST(CallGraphTest, RejectsDanglingEdge) {
  EXPECT_THROW(CallGraph({GraphKind::application, "x"}, {{"a", 1.0}},
                         {{"a", "missing"}}),
               ValidationError);
  EXPECT_THROW(CallGraph({GraphKind::application, "x"}, {{"a", 1.0}},
                         {{"missing", "a"}}),
               ValidationError);
}

TEST(GraphKindTest, StringRoundTrip) {
  EXPECT_EQ(to_string(GraphKind::application), "application");
  EXPECT_EQ(to_string(GraphKind::microbenchmark), "microbenchmark");
  EXPECT_EQ(graph_kind_from_string("application"), GraphKind::application);
  EXPECT_EQ(graph_kind_from_string("microbenchmark"),
            GraphKind::microbenchmark);
  EXPECT_THROW(graph_kind_from_string("app"), ParseError);
}

TEST(OverlapTest, WeightsComeFromApplicationGraph) {
  // Shared node ids, wildly different micro durations: only the app's
  // durations may contribute.
  CallGraph app = make_app("app", {{"a", 10.0}, {"b", 5.0}, {"c", 1.0}});
  CallGraph micro = make_micro("m1", {{"a", 99.0}, {"d", 7.0}});
  GraphOverlap ov = overlap(app, micro);
  EXPECT_EQ(ov.common, (std::set<FunctionId>{"a"}));
  EXPECT_EQ(ov.count(), 1u);
  EXPECT_DOUBLE_EQ(ov.duration_sum, 10.0);
}

TEST(OverlapTest, FirstArgumentMustBeApplication) {
  CallGraph app = make_app("app", {{"a", 1.0}});
  CallGraph micro = make_micro("m", {{"a", 1.0}});
  EXPECT_THROW(overlap(micro, app), ValidationError);
  EXPECT_THROW(overlap(micro, micro), ValidationError);
}

TEST(OverlapTest, AppWithItselfCoversEverything) {
  CallGraph app = make_app("app", {{"a", 1.0}, {"b", 2.0}, {"c", 4.0}});
  GraphOverlap ov = overlap(app, app);
  EXPECT_EQ(ov.count(), 3u);
  EXPECT_DOUBLE_EQ(ov.duration_sum, 7.0);
}

TEST(OverlapTest, DisjointGraphsShareNothing) {
  CallGraph app = make_app("app", {{"a", 1.0}});
  CallGraph micro = make_micro("m", {{"x", 1.0}});
  GraphOverlap ov = overlap(app, micro);
  EXPECT_TRUE(ov.common.empty());
  EXPECT_DOUBLE_EQ(ov.duration_sum, 0.0);
}

TEST(OverlapTest, MatchesBruteForceOracleOnRandomGraphs) {
  // Integer durations so sums are exact regardless of accumulation order.
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    CallGraph::NodeMap app_nodes, micro_nodes;
    const std::size_t app_n = 1 + rng.bounded(30);
    const std::size_t micro_n = 1 + rng.bounded(30);
    for (std::size_t i = 0; i < app_n; ++i)
      app_nodes["f" + std::to_string(rng.bounded(40))] =
          static_cast<double>(rng.bounded(10));
    for (std::size_t i = 0; i < micro_n; ++i)
      micro_nodes["f" + std::to_string(rng.bounded(40))] =
          static_cast<double>(rng.bounded(10));
    CallGraph app({GraphKind::application, "app"}, app_nodes);
    CallGraph micro({GraphKind::microbenchmark, "m"}, micro_nodes);

    GraphOverlap got = overlap(app, micro);
    GraphOverlap want = oracle_overlap(app, micro);
    EXPECT_EQ(got.common, want.common);
    EXPECT_DOUBLE_EQ(got.duration_sum, want.duration_sum);
  }
}

TEST(UnionCoverageTest, CountsEachAppNodeOnce) {
  CallGraph app =
      make_app("app", {{"a", 1.0}, {"b", 2.0}, {"c", 4.0}, {"d", 8.0}});
  std::vector<CallGraph> micros;
  micros.push_back(make_micro("m1", {{"a", 0.1}, {"b", 0.1}}));
  micros.push_back(make_micro("m2", {{"b", 0.1}, {"c", 0.1}}));
  GraphOverlap u = union_coverage(app, micros);
  EXPECT_EQ(u.common, (std::set<FunctionId>{"a", "b", "c"}));
  EXPECT_DOUBLE_EQ(u.duration_sum, 7.0);  // b counted once
}

TEST(UnionCoverageTest, EmptyMicroListCoversNothing) {
  CallGraph app = make_app("app", {{"a", 1.0}});
  GraphOverlap u = union_coverage(app, {});
  EXPECT_TRUE(u.common.empty());
  EXPECT_DOUBLE_EQ(u.duration_sum, 0.0);
}

TEST(UnionCoverageTest, MatchesBruteForceOracleOnRandomSets) {
  SplitMix64 rng(777);
  for (int trial = 0; trial < 100; ++trial) {
    CallGraph::NodeMap app_nodes;
    const std::size_t app_n = 1 + rng.bounded(40);
    for (std::size_t i = 0; i < app_n; ++i)
      app_nodes["f" + std::to_string(rng.bounded(60))] =
          static_cast<double>(rng.bounded(10));
    CallGraph app({GraphKind::application, "app"}, app_nodes);

    std::vector<CallGraph> micros;
    const std::size_t micro_count = rng.bounded(6);
    for (std::size_t m = 0; m < micro_count; ++m) {
      CallGraph::NodeMap nodes;
      const std::size_t n = 1 + rng.bounded(20);
      for (std::size_t i = 0; i < n; ++i)
        nodes["f" + std::to_string(rng.bounded(60))] = 1.0;
      micros.push_back(
          CallGraph({GraphKind::microbenchmark, "m" + std::to_string(m)},
                    std::move(nodes)));
    }

    GraphOverlap got = union_coverage(app, micros);
    GraphOverlap want = oracle_union(app, micros);
    EXPECT_EQ(got.common, want.common);
    EXPECT_DOUBLE_EQ(got.duration_sum, want.duration_sum);
  }
}

TEST(CallGraphJsonTest, RoundTripPreservesEverything) {
  CallGraph g({GraphKind::microbenchmark, "bench/parse"},
              {{"parse", 0.125}, {"lex", 0.0625}, {"emit", 3.5}},
              {{"parse", "lex"}, {"parse", "emit"}});
  CallGraph back = callgraph_from_json(callgraph_to_json(g));
  EXPECT_EQ(back.origin().kind, g.origin().kind);
  EXPECT_EQ(back.origin().id, g.origin().id);
  EXPECT_EQ(back.nodes(), g.nodes());
  EXPECT_EQ(back.edges(), g.edges());
}

TEST(CallGraphJsonTest, RejectsDuplicateFunction) {
  nlohmann::json j = {
      {"kind", "application"},
      {"id", "app"},
      {"nodes", nlohmann::json::array({{{"fn", "a"}, {"duration_s", 1.0}},
                                       {{"fn", "a"}, {"duration_s", 2.0}}})},
      {"edges", nlohmann::json::array()},
  };
  EXPECT_THROW(callgraph_from_json(j), ParseError);
}

TEST(CallGraphJsonTest, RejectsMalformedDocument) {
  EXPECT_THROW(callgraph_from_json(nlohmann::json::array()), ParseError);
  EXPECT_THROW(callgraph_from_json(nlohmann::json{{"kind", "application"}}),
               ParseError);
}

TEST(CallGraphFileTest, JsonFileRoundTrip) {
  testutil::TempDir dir;
  CallGraph g = make_app("app", {{"a", 1.0}, {"b", 2.0}});
  const auto path = dir.path() / "g.json";
  save_callgraph(g, path, GraphFormat::json);
  CallGraph back = load_callgraph(path, GraphFormat::json);
  EXPECT_EQ(back.nodes(), g.nodes());
  EXPECT_EQ(back.origin().id, "app");
}

TEST(CallGraphFileTest, EdgeCsvRoundTrip) {
  testutil::TempDir dir;
  CallGraph g({GraphKind::application, "svc"},
              {{"main", 9.0}, {"work", 4.5}, {"log", 0.5}},
              {{"main", "work"}, {"work", "log"}});
  const auto path = dir.path() / "g.csv";
  save_callgraph(g, path, GraphFormat::edge_csv);
  CallGraph back = load_callgraph(path, GraphFormat::edge_csv);
  EXPECT_EQ(back.origin().kind, GraphKind::application);
  EXPECT_EQ(back.origin().id, "svc");
  EXPECT_EQ(back.nodes(), g.nodes());
  EXPECT_EQ(back.edges(), g.edges());
}

TEST(CallGraphFileTest, EdgeCsvDefaultsOriginToFileStem) {
  testutil::TempDir dir;
  const auto path = dir.path() / "my_bench.csv";
  testutil::write_file(path,
                       "# comment line\n"
                       "node,alpha,2.0\n"
                       "node,beta,1.0\n"
                       "\n"
                       "edge,alpha,beta\n");
  CallGraph g = load_callgraph(path, GraphFormat::edge_csv);
  EXPECT_EQ(g.origin().kind, GraphKind::microbenchmark);
  EXPECT_EQ(g.origin().id, "my_bench");
  EXPECT_EQ(g.node_count(), 2u);
  EXPECT_EQ(g.edges().size(), 1u);
}

TEST(CallGraphFileTest, EdgeCsvReportsLineNumbers) {
  testutil::TempDir dir;
  const auto path = dir.path() / "bad.csv";
  testutil::write_file(path, "node,a,1.0\nnode,b\n");
  try {
    load_callgraph(path, GraphFormat::edge_csv);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos)
        << e.what();
  }
}

TEST(CallGraphFileTest, MissingFileNamesPath) {
  try {
    load_callgraph("/nonexistent/nowhere.json", GraphFormat::json);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("nowhere.json"), std::string::npos);
  }
}

TEST(CallGraphScaleTest, HandlesRealisticNodeCounts) {
  // Node counts in the range seen for real services (several hundred).
  CallGraph::NodeMap app_nodes, micro_nodes;
  for (int i = 0; i < 634; ++i)
    app_nodes["fn" + std::to_string(i)] = 0.001 * (i % 17 + 1);
  for (int i = 0; i < 314; ++i) micro_nodes["fn" + std::to_string(i)] = 0.5;
  CallGraph app({GraphKind::application, "big"}, std::move(app_nodes));
  CallGraph micro({GraphKind::microbenchmark, "m"}, std::move(micro_nodes));
  GraphOverlap ov = overlap(app, micro);
  EXPECT_EQ(ov.count(), 314u);
  GraphOverlap want = oracle_overlap(app, micro);
  EXPECT_DOUBLE_EQ(ov.duration_sum, want.duration_sum);
}

}  // namespace
}  // namespace benchgate
