// Tests for measurement containers, duet trimming, file ingest/serialization,
// and commit-series assembly.
//
// Trim expectations are computed by hand from the floor(n * frac) rule;
// round-trip checks compare byte-for-byte, not just structurally.

#include "benchgate/measurements.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "benchgate/errors.hpp"
#include "testutil.hpp"

namespace benchgate {
namespace {

using testutil::constant_set;
using testutil::make_series;

MeasurementSet::Values default_shape_values(double v) {
  return MeasurementSet::Values(
      3, std::vector<std::vector<double>>(3, std::vector<double>(5, v)));
}

TEST(VersionTest, StringRoundTrip) {
  EXPECT_EQ(to_string(Version::base), "base");
  EXPECT_EQ(to_string(Version::variation), "variation");
  EXPECT_EQ(version_from_string("base"), Version::base);
  EXPECT_EQ(version_from_string("variation"), Version::variation);
  EXPECT_THROW(version_from_string("v2"), ParseError);
}

TEST(MeasurementSetTest, DefaultShapeAccounting) {
  MeasurementSet set("bench.sort", "c1", Version::base,
                     default_shape_values(0.5));
  EXPECT_EQ(set.benchmark_id(), "bench.sort");
  EXPECT_EQ(set.commit_id(), "c1");
  EXPECT_EQ(set.version(), Version::base);
  EXPECT_EQ(set.leaf_count(), 45u);
  const auto shape = set.shape();
  ASSERT_EQ(shape.size(), 3u);
  for (const auto& row : shape) {
    ASSERT_EQ(row.size(), 3u);
    for (std::size_t n : row) EXPECT_EQ(n, 5u);
  }
  EXPECT_EQ(set.flatten().size(), 45u);
}

TEST(MeasurementSetTest, RaggedShapesAllowed) {
  MeasurementSet::Values v{
      {{1.0, 2.0}, {3.0}},
      {{4.0, 5.0, 6.0}},
  };
  MeasurementSet set("b", "c", Version::variation, v);
  EXPECT_EQ(set.leaf_count(), 6u);
  EXPECT_EQ(set.flatten(), (std::vector<double>{1, 2, 3, 4, 5, 6}));
  const auto shape = set.shape();
  ASSERT_EQ(shape.size(), 2u);
  EXPECT_EQ(shape[0], (std::vector<std::size_t>{2, 1}));
  EXPECT_EQ(shape[1], (std::vector<std::size_t>{3}));
}

TEST(MeasurementSetTest, RejectsEmptyAndNonPositive) {
  EXPECT_THROW(MeasurementSet("b", "c", Version::base, {}), ValidationError);
  EXPECT_THROW(MeasurementSet("b", "c", Version::base, {{}}),
               ValidationError);
  EXPECT_THROW(MeasurementSet("b", "c", Version::base, {{{}}}),
               ValidationError);
  EXPECT_THROW(MeasurementSet("b", "c", Version::base, {{{0.0}}}),
               ValidationError);
  EXPECT_THROW(MeasurementSet("b", "c", Version::base, {{{-1.0}}}),
               ValidationError);
  EXPECT_THROW(MeasurementSet("b", "c", Version::base, {{{NAN}}}),
               ValidationError);
  EXPECT_THROW(MeasurementSet("", "c", Version::base, {{{1.0}}}),
               ValidationError);
  EXPECT_THROW(MeasurementSet("b", "", Version::base, {{{1.0}}}),
               ValidationError);
}

TEST(MeasurementSetTest, ValidationMessageNamesTheSet) {
  try {
    MeasurementSet("bench.x", "c9", Version::base, {{{-2.0}}});
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("bench.x"), std::string::npos) << what;
    EXPECT_NE(what.find("c9"), std::string::npos) << what;
  }
}

TEST(AppRequestSeriesTest, ConstructionAndOrdering) {
  AppRequestSeries s("c3", Version::base, "insert",
                     {{1, 0.01}, {5, 0.02}, {9, 0.03}});
  EXPECT_EQ(s.size(), 3u);
  EXPECT_EQ(s.request_type(), "insert");
  EXPECT_EQ(s.latencies(), (std::vector<double>{0.01, 0.02, 0.03}));
}

TEST(AppRequestSeriesTest, RejectsNonIncreasingSeqAndBadLatency) {
  EXPECT_THROW(
      AppRequestSeries("c", Version::base, "insert", {{2, 0.1}, {2, 0.1}}),
      ValidationError);
  EXPECT_THROW(
      AppRequestSeries("c", Version::base, "insert", {{3, 0.1}, {1, 0.1}}),
      ValidationError);
  EXPECT_THROW(AppRequestSeries("c", Version::base, "insert", {{1, 0.0}}),
               ValidationError);
  EXPECT_THROW(AppRequestSeries("c", Version::base, "insert", {{1, -0.5}}),
               ValidationError);
  EXPECT_THROW(AppRequestSeries("c", Version::base, "", {{1, 0.5}}),
               ValidationError);
}

TEST(TrimTest, DefaultFractionsOn100Points) {
  // floor(100*0.05)=5 head, floor(100*0.20)=20 tail: seq 6..80 remain.
  AppRequestSeries s = make_series("c1", Version::base, "insert",
                                   std::vector<double>(100, 0.01));
  TrimmedSeries t = trim_duet_series(s);
  EXPECT_EQ(t.head_cut, 5u);
  EXPECT_EQ(t.tail_cut, 20u);
  ASSERT_EQ(t.series.size(), 75u);
  EXPECT_EQ(t.series.points().front().seq, 6);
  EXPECT_EQ(t.series.points().back().seq, 80);
}

TEST(TrimTest, FlooringOn20Points) {
  // floor(20*0.05)=1 head, floor(20*0.20)=4 tail: 15 points remain.
  AppRequestSeries s = make_series("c1", Version::base, "q",
                                   std::vector<double>(20, 0.01));
  TrimmedSeries t = trim_duet_series(s);
  EXPECT_EQ(t.head_cut, 1u);
  EXPECT_EQ(t.tail_cut, 4u);
  EXPECT_EQ(t.series.size(), 15u);
  EXPECT_EQ(t.series.points().front().seq, 2);
  EXPECT_EQ(t.series.points().back().seq, 16);
}

TEST(TrimTest, TinySeriesLosesNothing) {
  // floor(3*0.05)=0 and floor(3*0.20)=0.
  AppRequestSeries s =
      make_series("c1", Version::base, "q", {0.1, 0.2, 0.3});
  TrimmedSeries t = trim_duet_series(s);
  EXPECT_EQ(t.head_cut, 0u);
  EXPECT_EQ(t.tail_cut, 0u);
  EXPECT_EQ(t.series.size(), 3u);
}

TEST(TrimTest, RejectsFractionsSummingToOneOrMore) {
  AppRequestSeries s =
      make_series("c1", Version::base, "q", std::vector<double>(10, 0.1));
  EXPECT_THROW(trim_duet_series(s, {0.5, 0.5}), ValidationError);
  EXPECT_THROW(trim_duet_series(s, {0.0, 1.0}), ValidationError);
  EXPECT_THROW(trim_duet_series(s, {-0.1, 0.2}), ValidationError);
  EXPECT_NO_THROW(trim_duet_series(s, {0.4, 0.5}));
}

TEST(TrimTest, PairSharesCutsFromBase) {
  // Base has 100 points, variation 90: cuts (5, 20) come from the base and
  // apply to both, so the variation keeps 90 - 25 = 65 points.
  AppRequestSeries base = make_series("c1", Version::base, "insert",
                                      std::vector<double>(100, 0.01));
  AppRequestSeries var = make_series("c1", Version::variation, "insert",
                                     std::vector<double>(90, 0.02));
  TrimmedPair p = trim_duet_pair(base, var);
  EXPECT_EQ(p.head_cut, 5u);
  EXPECT_EQ(p.tail_cut, 20u);
  EXPECT_EQ(p.base.size(), 75u);
  EXPECT_EQ(p.variation.size(), 65u);
  EXPECT_EQ(p.base.points().front().seq, 6);
  EXPECT_EQ(p.variation.points().front().seq, 6);
}

TEST(TrimTest, PairRequiresMatchingRequestTypes) {
  AppRequestSeries base =
      make_series("c1", Version::base, "insert", std::vector<double>(10, 0.1));
  AppRequestSeries var = make_series("c1", Version::variation, "query",
                                     std::vector<double>(10, 0.1));
  EXPECT_THROW(trim_duet_pair(base, var), ValidationError);
}

TEST(TrimTest, NeverEmptiesASeries) {
  // floor(n*h) + floor(n*t) < n whenever h + t < 1, so even the most
  // aggressive legal fractions leave at least one point.
  AppRequestSeries s =
      make_series("c1", Version::base, "q", std::vector<double>(2, 0.1));
  const TrimmedSeries trimmed = trim_duet_series(s, {0.49, 0.5});
  EXPECT_EQ(trimmed.head_cut, 0u);
  EXPECT_EQ(trimmed.tail_cut, 1u);
  ASSERT_EQ(trimmed.series.size(), 1u);
  EXPECT_EQ(trimmed.series.points().front().seq, 1);
}

TEST(MicroFileTest, CsvRoundTripIsByteIdentical) {
  testutil::TempDir dir;
  std::vector<MeasurementSet> sets;
  sets.emplace_back("bench.a", "c1", Version::base,
                    MeasurementSet::Values{{{0.1, 0.25}, {0.3}}, {{0.125}}});
  sets.emplace_back("bench.a", "c1", Version::variation,
                    MeasurementSet::Values{{{0.1000001, 1e-9}}});
  sets.emplace_back("bench.b", "c2", Version::base,
                    MeasurementSet::Values{{{1.0 / 3.0}}});

  const auto p1 = dir.path() / "m1.csv";
  write_micro_measurements(p1, sets, MeasurementFormat::csv);
  auto back = ingest_micro_measurements(p1, MeasurementFormat::csv);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[0].values(), sets[0].values());
  EXPECT_EQ(back[1].values(), sets[1].values());
  EXPECT_EQ(back[2].values(), sets[2].values());
  EXPECT_EQ(back[0].benchmark_id(), "bench.a");
  EXPECT_EQ(back[1].version(), Version::variation);

  const auto p2 = dir.path() / "m2.csv";
  write_micro_measurements(p2, back, MeasurementFormat::csv);
  EXPECT_EQ(testutil::read_file(p1), testutil::read_file(p2));
}

TEST(MicroFileTest, CsvHeaderIsExact) {
  testutil::TempDir dir;
  std::vector<MeasurementSet> sets;
  sets.emplace_back("b", "c", Version::base,
                    MeasurementSet::Values{{{0.5}}});
  const auto p = dir.path() / "m.csv";
  write_micro_measurements(p, sets, MeasurementFormat::csv);
  const std::string text = testutil::read_file(p);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "benchmark,commit,version,instance,suite,iteration,duration_s");
}

TEST(MicroFileTest, RejectsWrongHeader) {
  testutil::TempDir dir;
  const auto p = dir.path() / "bad.csv";
  testutil::write_file(
      p, "benchmark,commit,version,instance,suite,iter,duration_s\n");
  EXPECT_THROW(ingest_micro_measurements(p, MeasurementFormat::csv),
               ParseError);
}

TEST(MicroFileTest, RejectsDuplicateCell) {
  testutil::TempDir dir;
  const auto p = dir.path() / "dup.csv";
  testutil::write_file(
      p,
      "benchmark,commit,version,instance,suite,iteration,duration_s\n"
      "b,c,base,0,0,0,0.5\n"
      "b,c,base,0,0,0,0.6\n");
  EXPECT_THROW(ingest_micro_measurements(p, MeasurementFormat::csv),
               ParseError);
}

TEST(MicroFileTest, RejectsIndexGaps) {
  testutil::TempDir dir;
  const auto p = dir.path() / "gap.csv";
  testutil::write_file(
      p,
      "benchmark,commit,version,instance,suite,iteration,duration_s\n"
      "b,c,base,0,0,0,0.5\n"
      "b,c,base,0,0,2,0.6\n");
  EXPECT_THROW(ingest_micro_measurements(p, MeasurementFormat::csv),
               ParseError);
}

TEST(MicroFileTest, JsonRoundTripIsByteIdentical) {
  testutil::TempDir dir;
  std::vector<MeasurementSet> sets;
  sets.emplace_back("bench.a", "c1", Version::base,
                    MeasurementSet::Values{{{0.1, 0.2}, {0.3}}});
  const auto p1 = dir.path() / "m1.json";
  const auto p2 = dir.path() / "m2.json";
  write_micro_measurements(p1, sets, MeasurementFormat::json);
  auto back = ingest_micro_measurements(p1, MeasurementFormat::json);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].values(), sets[0].values());
  write_micro_measurements(p2, back, MeasurementFormat::json);
  EXPECT_EQ(testutil::read_file(p1), testutil::read_file(p2));
}

TEST(AppFileTest, CsvRoundTripIsByteIdentical) {
  testutil::TempDir dir;
  std::vector<AppRequestSeries> series;
  series.push_back(make_series("c1", Version::base, "insert",
                               {0.001, 0.0025, 0.25}));
  series.push_back(make_series("c1", Version::variation, "insert",
                               {0.002, 0.003, 0.031}));
  series.push_back(
      make_series("c2", Version::base, "simple_query", {1.0 / 7.0}));
  const auto p1 = dir.path() / "a1.csv";
  const auto p2 = dir.path() / "a2.csv";
  write_app_series(p1, series, MeasurementFormat::csv);
  auto back = ingest_app_series(p1, MeasurementFormat::csv);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[0].latencies(), series[0].latencies());
  EXPECT_EQ(back[2].request_type(), "simple_query");
  write_app_series(p2, back, MeasurementFormat::csv);
  EXPECT_EQ(testutil::read_file(p1), testutil::read_file(p2));

  const std::string text = testutil::read_file(p1);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "commit,version,request_type,seq,latency_s");
}

TEST(AppFileTest, JsonRoundTrip) {
  testutil::TempDir dir;
  std::vector<AppRequestSeries> series;
  series.push_back(make_series("c1", Version::base, "groupby_query",
                               {0.5, 0.625, 0.75}));
  const auto p = dir.path() / "a.json";
  write_app_series(p, series, MeasurementFormat::json);
  auto back = ingest_app_series(p, MeasurementFormat::json);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].latencies(), series[0].latencies());
  EXPECT_EQ(back[0].points()[1].seq, series[0].points()[1].seq);
}

TEST(AppFileTest, RejectsNonIncreasingSeq) {
  testutil::TempDir dir;
  const auto p = dir.path() / "bad.csv";
  testutil::write_file(p,
                       "commit,version,request_type,seq,latency_s\n"
                       "c1,base,insert,5,0.1\n"
                       "c1,base,insert,4,0.1\n");
  EXPECT_THROW(ingest_app_series(p, MeasurementFormat::csv), ValidationError);
}

CommitSeries small_series() {
  std::vector<std::string> commits{"c1", "c2"};
  std::vector<MeasurementSet> micro;
  micro.push_back(constant_set("bench.a", "c1", Version::base, 0.1));
  micro.push_back(constant_set("bench.a", "c1", Version::variation, 0.1));
  micro.push_back(constant_set("bench.a", "c2", Version::base, 0.1));
  micro.push_back(constant_set("bench.a", "c2", Version::variation, 0.2));
  std::vector<AppRequestSeries> app;
  app.push_back(make_series("c1", Version::base, "insert", {0.1, 0.1, 0.1}));
  app.push_back(
      make_series("c1", Version::variation, "insert", {0.1, 0.1, 0.1}));
  return CommitSeries("proj", "c0", commits, micro, app);
}

TEST(CommitSeriesTest, GroupsPairsByMetricAndCommit) {
  CommitSeries s = small_series();
  EXPECT_EQ(s.project_id(), "proj");
  EXPECT_EQ(s.base_commit_id(), "c0");
  EXPECT_EQ(s.commits(), (std::vector<std::string>{"c1", "c2"}));
  EXPECT_EQ(s.micro_metric_ids(), (std::vector<std::string>{"bench.a"}));
  EXPECT_EQ(s.app_metric_ids(), (std::vector<std::string>{"insert"}));

  const auto& micro = s.micro_series("bench.a");
  ASSERT_EQ(micro.size(), 2u);
  EXPECT_EQ(micro.at(0).base.commit_id(), "c1");
  EXPECT_EQ(micro.at(1).variation.commit_id(), "c2");
  EXPECT_EQ(micro.at(0).base.version(), Version::base);

  const auto& app = s.app_series("insert");
  ASSERT_EQ(app.size(), 1u);
  EXPECT_EQ(app.at(0).base.commit_id(), "c1");
}

TEST(CommitSeriesTest, UnknownMetricThrows) {
  CommitSeries s = small_series();
  EXPECT_THROW(s.micro_series("nope"), ValidationError);
  EXPECT_THROW(s.app_series("nope"), ValidationError);
}

TEST(CommitSeriesTest, RejectsDuplicateCommits) {
  EXPECT_THROW(CommitSeries("p", "c0", {"c1", "c1"}, {}, {}),
               ValidationError);
}

TEST(CommitSeriesTest, RejectsUnknownCommitInMeasurements) {
  std::vector<MeasurementSet> micro;
  micro.push_back(constant_set("b", "zz", Version::base, 0.1));
  micro.push_back(constant_set("b", "zz", Version::variation, 0.1));
  EXPECT_THROW(CommitSeries("p", "c0", {"c1"}, micro, {}), ValidationError);
}

TEST(CommitSeriesTest, RejectsMissingPairHalf) {
  std::vector<MeasurementSet> micro;
  micro.push_back(constant_set("b", "c1", Version::base, 0.1));
  EXPECT_THROW(CommitSeries("p", "c0", {"c1"}, micro, {}), ValidationError);

  std::vector<AppRequestSeries> app;
  app.push_back(make_series("c1", Version::variation, "q", {0.1}));
  EXPECT_THROW(CommitSeries("p", "c0", {"c1"}, {}, app), ValidationError);
}

TEST(CommitSeriesTest, RejectsDuplicateSetForSameSlot) {
  std::vector<MeasurementSet> micro;
  micro.push_back(constant_set("b", "c1", Version::base, 0.1));
  micro.push_back(constant_set("b", "c1", Version::base, 0.2));
  micro.push_back(constant_set("b", "c1", Version::variation, 0.1));
  EXPECT_THROW(CommitSeries("p", "c0", {"c1"}, micro, {}), ValidationError);
}

TEST(ManifestTest, LoadsRelativeFilesAndAssemblesSeries) {
  testutil::TempDir dir;

  std::vector<MeasurementSet> micro;
  micro.push_back(constant_set("bench.a", "c1", Version::base, 0.1));
  micro.push_back(constant_set("bench.a", "c1", Version::variation, 0.11));
  write_micro_measurements(dir.path() / "micro.csv", micro,
                           MeasurementFormat::csv);

  std::vector<AppRequestSeries> app;
  app.push_back(make_series("c1", Version::base, "insert", {0.1, 0.2}));
  app.push_back(make_series("c1", Version::variation, "insert", {0.1, 0.2}));
  write_app_series(dir.path() / "app.json", app, MeasurementFormat::json);

  write_manifest(dir.path() / "manifest.json", "proj", "c0", {"c1"},
                 {"micro.csv"}, {"app.json"});

  CommitSeries s = load_commit_series(dir.path() / "manifest.json");
  EXPECT_EQ(s.project_id(), "proj");
  EXPECT_EQ(s.micro_metric_ids(), (std::vector<std::string>{"bench.a"}));
  EXPECT_EQ(s.app_metric_ids(), (std::vector<std::string>{"insert"}));
  EXPECT_EQ(s.micro_series("bench.a").at(0).variation.leaf_count(), 45u);
}

TEST(ManifestTest, MissingFileNamesIt) {
  testutil::TempDir dir;
  write_manifest(dir.path() / "manifest.json", "proj", "c0", {"c1"},
                 {"absent.csv"}, {});
  try {
    load_commit_series(dir.path() / "manifest.json");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("absent.csv"), std::string::npos);
  }
}

}  // namespace
}  // namespace benchgate
