#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "benchgate/bootstrap.hpp"
#include "benchgate/callgraph.hpp"
#include "benchgate/rng.hpp"
#include "benchgate/simulator.hpp"
#include "benchgate/suite_optimizer.hpp"

namespace {

benchgate::MeasurementSet synthetic_set(benchgate::Version version,
                                        double median_s, std::uint64_t seed) {
  benchgate::SplitMix64 rng(seed);
  benchgate::MeasurementSet::Values values(3);
  for (auto& instance : values) {
    instance.resize(3);
    for (auto& suite : instance)
      for (int t = 0; t < 5; ++t)
        suite.push_back(median_s * std::exp(0.02 * rng.next_normal()));
  }
  return benchgate::MeasurementSet("bench", "c0001", version, std::move(values));
}

void BM_BootstrapHierarchical(benchmark::State& state) {
  auto base = synthetic_set(benchgate::Version::base, 1.0, 1);
  auto variation = synthetic_set(benchgate::Version::variation, 1.05, 2);
  benchgate::BootstrapConfig cfg;
  cfg.samples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto report = benchgate::bootstrap_ci(base, variation, cfg);
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_BootstrapHierarchical)->Arg(1000)->Arg(10000);

void BM_Median(benchmark::State& state) {
  benchgate::SplitMix64 rng(7);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(state.range(0)));
  for (std::int64_t i = 0; i < state.range(0); ++i)
    values.push_back(rng.next_double());
  for (auto _ : state) {
    double m = benchgate::median(values);
    benchmark::DoNotOptimize(m);
  }
}
BENCHMARK(BM_Median)->Arg(45)->Arg(1000)->Arg(100000);

void BM_Optimize(benchmark::State& state) {
  const std::int64_t n_micros = state.range(0);
  benchgate::SplitMix64 rng(11);
  benchgate::CallGraph::NodeMap app_nodes;
  for (int f = 0; f < 500; ++f)
    app_nodes.emplace("fn" + std::to_string(f), rng.next_double() * 10.0);
  benchgate::CallGraph app({benchgate::GraphKind::application, "app"},
                           app_nodes, {});
  std::vector<benchgate::CallGraph> micros;
  for (std::int64_t m = 0; m < n_micros; ++m) {
    benchgate::CallGraph::NodeMap nodes;
    for (int pick = 0; pick < 40; ++pick) {
      auto f = rng.bounded(600);
      nodes.emplace("fn" + std::to_string(f), 1.0);
    }
    micros.push_back(benchgate::CallGraph(
        {benchgate::GraphKind::microbenchmark, "mb" + std::to_string(m)}, nodes,
        {}));
  }
  for (auto _ : state) {
    auto suite = benchgate::optimize(app, micros);
    benchmark::DoNotOptimize(suite);
  }
}
BENCHMARK(BM_Optimize)->Arg(16)->Arg(64);

void BM_GenerateHistory(benchmark::State& state) {
  benchgate::SimScenario scenario;
  scenario.n_commits = static_cast<std::size_t>(state.range(0));
  scenario.noise.sigma_iteration = 0.02;
  scenario.seed = 3;
  for (auto _ : state) {
    auto history = benchgate::generate_history(scenario);
    benchmark::DoNotOptimize(history);
  }
}
BENCHMARK(BM_GenerateHistory)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
