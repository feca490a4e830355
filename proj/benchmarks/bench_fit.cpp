#include <benchmark/benchmark.h>

#include "deployopt/perf_model.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

namespace {

void BM_FitFixture(benchmark::State& state) {
    const auto records = deployopt::load_records_csv(fixtures::path("reference_runtimes.csv"));
    for (auto _ : state) benchmark::DoNotOptimize(deployopt::fit(records, 0.0));
}
BENCHMARK(BM_FitFixture);

// Random designs with 2 * tags + 4 features.
void BM_FitRandom(benchmark::State& state) {
    gen::Rng rng(1);
    std::vector<std::string> tags;
    for (int t = 0; t < state.range(0); ++t) tags.push_back("cfg" + std::to_string(t));
    const auto records = gen::records(rng, tags, 0.02);
    for (auto _ : state) benchmark::DoNotOptimize(deployopt::fit(records, 1e-8));
    state.counters["features"] = static_cast<double>(2 * tags.size() + 4);
    state.counters["records"] = static_cast<double>(records.size());
}
BENCHMARK(BM_FitRandom)->Arg(4)->Arg(23)->Arg(100);

void BM_RankFixture(benchmark::State& state) {
    const auto model = deployopt::load_model(fixtures::path("reference_model.json"));
    const auto w = deployopt::load_workload(fixtures::path("mnist_cnn.json"));
    const auto i = deployopt::load_infra(fixtures::path("cpu_node.json"));
    const std::vector<std::string> tags(model.covered_tags.begin(), model.covered_tags.end());
    for (auto _ : state) benchmark::DoNotOptimize(deployopt::rank_configurations(model, tags, w, i));
}
BENCHMARK(BM_RankFixture);

}  // namespace
