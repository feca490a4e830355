#include <benchmark/benchmark.h>

#include "deployopt/registry.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

namespace {

deployopt::OptimisationRequest tf21(bool opt_build) {
    using namespace deployopt;
    OptimisationRequest r;
    r.enable_opt_build = opt_build;
    if (opt_build) r.opt_build = OptBuildTarget{CpuType::x86, AccType::none};
    r.ai_training = FrameworkOptions{Framework::tensorflow, *Version::parse("2.1"), {}};
    return r;
}

void BM_ResolvePriority(benchmark::State& state) {
    const auto catalog = deployopt::load_catalog(deployopt::default_catalog_path());
    const auto req = tf21(true);
    for (auto _ : state) benchmark::DoNotOptimize(deployopt::resolve_image(req, catalog));
}
BENCHMARK(BM_ResolvePriority);

void BM_ResolveWithModel(benchmark::State& state) {
    const auto catalog = deployopt::load_catalog(deployopt::default_catalog_path());
    const auto model = deployopt::load_model(fixtures::path("reference_model.json"));
    const auto w = deployopt::load_workload(fixtures::path("mnist_cnn.json"));
    const auto i = deployopt::load_infra(fixtures::path("cpu_node.json"));
    const auto req = tf21(true);
    for (auto _ : state) {
        benchmark::DoNotOptimize(deployopt::resolve_image(req, catalog, deployopt::ModelContext{model, w, i}));
    }
}
BENCHMARK(BM_ResolveWithModel);

void BM_LoadCatalog(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(deployopt::load_catalog(deployopt::default_catalog_path()));
}
BENCHMARK(BM_LoadCatalog);

}  // namespace
