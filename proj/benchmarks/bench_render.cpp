#include <benchmark/benchmark.h>

#include "deployopt/container.hpp"
#include "deployopt/dsl.hpp"
#include "deployopt/jobs.hpp"
#include "fixtures.hpp"
#include "golden_cases.hpp"

namespace {

void BM_ParseExampleRequest(benchmark::State& state) {
    const auto text = fixtures::read("example_request.dsl");
    for (auto _ : state) benchmark::DoNotOptimize(deployopt::parse_request(text));
}
BENCHMARK(BM_ParseExampleRequest);

void BM_RenderDefinition(benchmark::State& state) {
    const auto recipe = golden_cases::recipe_for("tensorflow-2.1-src-gpu-xla", {deployopt::Compiler::xla});
    for (auto _ : state) benchmark::DoNotOptimize(deployopt::render_definition(recipe));
}
BENCHMARK(BM_RenderDefinition);

void BM_RenderJobScript(benchmark::State& state) {
    const auto job = golden_cases::job(deployopt::Scheduler::torque, true);
    for (auto _ : state) benchmark::DoNotOptimize(deployopt::render_script(job));
}
BENCHMARK(BM_RenderJobScript);

}  // namespace
