#pragma once

// Hand-rolled random generators for property tests.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "deployopt/dsl.hpp"
#include "deployopt/perf_model.hpp"
#include "deployopt/registry.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline double real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline bool coin(Rng& rng) { return uniform(rng, 0, 1) == 1; }

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
    return items[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(items.size()) - 1))];
}

inline deployopt::Version version(Rng& rng) {
    std::string text = std::to_string(uniform(rng, 0, 3));
    const int extra = uniform(rng, 1, 2);
    for (int i = 0; i < extra; ++i) text += "." + std::to_string(uniform(rng, 0, 20));
    return *deployopt::Version::parse(text);
}

/// A small version pool so that random catalogs and requests collide.
inline deployopt::Version pooled_version(Rng& rng) {
    static const std::vector<std::string> pool = {"1.4", "1.14", "2.0", "2.1"};
    return *deployopt::Version::parse(pick(rng, pool));
}

inline deployopt::OptimisationRequest request(Rng& rng, bool pooled = false) {
    using namespace deployopt;
    OptimisationRequest r;
    r.enable_opt_build = coin(rng);
    r.app_type = AppType::ai_training;
    if (r.enable_opt_build || coin(rng)) {
        OptBuildTarget t;
        do {
            t.cpu_type = static_cast<CpuType>(uniform(rng, 0, 3));
            t.acc_type = static_cast<AccType>(uniform(rng, 0, 3));
        } while (t.cpu_type == CpuType::none && t.acc_type == AccType::none);
        r.opt_build = t;
    }
    FrameworkOptions fo;
    fo.framework = static_cast<Framework>(uniform(rng, 0, 3));
    fo.version = pooled ? pooled_version(rng) : version(rng);
    if (coin(rng)) {
        std::vector<Compiler> ok;
        for (Compiler c : {Compiler::glow, Compiler::ngraph, Compiler::xla}) {
            if (compiler_host(c) == fo.framework) ok.push_back(c);
        }
        if (!ok.empty()) fo.compilers.insert(pick(rng, ok));
    }
    r.ai_training = fo;
    return r;
}

inline deployopt::ImageSpec image(Rng& rng) {
    using namespace deployopt;
    ImageSpec s;
    s.framework = static_cast<Framework>(uniform(rng, 0, 3));
    s.version = pooled_version(rng);
    s.source = static_cast<Source>(uniform(rng, 0, 2));
    s.target = static_cast<Target>(uniform(rng, 0, 1));
    for (Compiler c : {Compiler::glow, Compiler::ngraph, Compiler::xla}) {
        if (compiler_host(c) == s.framework && coin(rng)) s.capabilities.insert(c);
    }
    if (uniform(rng, 0, 3) == 0) {
        static const std::vector<std::string> fields = {"version", "xla.version", "ngraph.version", "glow.version"};
        s.constraints.push_back({pick(rng, fields), static_cast<ConstraintOp>(uniform(rng, 0, 4)),
                                 pooled_version(rng).str()});
    }
    if (uniform(rng, 0, 7) == 0) {
        s.constraints.push_back({"acc_type", ConstraintOp::eq, coin(rng) ? "nvidia" : "none"});
    }
    s.uri = "images/" + tag_of(s) + ".sif";
    return s;
}

/// Up to `max_entries` images with distinct tags.
inline std::vector<deployopt::ImageSpec> catalog_entries(Rng& rng, int max_entries) {
    std::vector<deployopt::ImageSpec> out;
    std::vector<std::string> seen;
    const int n = uniform(rng, 0, max_entries);
    for (int i = 0; i < n; ++i) {
        auto s = image(rng);
        const auto t = deployopt::tag_of(s);
        if (std::find(seen.begin(), seen.end(), t) != seen.end()) continue;
        seen.push_back(t);
        out.push_back(std::move(s));
    }
    return out;
}

inline deployopt::WorkloadDescriptor workload(Rng& rng) {
    deployopt::WorkloadDescriptor w;
    w.name = "w" + std::to_string(uniform(rng, 0, 9));
    w.batch_size = static_cast<unsigned long>(uniform(rng, 16, 256));
    w.epochs = static_cast<unsigned long>(uniform(rng, 1, 20));
    w.image_height = w.image_width = static_cast<unsigned long>(uniform(rng, 16, 256));
    w.trainable_params = static_cast<unsigned long>(uniform(rng, 10'000, 30'000'000));
    return w;
}

inline deployopt::InfraDescriptor infra(Rng& rng) {
    deployopt::InfraDescriptor i;
    i.name = "node" + std::to_string(uniform(rng, 0, 9));
    i.peak_gflops = real(rng, 100.0, 15000.0);
    i.mem_bandwidth_gbs = real(rng, 20.0, 900.0);
    return i;
}

/// Records over `tags`, each tag seen at several epoch counts and workloads,
/// with runtimes drawn from a random positive linear model plus optional
/// noise. The design is full rank for λ = 0.
inline std::vector<deployopt::BenchmarkRecord> records(Rng& rng, const std::vector<std::string>& tags,
                                                       double noise = 0.0) {
    std::vector<deployopt::BenchmarkRecord> out;
    const double g_batch = real(rng, 0.0, 0.05), g_params = real(rng, 0.0, 1.0);
    const double g_peak = real(rng, 0.0, 500.0), g_bw = real(rng, 0.0, 200.0);
    for (const auto& t : tags) {
        const double startup = real(rng, 1.0, 30.0), per_epoch = real(rng, 1.0, 60.0);
        // 2 tag features + 4 shared features: 4..6 reps per tag, and at least
        // 10 for a lone tag, keep records >= features.
        const int reps = tags.size() == 1 ? uniform(rng, 10, 12) : uniform(rng, 4, 6);
        for (int k = 0; k < reps; ++k) {
            deployopt::BenchmarkRecord r{t, workload(rng), infra(rng), 0.0};
            // Two distinct epoch counts per tag separate startup from per-epoch cost.
            if (k == 1 && r.workload.epochs == out.back().workload.epochs) r.workload.epochs = r.workload.epochs % 20 + 1;
            r.wallclock_s = startup + per_epoch * static_cast<double>(r.workload.epochs) +
                            g_batch * static_cast<double>(r.workload.batch_size) +
                            g_params * static_cast<double>(r.workload.trainable_params) / 1e6 +
                            g_peak / r.infra.peak_gflops + g_bw / r.infra.mem_bandwidth_gbs;
            r.wallclock_s *= 1.0 + noise * real(rng, -1.0, 1.0);
            out.push_back(std::move(r));
        }
    }
    return out;
}

}  // namespace gen
