#pragma once

// Inputs of the golden definition files and job scripts, shared by the unit
// tests and the acceptance run.

#include <string>
#include <utility>
#include <vector>

#include "deployopt/container.hpp"
#include "deployopt/jobs.hpp"
#include "deployopt/registry.hpp"

namespace golden_cases {

inline const deployopt::Catalog& catalog() {
    static const deployopt::Catalog c = deployopt::load_catalog(deployopt::default_catalog_path());
    return c;
}

inline deployopt::OptimisationRequest request_for(const deployopt::ImageSpec& image,
                                                  deployopt::CompilerSet compilers = {}) {
    using namespace deployopt;
    OptimisationRequest r;
    r.enable_opt_build = true;
    r.opt_build = OptBuildTarget{CpuType::x86, image.target == Target::gpu ? AccType::nvidia : AccType::none};
    r.ai_training = FrameworkOptions{image.framework, image.version, std::move(compilers)};
    return r;
}

inline deployopt::ResolvedImage resolved(const std::string& tag, deployopt::CompilerSet compilers = {}) {
    deployopt::ResolvedImage out;
    out.image = *catalog().find(tag);
    out.enabled_compilers = std::move(compilers);
    return out;
}

inline deployopt::BuildRecipe recipe_for(const std::string& tag, deployopt::CompilerSet compilers = {}) {
    const auto r = resolved(tag, compilers);
    return deployopt::make_recipe(r, request_for(r.image, compilers));
}

/// cpu pip, cpu source (Bazel --copt), gpu pip, gpu source.
inline std::vector<std::pair<std::string, deployopt::BuildRecipe>> definitions() {
    using deployopt::Compiler;
    return {
        {"cpu_pip.def", recipe_for("tensorflow-1.14-pip-cpu-ngraph", {Compiler::ngraph})},
        {"cpu_tf_src.def", recipe_for("tensorflow-2.1-src-cpu")},
        {"gpu_pip.def", recipe_for("pytorch-1.4-pip-gpu")},
        {"gpu_tf_src.def", recipe_for("tensorflow-2.1-src-gpu-xla", {Compiler::xla})},
    };
}

inline deployopt::JobSpec job(deployopt::Scheduler s, bool gpu) {
    deployopt::JobSpec j;
    j.scheduler = s;
    j.job_name = gpu ? "resnet50-train" : "mnist-train";
    j.image_uri = gpu ? "tensorflow-2.1-src-gpu-xla.sif" : "tensorflow-2.1-src-cpu.sif";
    j.workload_command = "python3 train.py";
    j.gpu = gpu;
    j.walltime = *deployopt::Walltime::parse("02:30:00");
    return j;
}

inline std::vector<std::pair<std::string, deployopt::JobSpec>> scripts() {
    using deployopt::Scheduler;
    return {
        {"torque_gpu.sh", job(Scheduler::torque, true)},
        {"torque_cpu.sh", job(Scheduler::torque, false)},
        {"slurm_gpu.sh", job(Scheduler::slurm, true)},
        {"slurm_cpu.sh", job(Scheduler::slurm, false)},
    };
}

}  // namespace golden_cases
