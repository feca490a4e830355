#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "deployopt/dsl.hpp"
#include "deployopt/registry.hpp"

namespace deployopt {

enum class BaseKind { cpu_base, gpu_base };
enum class InstallMethod { pip, source };

std::string_view to_string(BaseKind b);
std::string_view to_string(InstallMethod m);

/// Where base images come from and which knobs source builds get. Base
/// references are plain configuration so that CUDA versions can move without
/// code changes.
struct BuilderConfig {
    std::string bootstrap = "docker";
    std::string cpu_base_ref = "ubuntu:18.04";
    std::string gpu_base_ref = "nvidia/cuda:10.1-cudnn7-devel-ubuntu18.04";
    /// Optimisation flags for CPU-side code of source builds.
    std::vector<std::string> cpu_flags = {"-march=native", "-O3"};
    /// Extra %post commands for GPU TensorFlow source builds, run before
    /// `./configure`.
    std::vector<std::string> tensorflow_gpu_commands = {
        "export TF_NEED_CUDA=1",
        "export TF_CUDA_VERSION=10.1",
        "export TF_CUDNN_VERSION=7",
        "export TF_CUDA_COMPUTE_CAPABILITIES=6.1",
    };
    std::string install_prefix = "/opt";
};

/// Names of the environment variables a GPU base image always sets.
const std::vector<std::string>& gpu_environment_names();

using EnvVar = std::pair<std::string, std::string>;

struct BuildRecipe {
    BaseKind base = BaseKind::cpu_base;
    std::string bootstrap;
    std::string base_ref;
    Framework framework = Framework::tensorflow;
    Version version;
    InstallMethod install_method = InstallMethod::pip;
    std::vector<EnvVar> environment;
    std::vector<std::string> post_commands;
    /// Flags as handed to the framework's build tool (`--copt=...` for Bazel).
    std::vector<std::string> build_flags;

    friend bool operator==(const BuildRecipe&, const BuildRecipe&) = default;
};

/// Problems with a recipe's invariants; empty iff valid.
std::vector<std::string> validate_recipe(const BuildRecipe& recipe);

/// Build plan for a pip or src image. Throws InconsistentResolutionError for
/// hub images (they are pulled, not built) or when `resolved` does not
/// answer `request`.
BuildRecipe make_recipe(const ResolvedImage& resolved, const OptimisationRequest& request,
                        const BuilderConfig& config = {});

struct DefinitionSection {
    std::string name;  // "header", "environment", "post"
    std::vector<std::string> lines;

    friend bool operator==(const DefinitionSection&, const DefinitionSection&) = default;
};

struct DefinitionFile {
    std::string text;
    std::vector<DefinitionSection> sections;
};

/// Singularity definition text: Bootstrap/From header, %environment, %post.
/// Byte-for-byte deterministic.
DefinitionFile render_definition(const BuildRecipe& recipe);

/// Splits definition text back into its sections; environment lines are the
/// `NAME=value` pairs, post lines are the commands, both unindented.
/// Throws FormatError (code DEFINITION_FORMAT) on unexpected structure.
std::vector<DefinitionSection> scan_definition(std::string_view text);

/// Recovers environment pairs from a scanned %environment section.
std::vector<EnvVar> scan_environment(const DefinitionSection& section);

/// `singularity build [--fakeroot] <image> <definition>`. Never executed
/// here. Throws PreconditionError for empty paths.
std::string build_command(std::string_view definition_path, std::string_view image_output_path, bool fakeroot);

}  // namespace deployopt
