#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "deployopt/container.hpp"
#include "deployopt/dsl.hpp"
#include "deployopt/jobs.hpp"
#include "deployopt/registry.hpp"

namespace deployopt {

/// Summary of one optimise run. Paths are relative to the output directory
/// so that identical inputs give identical manifests.
struct DeploymentManifest {
    OptimisationRequest request;
    ResolvedImage resolved;
    std::optional<std::filesystem::path> definition_path;
    std::optional<std::string> build_command;
    std::filesystem::path job_script_path;
    std::string job_image;
    Scheduler scheduler = Scheduler::torque;
    bool model_used = false;
    std::vector<std::string> warnings;
};

std::string manifest_to_json(const DeploymentManifest& manifest);

struct OptimiseOptions {
    std::filesystem::path dsl_path;
    std::filesystem::path catalog_path;
    std::optional<std::filesystem::path> model_path;
    std::optional<std::filesystem::path> workload_path;
    std::optional<std::filesystem::path> infra_path;
    std::filesystem::path out_dir;
    Scheduler scheduler = Scheduler::torque;
    ParseMode mode = ParseMode::strict;
    std::string workload_command = "python3 train.py";
    Walltime walltime;
    unsigned cores_per_node = 20;
    bool fakeroot = true;
    BuilderConfig builder;
};

inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kJobScriptFile = "job.sh";

/// parse -> resolve -> (recipe + definition when the image must be built)
/// -> job script. Writes the definition, job.sh and manifest.json under
/// `out_dir` and returns the manifest. A model requires workload and infra
/// descriptors.
DeploymentManifest optimise(const OptimiseOptions& options);

/// Fits a model from a record CSV, writes it as JSON, and prints one
/// residual line per record plus a summary to `out`. Returns 0.
int fit_command(const std::filesystem::path& records_csv, double ridge_lambda,
                const std::filesystem::path& model_out, std::ostream& out);

/// Prints the ranking of `config_tags` under a stored model.
int predict_command(const std::filesystem::path& model_path, const std::vector<std::string>& config_tags,
                    const std::filesystem::path& workload_path, const std::filesystem::path& infra_path,
                    std::ostream& out);

enum class RegistryAction { list, add, validate };

/// list: sorted tags. add: append `entry_json` and rewrite the catalog
/// canonically. validate: print every finding; throws Error with code
/// CATALOG_INVALID when there are any.
int registry_command(RegistryAction action, const std::filesystem::path& catalog_path,
                     const std::optional<std::string>& entry_json, std::ostream& out);

}  // namespace deployopt
