#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "deployopt/error.hpp"
#include "deployopt/pipeline.hpp"

namespace deployopt::cli {

namespace {

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

std::string read_entry_argument(const std::string& arg) {
    if (!arg.starts_with("@")) return arg;
    std::ifstream in(arg.substr(1), std::ios::binary);
    if (!in) throw IoError("ENTRY_IO", "cannot read '" + arg.substr(1) + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Static deployment optimiser for containerised AI training jobs", "deployopt"};
    app.require_subcommand(1);

    // optimise
    OptimiseOptions opt;
    std::string catalog = default_catalog_path().string();
    std::string scheduler = "torque";
    std::string walltime = opt.walltime.str();
    std::string model, workload, infra;
    bool lenient = false;
    bool no_fakeroot = false;
    std::vector<std::string> cpu_flags;
    auto* optimise_cmd = app.add_subcommand("optimise", "Resolve an image and render deployment artifacts");
    optimise_cmd->add_option("--dsl", opt.dsl_path, "Optimisation DSL document")->required();
    optimise_cmd->add_option("--catalog", catalog, "Image catalog (JSON)")->envname("DEPLOY_OPT_CATALOG");
    optimise_cmd->add_option("--model", model, "Fitted performance model (JSON)");
    optimise_cmd->add_option("--workload", workload, "Workload descriptor (JSON)");
    optimise_cmd->add_option("--infra", infra, "Infrastructure descriptor (JSON)");
    optimise_cmd->add_option("--out", opt.out_dir, "Output directory")->required();
    optimise_cmd->add_option("--scheduler", scheduler, "torque or slurm")->capture_default_str();
    auto* strict_flag = optimise_cmd->add_flag("--strict", "Reject unknown DSL keys (default)");
    optimise_cmd->add_flag("--lenient", lenient, "Ignore unknown DSL keys with a warning")->excludes(strict_flag);
    optimise_cmd->add_option("--command", opt.workload_command, "Command run inside the container")
        ->capture_default_str();
    optimise_cmd->add_option("--walltime", walltime, "Job walltime hh:mm:ss")->capture_default_str();
    optimise_cmd->add_option("--ppn", opt.cores_per_node, "Processors per node for Torque")->capture_default_str();
    optimise_cmd->add_flag("--no-fakeroot", no_fakeroot, "Omit --fakeroot from the build command");
    optimise_cmd->add_option("--cpu-flag", cpu_flags, "Compiler flag for source builds (repeatable)");
    optimise_cmd->add_option("--cpu-base", opt.builder.cpu_base_ref, "Base image for CPU builds")
        ->capture_default_str();
    optimise_cmd->add_option("--gpu-base", opt.builder.gpu_base_ref, "Base image for GPU builds")
        ->capture_default_str();

    // fit
    std::string records, model_out;
    double lambda = 1e-8;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a performance model from benchmark records");
    fit_cmd->add_option("--records", records, "Benchmark record CSV")->required();
    fit_cmd->add_option("--lambda", lambda, "Ridge regularisation")->capture_default_str()->check(
        CLI::NonNegativeNumber);
    fit_cmd->add_option("--out", model_out, "Model output path (JSON)")->required();

    // predict
    std::vector<std::string> tags;
    std::string p_model, p_workload, p_infra;
    auto* predict_cmd = app.add_subcommand("predict", "Rank configuration tags under a fitted model");
    predict_cmd->add_option("--model", p_model, "Fitted model (JSON)")->required();
    predict_cmd->add_option("--workload", p_workload, "Workload descriptor (JSON)")->required();
    predict_cmd->add_option("--infra", p_infra, "Infrastructure descriptor (JSON)")->required();
    predict_cmd->add_option("--tag", tags, "Configuration tag (repeatable)")->required();

    // registry
    std::string r_catalog = default_catalog_path().string();
    std::string entry;
    auto* registry_cmd = app.add_subcommand("registry", "Inspect or edit an image catalog");
    registry_cmd->require_subcommand(1);
    registry_cmd->add_option("--catalog", r_catalog, "Image catalog (JSON)")->envname("DEPLOY_OPT_CATALOG");
    auto* list_cmd = registry_cmd->add_subcommand("list", "Print image tags");
    auto* add_cmd = registry_cmd->add_subcommand("add", "Append an entry and rewrite canonically");
    add_cmd->add_option("--entry", entry, "Entry JSON, or @file")->required();
    auto* validate_cmd = registry_cmd->add_subcommand("validate", "Report catalog problems");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: USAGE: " << one_line(e.what()) << "\n";
        return 2;
    }

    try {
        if (*optimise_cmd) {
            opt.catalog_path = catalog;
            opt.scheduler = parse_scheduler(scheduler);
            opt.mode = lenient ? ParseMode::lenient : ParseMode::strict;
            const auto wt = Walltime::parse(walltime);
            if (!wt || wt->duration().count() <= 0) throw Error("USAGE", "invalid walltime '" + walltime + "'");
            opt.walltime = *wt;
            opt.fakeroot = !no_fakeroot;
            if (!cpu_flags.empty()) opt.builder.cpu_flags = cpu_flags;
            if (!model.empty()) opt.model_path = model;
            if (!workload.empty()) opt.workload_path = workload;
            if (!infra.empty()) opt.infra_path = infra;
            const auto manifest = optimise(opt);
            out << "selected " << manifest.resolved.config_tag() << " ("
                << to_string(manifest.resolved.rationale) << ")\n";
            for (const auto& w : manifest.warnings) out << "warning: " << w << "\n";
            out << "wrote " << (opt.out_dir / kManifestFile).string() << "\n";
            return 0;
        }
        if (*fit_cmd) return fit_command(records, lambda, model_out, out);
        if (*predict_cmd) return predict_command(p_model, tags, p_workload, p_infra, out);
        if (*registry_cmd) {
            if (*list_cmd) return registry_command(RegistryAction::list, r_catalog, std::nullopt, out);
            if (*add_cmd) return registry_command(RegistryAction::add, r_catalog, read_entry_argument(entry), out);
            if (*validate_cmd) return registry_command(RegistryAction::validate, r_catalog, std::nullopt, out);
        }
    } catch (const Error& e) {
        err << "error: " << e.code() << ": " << one_line(e.what()) << "\n";
        return e.code() == "USAGE" ? 2 : 1;
    } catch (const std::exception& e) {
        err << "error: INTERNAL: " << one_line(e.what()) << "\n";
        return 1;
    }
    return 0;
}

}  // namespace deployopt::cli
