#include "deployopt/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "deployopt/error.hpp"
#include "deployopt/perf_model.hpp"
#include "json_util.hpp"

namespace deployopt {

using detail::json;

namespace {

json image_json(const ImageSpec& s) { return json::parse(image_to_json(s)); }

json compilers_json(const CompilerSet& set) {
    json out = json::array();
    for (Compiler c : set) out.push_back(std::string(to_string(c)));
    return out;
}

}  // namespace

std::string manifest_to_json(const DeploymentManifest& m) {
    const ResolvedImage& r = m.resolved;
    json resolved = {
        {"tag", r.tag()},
        {"config_tag", r.config_tag()},
        {"image", image_json(r.image)},
        {"enabled_compilers", compilers_json(r.enabled_compilers)},
        {"rationale", std::string(to_string(r.rationale))},
        {"predicted_runtime_s", r.predicted_runtime_s ? json(*r.predicted_runtime_s) : json(nullptr)},
    };
    json doc = {
        {"request", json::parse(serialize_request(m.request)).at("optimisation")},
        {"resolved", resolved},
        {"definition_path", m.definition_path ? json(m.definition_path->generic_string()) : json(nullptr)},
        {"build_command", m.build_command ? json(*m.build_command) : json(nullptr)},
        {"job_script_path", m.job_script_path.generic_string()},
        {"job_image", m.job_image},
        {"scheduler", std::string(to_string(m.scheduler))},
        {"model_used", m.model_used},
        {"warnings", m.warnings},
    };
    return detail::canonical_dump(doc);
}

DeploymentManifest optimise(const OptimiseOptions& o) {
    auto parsed = parse_request(detail::read_text_file(o.dsl_path, "DSL"), o.mode);
    const Catalog catalog = load_catalog(o.catalog_path);

    std::optional<PerfModel> model;
    std::optional<WorkloadDescriptor> workload;
    std::optional<InfraDescriptor> infra;
    if (o.workload_path) workload = load_workload(*o.workload_path);
    if (o.infra_path) infra = load_infra(*o.infra_path);
    if (o.model_path) {
        if (!workload || !infra) throw Error("USAGE", "--model requires --workload and --infra");
        model = load_model(*o.model_path);
    }

    DeploymentManifest m;
    m.request = parsed.request;
    m.warnings = std::move(parsed.warnings);
    m.scheduler = o.scheduler;
    m.resolved = model ? resolve_image(m.request, catalog, ModelContext{*model, *workload, *infra})
                       : resolve_image(m.request, catalog);
    m.model_used = m.resolved.rationale == Rationale::model_ranked;
    m.warnings.insert(m.warnings.end(), m.resolved.warnings.begin(), m.resolved.warnings.end());

    std::error_code ec;
    std::filesystem::create_directories(o.out_dir, ec);
    if (ec) throw IoError("OUTPUT_IO", "cannot create '" + o.out_dir.string() + "': " + ec.message());

    const std::string tag = m.resolved.tag();
    m.job_image = m.resolved.image.uri;
    if (m.resolved.image.source != Source::hub) {
        const BuildRecipe recipe = make_recipe(m.resolved, m.request, o.builder);
        const std::string def_name = tag + ".def";
        const std::string sif_name = tag + ".sif";
        detail::write_text_file(o.out_dir / def_name, render_definition(recipe).text);
        m.definition_path = def_name;
        m.build_command = build_command(def_name, sif_name, o.fakeroot);
        m.job_image = sif_name;
    }

    JobSpec job;
    job.scheduler = o.scheduler;
    job.job_name = workload ? workload->name : tag;
    job.image_uri = m.job_image;
    job.workload_command = o.workload_command;
    job.gpu = m.resolved.image.target == Target::gpu;
    job.walltime = o.walltime;
    job.cores_per_node = o.cores_per_node;
    detail::write_text_file(o.out_dir / kJobScriptFile, render_script(job));
    m.job_script_path = kJobScriptFile;

    detail::write_text_file(o.out_dir / kManifestFile, manifest_to_json(m));
    return m;
}

int fit_command(const std::filesystem::path& records_csv, double ridge_lambda,
                const std::filesystem::path& model_out, std::ostream& out) {
    const auto records = load_records_csv(records_csv);
    const PerfModel model = fit(records, ridge_lambda);
    save_model(model, model_out);

    double worst = 0.0;
    const auto flags = out.flags();
    out << std::setprecision(10);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        const double predicted = predict(model, r.config_tag, r.workload, r.infra);
        const double rel = (predicted - r.wallclock_s) / r.wallclock_s;
        worst = std::max(worst, std::abs(rel));
        out << "record " << i + 1 << " " << r.config_tag << " observed=" << r.wallclock_s
            << " predicted=" << predicted << " rel_residual=" << rel << "\n";
    }
    out << "fitted " << records.size() << " records, " << model.feature_names.size() << " features, "
        << model.covered_tags.size() << " configurations, lambda=" << ridge_lambda
        << ", max |rel residual|=" << worst << "\n";
    out.flags(flags);
    return 0;
}

int predict_command(const std::filesystem::path& model_path, const std::vector<std::string>& config_tags,
                    const std::filesystem::path& workload_path, const std::filesystem::path& infra_path,
                    std::ostream& out) {
    if (config_tags.empty()) throw Error("USAGE", "at least one configuration tag is required");
    const PerfModel model = load_model(model_path);
    const auto workload = load_workload(workload_path);
    const auto infra = load_infra(infra_path);
    const auto ranking = rank_configurations(model, config_tags, workload, infra);
    const auto flags = out.flags();
    out << std::setprecision(10);
    for (const auto& r : ranking) {
        out << r.config_tag << " ";
        switch (r.status) {
            case RankedConfiguration::Status::ranked: out << *r.seconds; break;
            case RankedConfiguration::Status::uncovered: out << "uncovered"; break;
            case RankedConfiguration::Status::degenerate: out << "degenerate"; break;
        }
        out << "\n";
    }
    out.flags(flags);
    return 0;
}

int registry_command(RegistryAction action, const std::filesystem::path& catalog_path,
                     const std::optional<std::string>& entry_json, std::ostream& out) {
    switch (action) {
        case RegistryAction::list:
            for (const auto& tag : load_catalog(catalog_path).tags()) out << tag << "\n";
            return 0;
        case RegistryAction::add: {
            if (!entry_json) throw Error("USAGE", "registry add requires an entry");
            const ImageSpec spec = parse_image_entry(*entry_json);
            const Catalog updated = load_catalog(catalog_path).with(spec);
            detail::write_text_file(catalog_path, catalog_to_json(updated), "CATALOG_IO");
            out << "added " << tag_of(spec) << "\n";
            return 0;
        }
        case RegistryAction::validate: {
            const std::string text = detail::read_text_file(catalog_path, "CATALOG");
            const auto findings = validate_catalog_text(text);
            for (const auto& f : findings) out << f << "\n";
            if (!findings.empty()) {
                throw Error("CATALOG_INVALID", std::to_string(findings.size()) + " finding(s) in '" +
                                                   catalog_path.string() + "'");
            }
            out << "ok\n";
            return 0;
        }
    }
    return 0;
}

}  // namespace deployopt
