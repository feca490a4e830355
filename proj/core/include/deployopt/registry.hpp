#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deployopt/dsl.hpp"
#include "deployopt/perf_model.hpp"
#include "deployopt/types.hpp"

namespace deployopt {

enum class ConstraintOp { lt, le, eq, ge, gt };

std::string_view to_string(ConstraintOp op);
std::optional<ConstraintOp> parse_constraint_op(std::string_view text);

/// A condition on the request that an image imposes, e.g.
/// `{"requires": "ngraph.version", "op": "<", "value": "2.0"}`.
///
/// Recognised fields:
///   version            framework version of the request
///   <compiler>.version framework version, checked only when that compiler
///                      is requested
///   cpu_type, acc_type target of the request (op "=" only; an absent
///                      opt_build reads as x86 / none)
struct Constraint {
    std::string field;
    ConstraintOp op = ConstraintOp::eq;
    std::string value;

    bool satisfied_by(const OptimisationRequest& request) const;
    std::string describe() const;

    friend bool operator==(const Constraint&, const Constraint&) = default;
};

struct ImageSpec {
    Framework framework = Framework::tensorflow;
    Version version;
    Source source = Source::hub;
    Target target = Target::cpu;
    CompilerSet capabilities;
    std::vector<Constraint> constraints;
    std::string uri;

    friend bool operator==(const ImageSpec&, const ImageSpec&) = default;
};

/// `<framework>-<version>-<source>-<target>[-<capability>...]`, capabilities
/// in alphabetical order.
std::string tag_of(const ImageSpec& spec);

/// Model configuration tag: the image tag plus "+<compiler>" per enabled
/// graph compiler, alphabetically.
std::string config_tag_of(const ImageSpec& spec, const CompilerSet& enabled);

/// Violations of ImageSpec invariants (empty iff valid).
std::vector<std::string> validate_image(const ImageSpec& spec);

struct CatalogProvenance {
    std::filesystem::path path;
    std::chrono::system_clock::time_point loaded_at;
};

/// Immutable collection of images with unique tags.
class Catalog {
public:
    Catalog() = default;

    /// Throws DuplicateTagError or ValidationError (code CATALOG_FORMAT).
    explicit Catalog(std::vector<ImageSpec> entries, CatalogProvenance provenance = {});

    const std::vector<ImageSpec>& entries() const noexcept { return entries_; }
    const CatalogProvenance& provenance() const noexcept { return provenance_; }
    std::optional<ImageSpec> find(std::string_view tag) const;
    std::vector<std::string> tags() const;  // sorted

    /// New catalog with `spec` appended. Throws DuplicateTagError.
    Catalog with(ImageSpec spec) const;

private:
    std::vector<ImageSpec> entries_;
    CatalogProvenance provenance_;
};

/// Throws IoError (CATALOG_IO), FormatError (CATALOG_FORMAT, naming the entry
/// index), DuplicateTagError.
Catalog load_catalog(const std::filesystem::path& path);
Catalog parse_catalog(std::string_view text, const std::filesystem::path& origin = {});
ImageSpec parse_image_entry(std::string_view json_text);

/// Canonical document: entries sorted by tag, 4-space indent, sorted keys.
std::string catalog_to_json(const Catalog& catalog);
std::string image_to_json(const ImageSpec& spec);

/// Every problem in a catalog document, without stopping at the first.
std::vector<std::string> validate_catalog_text(std::string_view text);

/// Path of the catalog shipped with the library.
std::filesystem::path default_catalog_path();

enum class Rationale { model_ranked, priority_rule };
std::string_view to_string(Rationale r);

struct ResolvedImage {
    ImageSpec image;
    CompilerSet enabled_compilers;
    Rationale rationale = Rationale::priority_rule;
    std::optional<double> predicted_runtime_s;
    /// Set when a model was supplied but could not rank any candidate.
    std::vector<std::string> warnings;

    std::string tag() const { return tag_of(image); }
    std::string config_tag() const { return config_tag_of(image, enabled_compilers); }
};

/// Optional performance-model input to resolve_image.
struct ModelContext {
    const PerfModel& model;
    const WorkloadDescriptor& workload;
    const InfraDescriptor& infra;
};

/// Picks the image for `request`.
///
/// Candidates match the framework, the exact version, and the target, offer
/// every requested compiler, and satisfy all of their constraints; without
/// enable_opt_build only hub and pip images qualify. When a model ranks at
/// least one candidate the fastest wins; otherwise src > pip > hub (opt-build
/// enabled) or hub > pip, with ties going to the smallest tag.
///
/// Throws NoMatchError naming the first filter that left no candidate, or
/// ValidationError for an invalid request.
ResolvedImage resolve_image(const OptimisationRequest& request, const Catalog& catalog,
                            const std::optional<ModelContext>& model = std::nullopt);

}  // namespace deployopt
