#include "deployopt/registry.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "deployopt/error.hpp"
#include "json_util.hpp"

#ifndef DEPLOYOPT_DEFAULT_CATALOG
#define DEPLOYOPT_DEFAULT_CATALOG "default_catalog.json"
#endif

namespace deployopt {

using detail::json;

std::string_view to_string(ConstraintOp op) {
    switch (op) {
        case ConstraintOp::lt: return "<";
        case ConstraintOp::le: return "<=";
        case ConstraintOp::eq: return "=";
        case ConstraintOp::ge: return ">=";
        case ConstraintOp::gt: return ">";
    }
    return "?";
}

std::optional<ConstraintOp> parse_constraint_op(std::string_view text) {
    if (text == "<") return ConstraintOp::lt;
    if (text == "<=") return ConstraintOp::le;
    if (text == "=") return ConstraintOp::eq;
    if (text == ">=") return ConstraintOp::ge;
    if (text == ">") return ConstraintOp::gt;
    return std::nullopt;
}

std::string_view to_string(Rationale r) {
    return r == Rationale::model_ranked ? "model_ranked" : "priority_rule";
}

namespace {

enum class FieldKind { version, compiler_version, cpu_type, acc_type, unknown };

FieldKind classify(std::string_view field, std::optional<Compiler>* compiler = nullptr) {
    if (field == "version") return FieldKind::version;
    if (field == "cpu_type") return FieldKind::cpu_type;
    if (field == "acc_type") return FieldKind::acc_type;
    constexpr std::string_view suffix = ".version";
    if (field.size() > suffix.size() && field.ends_with(suffix)) {
        const auto c = parse_compiler(field.substr(0, field.size() - suffix.size()));
        if (c && ascii_lower(field) == field) {
            if (compiler) *compiler = c;
            return FieldKind::compiler_version;
        }
    }
    return FieldKind::unknown;
}

bool compare(std::strong_ordering cmp, ConstraintOp op) {
    switch (op) {
        case ConstraintOp::lt: return cmp < 0;
        case ConstraintOp::le: return cmp <= 0;
        case ConstraintOp::eq: return cmp == 0;
        case ConstraintOp::ge: return cmp >= 0;
        case ConstraintOp::gt: return cmp > 0;
    }
    return false;
}

std::string constraint_problem(const Constraint& c) {
    switch (classify(c.field)) {
        case FieldKind::version:
        case FieldKind::compiler_version:
            if (!Version::parse(c.value)) return "constraint value '" + c.value + "' is not a version";
            return {};
        case FieldKind::cpu_type:
            if (c.op != ConstraintOp::eq) return "cpu_type constraints only support '='";
            if (!parse_cpu_type(c.value)) return "unknown cpu_type '" + c.value + "'";
            return {};
        case FieldKind::acc_type:
            if (c.op != ConstraintOp::eq) return "acc_type constraints only support '='";
            if (!parse_acc_type(c.value)) return "unknown acc_type '" + c.value + "'";
            return {};
        case FieldKind::unknown:
            break;
    }
    return "unknown constraint field '" + c.field + "'";
}

}  // namespace

bool Constraint::satisfied_by(const OptimisationRequest& request) const {
    std::optional<Compiler> compiler;
    const FieldKind kind = classify(field, &compiler);
    switch (kind) {
        case FieldKind::compiler_version:
            if (!request.ai_training || !request.ai_training->compilers.contains(*compiler)) return true;
            [[fallthrough]];
        case FieldKind::version: {
            const auto bound = Version::parse(value);
            if (!bound || !request.ai_training) return false;
            return compare(request.ai_training->version <=> *bound, op);
        }
        case FieldKind::cpu_type: {
            const CpuType have = request.opt_build ? request.opt_build->cpu_type : CpuType::x86;
            return parse_cpu_type(value) == have;
        }
        case FieldKind::acc_type: {
            const AccType have = request.opt_build ? request.opt_build->acc_type : AccType::none;
            return parse_acc_type(value) == have;
        }
        case FieldKind::unknown:
            break;
    }
    return false;
}

std::string Constraint::describe() const { return field + " " + std::string(to_string(op)) + " " + value; }

std::string tag_of(const ImageSpec& s) {
    std::string tag = std::string(to_string(s.framework)) + "-" + s.version.str() + "-" +
                      std::string(to_string(s.source)) + "-" + std::string(to_string(s.target));
    for (Compiler c : s.capabilities) tag += "-" + std::string(to_string(c));
    return tag;
}

std::string config_tag_of(const ImageSpec& s, const CompilerSet& enabled) {
    std::string tag = tag_of(s);
    for (Compiler c : enabled) tag += "+" + std::string(to_string(c));
    return tag;
}

std::vector<std::string> validate_image(const ImageSpec& s) {
    std::vector<std::string> out;
    if (s.version.segments().empty()) out.push_back("version must be a dotted decimal version");
    for (Compiler c : s.capabilities) {
        if (compiler_host(c) != s.framework) {
            out.push_back("capability " + std::string(to_string(c)) + " requires " +
                          std::string(to_string(compiler_host(c))));
        }
    }
    for (const auto& c : s.constraints) {
        if (auto problem = constraint_problem(c); !problem.empty()) out.push_back(std::move(problem));
    }
    if (s.uri.empty()) out.push_back("uri must be non-empty");
    return out;
}

// --- Catalog ---------------------------------------------------------------

Catalog::Catalog(std::vector<ImageSpec> entries, CatalogProvenance provenance)
    : entries_(std::move(entries)), provenance_(std::move(provenance)) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto problems = validate_image(entries_[i]);
        const std::string tag = tag_of(entries_[i]);
        if (!problems.empty()) {
            throw ValidationError("entries[" + std::to_string(i) + "]",
                                  "catalog entry " + std::to_string(i) + " (" + tag + "): " + problems.front(),
                                  "CATALOG_FORMAT");
        }
        if (!seen.insert(tag).second) throw DuplicateTagError(tag);
    }
}

std::optional<ImageSpec> Catalog::find(std::string_view tag) const {
    for (const auto& e : entries_) {
        if (tag_of(e) == tag) return e;
    }
    return std::nullopt;
}

std::vector<std::string> Catalog::tags() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(tag_of(e));
    std::sort(out.begin(), out.end());
    return out;
}

Catalog Catalog::with(ImageSpec spec) const {
    auto entries = entries_;
    entries.push_back(std::move(spec));
    return Catalog(std::move(entries), provenance_);
}

// --- catalog file format ---------------------------------------------------

namespace {

[[noreturn]] void entry_fail(std::size_t index, const std::string& what) {
    throw FormatError("CATALOG_FORMAT", "entry " + std::to_string(index) + ": " + what);
}

template <typename E>
E entry_enum(const json& obj, const char* key, std::optional<E> (*parse)(std::string_view), std::size_t index) {
    if (!obj.contains(key)) entry_fail(index, std::string("missing key '") + key + "'");
    const json& v = obj.at(key);
    if (!v.is_string()) entry_fail(index, std::string(key) + " must be a string");
    const auto parsed = parse(v.get<std::string>());
    if (!parsed) entry_fail(index, "unknown " + std::string(key) + " '" + v.get<std::string>() + "'");
    return *parsed;
}

ImageSpec entry_from_json(const json& obj, std::size_t index) {
    if (!obj.is_object()) entry_fail(index, "expected an object");
    if (const auto k = detail::first_unknown_key(
            obj, {"framework", "version", "source", "target", "capabilities", "constraints", "uri"});
        !k.empty()) {
        entry_fail(index, "unknown key '" + k + "'");
    }
    ImageSpec s;
    s.framework = entry_enum<Framework>(obj, "framework", parse_framework, index);
    s.source = entry_enum<Source>(obj, "source", parse_source, index);
    s.target = entry_enum<Target>(obj, "target", parse_target, index);
    if (!obj.contains("version") || !obj.at("version").is_string()) entry_fail(index, "version must be a string");
    const auto version = Version::parse(obj.at("version").get<std::string>());
    if (!version) entry_fail(index, "'" + obj.at("version").get<std::string>() + "' is not a dotted decimal version");
    s.version = *version;
    if (obj.contains("capabilities")) {
        const json& caps = obj.at("capabilities");
        if (!caps.is_array()) entry_fail(index, "capabilities must be an array");
        for (const auto& c : caps) {
            const auto parsed = c.is_string() ? parse_compiler(c.get<std::string>()) : std::nullopt;
            if (!parsed) entry_fail(index, "unknown capability " + c.dump());
            s.capabilities.insert(*parsed);
        }
    }
    if (obj.contains("constraints")) {
        const json& cons = obj.at("constraints");
        if (!cons.is_array()) entry_fail(index, "constraints must be an array");
        for (const auto& c : cons) {
            if (!c.is_object()) entry_fail(index, "constraint must be an object");
            if (const auto k = detail::first_unknown_key(c, {"requires", "op", "value"}); !k.empty()) {
                entry_fail(index, "unknown constraint key '" + k + "'");
            }
            for (const char* key : {"requires", "op", "value"}) {
                if (!c.contains(key) || !c.at(key).is_string()) {
                    entry_fail(index, std::string("constraint ") + key + " must be a string");
                }
            }
            const auto op = parse_constraint_op(c.at("op").get<std::string>());
            if (!op) entry_fail(index, "unknown constraint op '" + c.at("op").get<std::string>() + "'");
            s.constraints.push_back({c.at("requires").get<std::string>(), *op, c.at("value").get<std::string>()});
        }
    }
    if (!obj.contains("uri") || !obj.at("uri").is_string()) entry_fail(index, "uri must be a string");
    s.uri = obj.at("uri").get<std::string>();
    if (const auto problems = validate_image(s); !problems.empty()) entry_fail(index, problems.front());
    return s;
}

json entry_to_json(const ImageSpec& s) {
    json caps = json::array();
    for (Compiler c : s.capabilities) caps.push_back(std::string(to_string(c)));
    json cons = json::array();
    for (const auto& c : s.constraints) {
        cons.push_back({{"requires", c.field}, {"op", std::string(to_string(c.op))}, {"value", c.value}});
    }
    return {
        {"framework", std::string(to_string(s.framework))},
        {"version", s.version.str()},
        {"source", std::string(to_string(s.source))},
        {"target", std::string(to_string(s.target))},
        {"capabilities", caps},
        {"constraints", cons},
        {"uri", s.uri},
    };
}

}  // namespace

Catalog parse_catalog(std::string_view text, const std::filesystem::path& origin) {
    const json doc = detail::parse_json(text, "CATALOG", origin.empty() ? "catalog" : origin.string());
    if (!doc.is_array()) throw FormatError("CATALOG_FORMAT", "catalog must be a JSON array of entries");
    std::vector<ImageSpec> entries;
    entries.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) entries.push_back(entry_from_json(doc[i], i));
    return Catalog(std::move(entries), CatalogProvenance{origin, std::chrono::system_clock::now()});
}

Catalog load_catalog(const std::filesystem::path& path) {
    return parse_catalog(detail::read_text_file(path, "CATALOG"), path);
}

ImageSpec parse_image_entry(std::string_view text) {
    return entry_from_json(detail::parse_json(text, "CATALOG", "entry"), 0);
}

std::string image_to_json(const ImageSpec& spec) { return detail::canonical_dump(entry_to_json(spec)); }

std::string catalog_to_json(const Catalog& catalog) {
    auto entries = catalog.entries();
    std::sort(entries.begin(), entries.end(),
              [](const ImageSpec& a, const ImageSpec& b) { return tag_of(a) < tag_of(b); });
    json doc = json::array();
    for (const auto& e : entries) doc.push_back(entry_to_json(e));
    return detail::canonical_dump(doc);
}

std::vector<std::string> validate_catalog_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        return {std::string("catalog: ") + e.what()};
    }
    if (!doc.is_array()) return {"catalog must be a JSON array of entries"};
    std::vector<std::string> findings;
    std::map<std::string, std::size_t> first_seen;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        try {
            const std::string tag = tag_of(entry_from_json(doc[i], i));
            const auto [it, inserted] = first_seen.emplace(tag, i);
            if (!inserted) {
                findings.push_back("entry " + std::to_string(i) + ": duplicate tag '" + tag + "' (first at entry " +
                                   std::to_string(it->second) + ")");
            }
        } catch (const FormatError& e) {
            findings.emplace_back(e.what());
        }
    }
    return findings;
}

std::filesystem::path default_catalog_path() { return DEPLOYOPT_DEFAULT_CATALOG; }

// --- resolution ------------------------------------------------------------

namespace {

int priority(Source s, bool opt_build) {
    switch (s) {
        case Source::src: return 0;
        case Source::pip: return 1;
        case Source::hub: return opt_build ? 2 : 0;
    }
    return 3;
}

}  // namespace

ResolvedImage resolve_image(const OptimisationRequest& request, const Catalog& catalog,
                            const std::optional<ModelContext>& model) {
    if (const auto v = validate_request(request); !v.empty()) {
        throw ValidationError(v.front().field, v.front().field + ": " + v.front().rule);
    }
    if (!request.ai_training) throw UnsupportedError("only ai_training requests can be resolved");
    const FrameworkOptions& fo = *request.ai_training;
    const Target target = request.target();
    const std::string what = std::string(to_string(fo.framework)) + " " + fo.version.str();

    std::vector<const ImageSpec*> pool;
    for (const auto& e : catalog.entries()) pool.push_back(&e);
    std::sort(pool.begin(), pool.end(), [](const ImageSpec* a, const ImageSpec* b) { return tag_of(*a) < tag_of(*b); });

    const auto narrow = [&pool](auto keep) {
        std::vector<const ImageSpec*> next;
        std::copy_if(pool.begin(), pool.end(), std::back_inserter(next), keep);
        const bool empty = next.empty();
        if (!empty) pool = std::move(next);
        return !empty;
    };

    if (!narrow([&](const ImageSpec* e) { return e->framework == fo.framework && e->version == fo.version; })) {
        throw NoMatchError("no image for " + what);
    }
    if (!narrow([&](const ImageSpec* e) { return e->target == target; })) {
        throw NoMatchError("no " + std::string(to_string(target)) + " image for " + what);
    }
    for (Compiler c : fo.compilers) {
        if (!narrow([&](const ImageSpec* e) { return e->capabilities.contains(c); })) {
            throw NoMatchError(std::string(to_string(c)) + " unavailable for " + what);
        }
    }
    const std::vector<const ImageSpec*> before_constraints = pool;
    if (!narrow([&](const ImageSpec* e) {
            return std::all_of(e->constraints.begin(), e->constraints.end(),
                               [&](const Constraint& c) { return c.satisfied_by(request); });
        })) {
        for (const auto& c : before_constraints.front()->constraints) {
            if (!c.satisfied_by(request)) {
                throw NoMatchError("constraint " + c.describe() + " not satisfied for " + what);
            }
        }
    }
    if (!request.enable_opt_build &&
        !narrow([](const ImageSpec* e) { return e->source != Source::src; })) {
        throw NoMatchError("only opt-build images exist for " + what + " " + std::string(to_string(target)) +
                           " and enable_opt_build is false");
    }

    ResolvedImage out;
    out.enabled_compilers = fo.compilers;

    if (model) {
        std::map<std::string, const ImageSpec*> by_config;
        std::vector<std::string> config_tags;
        for (const ImageSpec* e : pool) {
            auto tag = config_tag_of(*e, fo.compilers);
            by_config.emplace(tag, e);
            config_tags.push_back(std::move(tag));
        }
        const auto ranking = rank_configurations(model->model, config_tags, model->workload, model->infra);
        if (ranking.front().status == RankedConfiguration::Status::ranked) {
            out.image = *by_config.at(ranking.front().config_tag);
            out.rationale = Rationale::model_ranked;
            out.predicted_runtime_s = ranking.front().seconds;
            return out;
        }
        out.warnings.push_back("performance model ranks none of the " + std::to_string(pool.size()) +
                               " candidate image(s); falling back to the priority rule");
    }

    const auto best = std::min_element(pool.begin(), pool.end(), [&](const ImageSpec* a, const ImageSpec* b) {
        const int pa = priority(a->source, request.enable_opt_build);
        const int pb = priority(b->source, request.enable_opt_build);
        if (pa != pb) return pa < pb;
        return tag_of(*a) < tag_of(*b);
    });
    out.image = **best;
    out.rationale = Rationale::priority_rule;
    return out;
}

}  // namespace deployopt
