#include "deployopt/dsl.hpp"

#include <algorithm>

#include "deployopt/error.hpp"
#include "json_util.hpp"

namespace deployopt {

using detail::json;

namespace {

constexpr std::string_view kRoot = "optimisation";

class RequestReader {
public:
    explicit RequestReader(ParseMode mode) : mode_(mode) {}

    ParsedRequest read(const json& doc) {
        if (!doc.is_object()) fail(std::string(kRoot), "document must be a JSON object");
        check_keys(doc, "", {kRoot});
        if (!doc.contains(kRoot)) fail(std::string(kRoot), "missing top-level key");
        const json& opt = doc.at(kRoot);
        const std::string base(kRoot);
        if (!opt.is_object()) fail(base, "must be an object");

        OptimisationRequest r;
        r.app_type = read_app_type(opt, base + ".app_type");
        check_keys(opt, base, {"enable_opt_build", "app_type", "opt_build", "ai_training"});

        if (!opt.contains("enable_opt_build")) fail(base + ".enable_opt_build", "required");
        r.enable_opt_build = read_bool(opt.at("enable_opt_build"), base + ".enable_opt_build");

        if (opt.contains("opt_build")) r.opt_build = read_opt_build(opt.at("opt_build"), base + ".opt_build");
        if (opt.contains("ai_training"))
            r.ai_training = read_ai_training(opt.at("ai_training"), base + ".ai_training");

        const auto violations = validate_request(r);
        if (!violations.empty()) {
            std::string message;
            for (const auto& v : violations) {
                if (!message.empty()) message += "; ";
                message += v.field + ": " + v.rule;
            }
            throw ValidationError(violations.front().field, message);
        }
        return ParsedRequest{std::move(r), std::move(warnings_)};
    }

private:
    [[noreturn]] static void fail(const std::string& field, const std::string& rule) {
        throw ValidationError(field, field + ": " + rule);
    }

    void check_keys(const json& obj, const std::string& path,
                    std::initializer_list<std::string_view> known) {
        for (const auto& [key, value] : obj.items()) {
            if (std::find(known.begin(), known.end(), key) != known.end()) continue;
            unknown(path.empty() ? key : path + "." + key);
        }
    }

    void unknown(const std::string& path) {
        if (mode_ == ParseMode::strict) fail(path, "unknown key");
        warnings_.push_back("ignored unknown key '" + path + "'");
    }

    static bool read_bool(const json& v, const std::string& field) {
        if (!v.is_boolean()) fail(field, "must be a boolean");
        return v.get<bool>();
    }

    static std::string read_string(const json& v, const std::string& field) {
        if (!v.is_string()) fail(field, "must be a string");
        return v.get<std::string>();
    }

    static AppType read_app_type(const json& opt, const std::string& field) {
        if (!opt.contains("app_type")) fail(field, "required");
        const std::string text = read_string(opt.at("app_type"), field);
        const auto app = parse_app_type(text);
        if (!app) throw UnsupportedError("unsupported app_type '" + text + "'");
        if (*app != AppType::ai_training) {
            throw UnsupportedError("app_type '" + text + "' is not supported; only ai_training is");
        }
        return *app;
    }

    OptBuildTarget read_opt_build(const json& v, const std::string& path) {
        if (!v.is_object()) fail(path, "must be an object");
        check_keys(v, path, {"cpu_type", "acc_type"});
        OptBuildTarget t;
        for (const char* key : {"cpu_type", "acc_type"}) {
            if (!v.contains(key)) fail(path + "." + key, "required");
        }
        const std::string cpu = read_string(v.at("cpu_type"), path + ".cpu_type");
        const std::string acc = read_string(v.at("acc_type"), path + ".acc_type");
        const auto c = parse_cpu_type(cpu);
        if (!c) fail(path + ".cpu_type", "unknown cpu type '" + cpu + "'");
        const auto a = parse_acc_type(acc);
        if (!a) fail(path + ".acc_type", "unknown accelerator type '" + acc + "'");
        t.cpu_type = *c;
        t.acc_type = *a;
        return t;
    }

    FrameworkOptions read_ai_training(const json& v, const std::string& path) {
        if (!v.is_object()) fail(path, "must be an object");
        std::optional<FrameworkOptions> found;
        for (const auto& [key, block] : v.items()) {
            const auto fw = parse_framework(key);
            if (!fw) {
                unknown(path + "." + key);
                continue;
            }
            if (found) fail(path, "must name exactly one framework");
            found = read_framework(*fw, block, path + "." + key);
        }
        if (!found) fail(path, "must name exactly one framework");
        return *found;
    }

    FrameworkOptions read_framework(Framework fw, const json& v, const std::string& path) {
        if (!v.is_object()) fail(path, "must be an object");
        check_keys(v, path, {"version", "xla", "ngraph", "glow"});
        FrameworkOptions o;
        o.framework = fw;
        if (!v.contains("version")) fail(path + ".version", "required");
        const std::string text = read_string(v.at("version"), path + ".version");
        const auto version = Version::parse(text);
        if (!version) fail(path + ".version", "'" + text + "' is not a dotted decimal version");
        o.version = *version;
        for (Compiler c : {Compiler::glow, Compiler::ngraph, Compiler::xla}) {
            const std::string key(to_string(c));
            if (v.contains(key) && read_bool(v.at(key), path + "." + key)) o.compilers.insert(c);
        }
        return o;
    }

    ParseMode mode_;
    std::vector<std::string> warnings_;
};

// Bare `"optimisation": {...}` fragments omit the enclosing braces.
std::string wrap_fragment(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && text[first] == '"') {
        return "{" + std::string(text) + "\n}";
    }
    return std::string(text);
}

}  // namespace

Target OptimisationRequest::target() const noexcept {
    return opt_build && opt_build->acc_type != AccType::none ? Target::gpu : Target::cpu;
}

ParsedRequest parse_request(std::string_view text, ParseMode mode) {
    json doc;
    try {
        doc = json::parse(wrap_fragment(text));
    } catch (const json::parse_error& e) {
        throw SyntaxError(std::string("malformed optimisation document: ") + e.what());
    }
    return RequestReader(mode).read(doc);
}

std::vector<Violation> validate_request(const OptimisationRequest& r) {
    const std::string base(kRoot);
    std::vector<Violation> out;
    if (r.enable_opt_build && !r.opt_build) {
        out.push_back({base + ".opt_build", "required when enable_opt_build is true"});
    }
    if (r.opt_build && r.opt_build->cpu_type == CpuType::none &&
        r.opt_build->acc_type == AccType::none) {
        out.push_back({base + ".opt_build", "cpu_type and acc_type cannot both be none"});
    }
    if (r.app_type == AppType::ai_training && !r.ai_training) {
        out.push_back({base + ".ai_training", "required when app_type is ai_training"});
    }
    if (r.ai_training) {
        const auto& fo = *r.ai_training;
        const std::string fw_path = base + ".ai_training." + std::string(to_string(fo.framework));
        if (fo.version.segments().empty()) {
            out.push_back({fw_path + ".version", "must be a dotted decimal version"});
        }
        if (fo.compilers.size() > 1) {
            out.push_back({fw_path, "at most one graph compiler"});
        }
        for (Compiler c : fo.compilers) {
            if (compiler_host(c) != fo.framework) {
                out.push_back({fw_path + "." + std::string(to_string(c)),
                               std::string(to_string(c)) + " requires " +
                                   std::string(to_string(compiler_host(c)))});
            }
        }
    }
    return out;
}

std::string serialize_request(const OptimisationRequest& r) {
    const auto violations = validate_request(r);
    if (!violations.empty()) {
        const auto& v = violations.front();
        throw ValidationError(v.field, "refusing to serialize invalid request: " + v.field + ": " + v.rule);
    }
    json opt = json::object();
    opt["enable_opt_build"] = r.enable_opt_build;
    opt["app_type"] = std::string(to_string(r.app_type));
    if (r.opt_build) {
        opt["opt_build"] = {{"cpu_type", std::string(to_string(r.opt_build->cpu_type))},
                            {"acc_type", std::string(to_string(r.opt_build->acc_type))}};
    }
    if (r.ai_training) {
        json block = {{"version", r.ai_training->version.str()}};
        for (Compiler c : r.ai_training->compilers) block[std::string(to_string(c))] = true;
        opt["ai_training"] = {{std::string(to_string(r.ai_training->framework)), block}};
    }
    return detail::canonical_dump(json{{std::string(kRoot), opt}});
}

}  // namespace deployopt
