#include "deployopt/perf_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "deployopt/error.hpp"
#include "deployopt/linalg.hpp"
#include "deployopt/types.hpp"
#include "json_util.hpp"

namespace deployopt {

using detail::json;

std::string_view to_string(Precision p) { return p == Precision::fp16 ? "fp16" : "fp32"; }

std::optional<Precision> parse_precision(std::string_view text) {
    const std::string t = ascii_lower(text);
    if (t == "fp32") return Precision::fp32;
    if (t == "fp16") return Precision::fp16;
    return std::nullopt;
}

std::string startup_feature(std::string_view tag) { return std::string(tag) + ":startup"; }
std::string epoch_feature(std::string_view tag) { return std::string(tag) + ":epoch"; }

namespace {

bool is_global(std::string_view name) {
    return name == feature::batch_size || name == feature::inv_mem_bandwidth ||
           name == feature::inv_peak_gflops || name == feature::params_millions;
}

std::map<std::string, double, std::less<>> feature_map(std::string_view tag, const WorkloadDescriptor& w,
                                                        const InfraDescriptor& i) {
    return {
        {startup_feature(tag), 1.0},
        {epoch_feature(tag), static_cast<double>(w.epochs)},
        {std::string(feature::batch_size), static_cast<double>(w.batch_size)},
        {std::string(feature::params_millions), static_cast<double>(w.trainable_params) / 1e6},
        {std::string(feature::inv_peak_gflops), 1.0 / i.peak_gflops},
        {std::string(feature::inv_mem_bandwidth), 1.0 / i.mem_bandwidth_gbs},
    };
}

}  // namespace

FeatureVector build_features(std::string_view tag, const WorkloadDescriptor& w, const InfraDescriptor& i) {
    const auto m = feature_map(tag, w, i);
    return {m.begin(), m.end()};
}

bool PerfModel::covers(std::string_view tag) const { return covered_tags.contains(std::string(tag)); }

std::optional<double> PerfModel::coefficient(std::string_view name) const {
    const auto it = std::lower_bound(feature_names.begin(), feature_names.end(), name);
    if (it == feature_names.end() || *it != name) return std::nullopt;
    return coefficients[static_cast<std::size_t>(it - feature_names.begin())];
}

void validate(const WorkloadDescriptor& w) {
    if (w.name.empty()) throw ValidationError("workload.name", "workload name must be non-empty", "WORKLOAD_FORMAT");
    const std::pair<const char*, unsigned long> counts[] = {
        {"batch_size", w.batch_size},     {"epochs", w.epochs},
        {"image_shape", w.image_height},  {"image_shape", w.image_width},
        {"trainable_params", w.trainable_params},
    };
    for (const auto& [field, value] : counts) {
        if (value < 1) {
            throw ValidationError(std::string("workload.") + field, std::string("workload ") + field + " must be >= 1",
                                  "WORKLOAD_FORMAT");
        }
    }
}

void validate(const InfraDescriptor& i) {
    if (i.name.empty()) throw ValidationError("infra.name", "infrastructure name must be non-empty", "INFRA_FORMAT");
    if (!(i.peak_gflops > 0.0) || !std::isfinite(i.peak_gflops)) {
        throw ValidationError("infra.peak_gflops", "peak_gflops must be positive", "INFRA_FORMAT");
    }
    if (!(i.mem_bandwidth_gbs > 0.0) || !std::isfinite(i.mem_bandwidth_gbs)) {
        throw ValidationError("infra.mem_bandwidth_gbs", "mem_bandwidth_gbs must be positive", "INFRA_FORMAT");
    }
}

void validate(const BenchmarkRecord& r) {
    if (r.config_tag.empty()) throw ValidationError("config_tag", "config_tag must be non-empty", "CSV_FORMAT");
    validate(r.workload);
    validate(r.infra);
    if (!(r.wallclock_s > 0.0) || !std::isfinite(r.wallclock_s)) {
        throw ValidationError("wallclock_s", "wallclock_s must be positive", "CSV_FORMAT");
    }
}

PerfModel fit(const std::vector<BenchmarkRecord>& records, double ridge_lambda) {
    if (records.empty()) throw EmptyDataError("cannot fit a performance model without benchmark records");
    if (!(ridge_lambda >= 0.0)) throw PreconditionError("ridge lambda must be non-negative");

    std::vector<std::map<std::string, double, std::less<>>> rows;
    rows.reserve(records.size());
    std::set<std::string> names;
    PerfModel model;
    model.ridge_lambda = ridge_lambda;
    for (const auto& r : records) {
        validate(r);
        rows.push_back(feature_map(r.config_tag, r.workload, r.infra));
        for (const auto& [name, value] : rows.back()) names.insert(name);
        model.covered_tags.insert(r.config_tag);
    }

    for (const auto& name : names) {
        if (is_global(name)) {
            const double first = rows.front().at(name);
            const bool constant = std::all_of(rows.begin(), rows.end(),
                                              [&](const auto& row) { return row.at(name) == first; });
            if (constant) continue;
        }
        model.feature_names.push_back(name);
    }

    Matrix design(rows.size(), model.feature_names.size());
    std::vector<double> response(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < model.feature_names.size(); ++c) {
            const auto it = rows[r].find(model.feature_names[c]);
            if (it != rows[r].end()) design(r, c) = it->second;
        }
        response[r] = records[r].wallclock_s;
    }
    model.coefficients = solve_least_squares(design, response, ridge_lambda);
    return model;
}

namespace {

double raw_prediction(const PerfModel& model, std::string_view tag, const WorkloadDescriptor& w,
                      const InfraDescriptor& i) {
    const auto features = feature_map(tag, w, i);
    double total = 0.0;
    for (std::size_t c = 0; c < model.feature_names.size(); ++c) {
        const auto it = features.find(model.feature_names[c]);
        if (it != features.end()) total += model.coefficients[c] * it->second;
    }
    return total;
}

}  // namespace

double predict(const PerfModel& model, std::string_view tag, const WorkloadDescriptor& w,
               const InfraDescriptor& i) {
    if (!model.covers(tag)) throw UncoveredTagError(std::string(tag));
    const double seconds = raw_prediction(model, tag, w, i);
    if (!(seconds > 0.0) || !std::isfinite(seconds)) {
        std::ostringstream msg;
        msg << "non-positive runtime prediction " << seconds << " s for '" << tag << "'";
        throw DegeneratePredictionError(msg.str());
    }
    return seconds;
}

std::vector<RankedConfiguration> rank_configurations(const PerfModel& model,
                                                     const std::vector<std::string>& candidates,
                                                     const WorkloadDescriptor& w,
                                                     const InfraDescriptor& i) {
    using Status = RankedConfiguration::Status;
    std::vector<RankedConfiguration> ranked;
    std::vector<RankedConfiguration> rest;
    for (const auto& tag : candidates) {
        if (!model.covers(tag)) {
            rest.push_back({tag, std::nullopt, Status::uncovered});
            continue;
        }
        const double seconds = raw_prediction(model, tag, w, i);
        if (seconds > 0.0 && std::isfinite(seconds)) {
            ranked.push_back({tag, seconds, Status::ranked});
        } else {
            rest.push_back({tag, seconds, Status::degenerate});
        }
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (*a.seconds != *b.seconds) return *a.seconds < *b.seconds;
        return a.config_tag < b.config_tag;
    });
    // Runs of predictions within kTieTolerance of the run's fastest member are
    // ties; order them by tag so that rounding noise does not pick a winner.
    for (auto first = ranked.begin(); first != ranked.end();) {
        const double limit = *first->seconds * (1.0 + kTieTolerance);
        auto last = std::find_if(first, ranked.end(), [limit](const auto& r) { return *r.seconds > limit; });
        std::sort(first, last, [](const auto& a, const auto& b) { return a.config_tag < b.config_tag; });
        first = last;
    }
    std::sort(rest.begin(), rest.end(),
              [](const auto& a, const auto& b) { return a.config_tag < b.config_tag; });
    ranked.insert(ranked.end(), rest.begin(), rest.end());
    return ranked;
}

// --- CSV -------------------------------------------------------------------

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        out.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (comma == std::string_view::npos) return out;
        pos = comma + 1;
    }
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void csv_fail(std::size_t line, const std::string& what) {
    throw FormatError("CSV_FORMAT", "line " + std::to_string(line) + ": " + what);
}

unsigned long csv_count(std::string_view field, std::size_t line, const char* name) {
    unsigned long v = 0;
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc{} || end != field.data() + field.size()) {
        csv_fail(line, std::string(name) + " '" + std::string(field) + "' is not a non-negative integer");
    }
    return v;
}

double csv_real(std::string_view field, std::size_t line, const char* name) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc{} || end != field.data() + field.size() || !std::isfinite(v)) {
        csv_fail(line, std::string(name) + " '" + std::string(field) + "' is not a number");
    }
    return v;
}

std::string format_real(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

}  // namespace

std::vector<BenchmarkRecord> parse_records_csv(std::string_view text) {
    std::vector<BenchmarkRecord> records;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != kRecordsHeader) csv_fail(line_no, "expected header '" + std::string(kRecordsHeader) + "'");
            header_seen = true;
            continue;
        }
        const auto f = split_commas(line);
        if (f.size() != 12) csv_fail(line_no, "expected 12 fields, found " + std::to_string(f.size()));
        BenchmarkRecord r;
        r.config_tag = std::string(trim(f[0]));
        r.workload.name = std::string(trim(f[1]));
        r.workload.batch_size = csv_count(trim(f[2]), line_no, "batch_size");
        r.workload.epochs = csv_count(trim(f[3]), line_no, "epochs");
        r.workload.image_height = csv_count(trim(f[4]), line_no, "img_h");
        r.workload.image_width = csv_count(trim(f[5]), line_no, "img_w");
        r.workload.trainable_params = csv_count(trim(f[6]), line_no, "params");
        const auto precision = parse_precision(trim(f[7]));
        if (!precision) csv_fail(line_no, "precision '" + std::string(trim(f[7])) + "' is not fp32 or fp16");
        r.workload.precision = *precision;
        r.infra.name = std::string(trim(f[8]));
        r.infra.peak_gflops = csv_real(trim(f[9]), line_no, "peak_gflops");
        r.infra.mem_bandwidth_gbs = csv_real(trim(f[10]), line_no, "mem_bw_gbs");
        r.wallclock_s = csv_real(trim(f[11]), line_no, "wallclock_s");
        try {
            validate(r);
        } catch (const ValidationError& e) {
            csv_fail(line_no, e.what());
        }
        records.push_back(std::move(r));
    }
    if (!header_seen) csv_fail(1, "missing header '" + std::string(kRecordsHeader) + "'");
    return records;
}

std::vector<BenchmarkRecord> load_records_csv(const std::filesystem::path& path) {
    return parse_records_csv(detail::read_text_file(path, "CSV"));
}

std::string records_to_csv(const std::vector<BenchmarkRecord>& records) {
    std::string out(kRecordsHeader);
    out += '\n';
    for (const auto& r : records) {
        const auto& w = r.workload;
        out += r.config_tag + ',' + w.name + ',' + std::to_string(w.batch_size) + ',' + std::to_string(w.epochs) +
               ',' + std::to_string(w.image_height) + ',' + std::to_string(w.image_width) + ',' +
               std::to_string(w.trainable_params) + ',' + std::string(to_string(w.precision)) + ',' + r.infra.name +
               ',' + format_real(r.infra.peak_gflops) + ',' + format_real(r.infra.mem_bandwidth_gbs) + ',' +
               format_real(r.wallclock_s) + '\n';
    }
    return out;
}

// --- JSON ------------------------------------------------------------------

namespace {

[[noreturn]] void json_fail(std::string_view prefix, const std::string& what) {
    throw FormatError(std::string(prefix) + "_FORMAT", what);
}

void require_keys(const json& j, std::string_view prefix, std::initializer_list<std::string_view> keys) {
    if (!j.is_object()) json_fail(prefix, "expected a JSON object");
    if (const auto k = detail::first_unknown_key(j, keys); !k.empty()) json_fail(prefix, "unknown key '" + k + "'");
    for (auto k : keys) {
        if (!j.contains(k)) json_fail(prefix, "missing key '" + std::string(k) + "'");
    }
}

unsigned long json_count(const json& v, std::string_view prefix, const char* name) {
    if (!v.is_number_unsigned()) json_fail(prefix, std::string(name) + " must be a positive integer");
    return v.get<unsigned long>();
}

double json_real(const json& v, std::string_view prefix, const char* name) {
    if (!v.is_number()) json_fail(prefix, std::string(name) + " must be a number");
    return v.get<double>();
}

std::string json_string(const json& v, std::string_view prefix, const char* name) {
    if (!v.is_string()) json_fail(prefix, std::string(name) + " must be a string");
    return v.get<std::string>();
}

}  // namespace

std::string model_to_json(const PerfModel& m) {
    json j = {
        {"feature_names", m.feature_names},
        {"coefficients", m.coefficients},
        {"ridge_lambda", m.ridge_lambda},
        {"covered_tags", std::vector<std::string>(m.covered_tags.begin(), m.covered_tags.end())},
    };
    return detail::canonical_dump(j);
}

PerfModel model_from_json(std::string_view text) {
    constexpr std::string_view p = "MODEL";
    const json j = detail::parse_json(text, p, "model");
    require_keys(j, p, {"feature_names", "coefficients", "ridge_lambda", "covered_tags"});
    PerfModel m;
    try {
        m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        m.coefficients = j.at("coefficients").get<std::vector<double>>();
        const auto tags = j.at("covered_tags").get<std::vector<std::string>>();
        m.covered_tags = {tags.begin(), tags.end()};
    } catch (const json::exception& e) {
        json_fail(p, std::string("model: ") + e.what());
    }
    m.ridge_lambda = json_real(j.at("ridge_lambda"), p, "ridge_lambda");
    if (m.feature_names.size() != m.coefficients.size()) {
        json_fail(p, "feature_names and coefficients differ in length");
    }
    if (!std::is_sorted(m.feature_names.begin(), m.feature_names.end()) ||
        std::adjacent_find(m.feature_names.begin(), m.feature_names.end()) != m.feature_names.end()) {
        json_fail(p, "feature_names must be sorted and unique");
    }
    if (m.covered_tags.empty()) json_fail(p, "covered_tags must be non-empty");
    if (!(m.ridge_lambda >= 0.0)) json_fail(p, "ridge_lambda must be non-negative");
    return m;
}

void save_model(const PerfModel& model, const std::filesystem::path& path) {
    detail::write_text_file(path, model_to_json(model), "MODEL_IO");
}

PerfModel load_model(const std::filesystem::path& path) {
    return model_from_json(detail::read_text_file(path, "MODEL"));
}

WorkloadDescriptor workload_from_json(std::string_view text) {
    constexpr std::string_view p = "WORKLOAD";
    const json j = detail::parse_json(text, p, "workload");
    require_keys(j, p, {"name", "batch_size", "epochs", "image_shape", "trainable_params", "precision"});
    WorkloadDescriptor w;
    w.name = json_string(j.at("name"), p, "name");
    w.batch_size = json_count(j.at("batch_size"), p, "batch_size");
    w.epochs = json_count(j.at("epochs"), p, "epochs");
    const json& shape = j.at("image_shape");
    if (!shape.is_array() || shape.size() != 2) json_fail(p, "image_shape must be [height, width]");
    w.image_height = json_count(shape[0], p, "image_shape");
    w.image_width = json_count(shape[1], p, "image_shape");
    w.trainable_params = json_count(j.at("trainable_params"), p, "trainable_params");
    const std::string precision = json_string(j.at("precision"), p, "precision");
    const auto parsed = parse_precision(precision);
    if (!parsed) json_fail(p, "precision '" + precision + "' is not fp32 or fp16");
    w.precision = *parsed;
    validate(w);
    return w;
}

WorkloadDescriptor load_workload(const std::filesystem::path& path) {
    return workload_from_json(detail::read_text_file(path, "WORKLOAD"));
}

std::string workload_to_json(const WorkloadDescriptor& w) {
    return detail::canonical_dump({
        {"name", w.name},
        {"batch_size", w.batch_size},
        {"epochs", w.epochs},
        {"image_shape", {w.image_height, w.image_width}},
        {"trainable_params", w.trainable_params},
        {"precision", std::string(to_string(w.precision))},
    });
}

InfraDescriptor infra_from_json(std::string_view text) {
    constexpr std::string_view p = "INFRA";
    const json j = detail::parse_json(text, p, "infrastructure");
    require_keys(j, p, {"name", "peak_gflops", "mem_bandwidth_gbs", "accelerator"});
    InfraDescriptor i;
    i.name = json_string(j.at("name"), p, "name");
    i.peak_gflops = json_real(j.at("peak_gflops"), p, "peak_gflops");
    i.mem_bandwidth_gbs = json_real(j.at("mem_bandwidth_gbs"), p, "mem_bandwidth_gbs");
    const std::string acc = ascii_lower(json_string(j.at("accelerator"), p, "accelerator"));
    if (acc == "none") {
        i.accelerator = InfraDescriptor::Accelerator::none;
    } else if (acc == "nvidia") {
        i.accelerator = InfraDescriptor::Accelerator::nvidia;
    } else {
        json_fail(p, "accelerator '" + acc + "' is not none or nvidia");
    }
    validate(i);
    return i;
}

InfraDescriptor load_infra(const std::filesystem::path& path) {
    return infra_from_json(detail::read_text_file(path, "INFRA"));
}

std::string infra_to_json(const InfraDescriptor& i) {
    return detail::canonical_dump({
        {"name", i.name},
        {"peak_gflops", i.peak_gflops},
        {"mem_bandwidth_gbs", i.mem_bandwidth_gbs},
        {"accelerator", i.accelerator == InfraDescriptor::Accelerator::nvidia ? "nvidia" : "none"},
    });
}

}  // namespace deployopt
