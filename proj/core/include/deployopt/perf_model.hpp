#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace deployopt {

enum class Precision { fp32, fp16 };

std::string_view to_string(Precision p);
std::optional<Precision> parse_precision(std::string_view text);

/// Numeric summary of a training job.
struct WorkloadDescriptor {
    std::string name;
    unsigned long batch_size = 1;
    unsigned long epochs = 1;
    unsigned long image_height = 1;
    unsigned long image_width = 1;
    unsigned long trainable_params = 1;
    Precision precision = Precision::fp32;

    friend bool operator==(const WorkloadDescriptor&, const WorkloadDescriptor&) = default;
};

struct InfraDescriptor {
    enum class Accelerator { none, nvidia };

    std::string name;
    double peak_gflops = 1.0;
    double mem_bandwidth_gbs = 1.0;
    Accelerator accelerator = Accelerator::none;

    friend bool operator==(const InfraDescriptor&, const InfraDescriptor&) = default;
};

/// One timed training run. `config_tag` is an image tag, followed by
/// "+<compiler>" for every graph compiler enabled at run time.
struct BenchmarkRecord {
    std::string config_tag;
    WorkloadDescriptor workload;
    InfraDescriptor infra;
    double wallclock_s = 0.0;  // total over all epochs
};

/// Sorted (name, value) pairs.
using FeatureVector = std::vector<std::pair<std::string, double>>;

namespace feature {
inline constexpr std::string_view batch_size = "batch_size";
inline constexpr std::string_view inv_mem_bandwidth = "inv_mem_bandwidth_gbs";
inline constexpr std::string_view inv_peak_gflops = "inv_peak_gflops";
inline constexpr std::string_view params_millions = "params_millions";
}  // namespace feature

std::string startup_feature(std::string_view config_tag);
std::string epoch_feature(std::string_view config_tag);

/// Runtime model: wallclock = startup[tag] + epochs * per_epoch[tag] plus a
/// shared linear term in batch size, parameter count (millions), and the
/// reciprocals of peak rate and memory bandwidth.
FeatureVector build_features(std::string_view config_tag, const WorkloadDescriptor& workload,
                             const InfraDescriptor& infra);

struct PerfModel {
    std::vector<std::string> feature_names;  // sorted
    std::vector<double> coefficients;        // seconds per unit feature
    double ridge_lambda = 0.0;
    std::set<std::string> covered_tags;

    bool covers(std::string_view config_tag) const;
    std::optional<double> coefficient(std::string_view name) const;
};

/// Ridge least-squares fit over the union of record features. Global
/// features that are constant across every record are dropped: each record
/// carries exactly one startup feature, so a constant column lies in the
/// span of the startup columns and cannot be identified.
///
/// Throws EmptyDataError for no records, SingularDesignError when
/// ridge_lambda == 0 and the design is rank-deficient, ValidationError for an
/// invalid record.
PerfModel fit(const std::vector<BenchmarkRecord>& records, double ridge_lambda);

/// Throws UncoveredTagError or DegeneratePredictionError (prediction <= 0).
double predict(const PerfModel& model, std::string_view config_tag,
               const WorkloadDescriptor& workload, const InfraDescriptor& infra);

struct RankedConfiguration {
    enum class Status { ranked, uncovered, degenerate };

    std::string config_tag;
    std::optional<double> seconds;
    Status status = Status::ranked;

    friend bool operator==(const RankedConfiguration&, const RankedConfiguration&) = default;
};

/// Relative gap below which two predictions count as a tie.
inline constexpr double kTieTolerance = 1e-9;

/// Covered candidates ascending by predicted seconds (ties, i.e. predictions
/// within kTieTolerance of the fastest in their run, by tag), then the
/// rest in tag order with their status set. Candidates with a non-positive
/// prediction are reported as degenerate.
std::vector<RankedConfiguration> rank_configurations(const PerfModel& model,
                                                     const std::vector<std::string>& candidates,
                                                     const WorkloadDescriptor& workload,
                                                     const InfraDescriptor& infra);

// Validation of descriptor invariants; each throws ValidationError.
void validate(const WorkloadDescriptor& w);
void validate(const InfraDescriptor& i);
void validate(const BenchmarkRecord& r);

// --- persistence -----------------------------------------------------------

/// Header of the benchmark record CSV.
inline constexpr std::string_view kRecordsHeader =
    "config_tag,workload,batch_size,epochs,img_h,img_w,params,precision,infra,peak_gflops,"
    "mem_bw_gbs,wallclock_s";

/// Throws FormatError (code CSV_FORMAT) naming the 1-based line on bad rows.
std::vector<BenchmarkRecord> parse_records_csv(std::string_view text);
std::vector<BenchmarkRecord> load_records_csv(const std::filesystem::path& path);
std::string records_to_csv(const std::vector<BenchmarkRecord>& records);

std::string model_to_json(const PerfModel& model);
PerfModel model_from_json(std::string_view text);
void save_model(const PerfModel& model, const std::filesystem::path& path);
PerfModel load_model(const std::filesystem::path& path);

WorkloadDescriptor workload_from_json(std::string_view text);
WorkloadDescriptor load_workload(const std::filesystem::path& path);
std::string workload_to_json(const WorkloadDescriptor& w);
InfraDescriptor infra_from_json(std::string_view text);
InfraDescriptor load_infra(const std::filesystem::path& path);
std::string infra_to_json(const InfraDescriptor& i);

}  // namespace deployopt
