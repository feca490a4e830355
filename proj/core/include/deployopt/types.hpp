#pragma once

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace deployopt {

enum class AppType { ai_training, ai_inference, big_data, hpc };
enum class CpuType { x86, arm, power, none };
enum class AccType { nvidia, amd, fpga, none };
enum class Framework { tensorflow, pytorch, mxnet, cntk };
enum class Compiler { glow, ngraph, xla };  // alphabetical: set<Compiler> iterates in tag order
enum class Source { hub, pip, src };
enum class Target { cpu, gpu };

using CompilerSet = std::set<Compiler>;

std::string_view to_string(AppType v);
std::string_view to_string(CpuType v);
std::string_view to_string(AccType v);
std::string_view to_string(Framework v);
std::string_view to_string(Compiler v);
std::string_view to_string(Source v);
std::string_view to_string(Target v);

// Enum literals are matched case-insensitively ("Nvidia" == "nvidia").
std::optional<AppType> parse_app_type(std::string_view text);
std::optional<CpuType> parse_cpu_type(std::string_view text);
std::optional<AccType> parse_acc_type(std::string_view text);
std::optional<Framework> parse_framework(std::string_view text);
std::optional<Compiler> parse_compiler(std::string_view text);
std::optional<Source> parse_source(std::string_view text);
std::optional<Target> parse_target(std::string_view text);

/// Framework a graph compiler can be used with: xla and ngraph with
/// TensorFlow, glow with PyTorch.
Framework compiler_host(Compiler c);

/// Dotted-decimal version ("1.14"). Ordering is segment-wise numeric, so
/// "1.14" > "1.4". Leading zeros are rejected so that the text form is
/// canonical and equality of versions is equality of text.
class Version {
public:
    Version() = default;

    /// Returns nullopt unless `text` is one or more dot-separated decimal
    /// segments without leading zeros.
    static std::optional<Version> parse(std::string_view text);

    const std::string& str() const noexcept { return text_; }
    const std::vector<unsigned long>& segments() const noexcept { return segments_; }

    friend bool operator==(const Version& a, const Version& b) { return a.segments_ == b.segments_; }
    friend std::strong_ordering operator<=>(const Version& a, const Version& b) {
        return a.segments_ <=> b.segments_;
    }

private:
    std::string text_;
    std::vector<unsigned long> segments_;
};

/// Lowercases ASCII letters.
std::string ascii_lower(std::string_view text);

}  // namespace deployopt
