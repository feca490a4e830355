#include "deployopt/types.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <utility>

namespace deployopt {

namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::pair<E, std::string_view>, N>& table,
                        std::string_view text) {
    const std::string lowered = ascii_lower(text);
    for (const auto& [value, name] : table) {
        if (name == lowered) return value;
    }
    return std::nullopt;
}

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E v) {
    for (const auto& [value, name] : table) {
        if (value == v) return name;
    }
    return "?";
}

constexpr std::array<std::pair<AppType, std::string_view>, 4> kAppTypes{{
    {AppType::ai_training, "ai_training"},
    {AppType::ai_inference, "ai_inference"},
    {AppType::big_data, "big_data"},
    {AppType::hpc, "hpc"},
}};
constexpr std::array<std::pair<CpuType, std::string_view>, 4> kCpuTypes{{
    {CpuType::x86, "x86"},
    {CpuType::arm, "arm"},
    {CpuType::power, "power"},
    {CpuType::none, "none"},
}};
constexpr std::array<std::pair<AccType, std::string_view>, 4> kAccTypes{{
    {AccType::nvidia, "nvidia"},
    {AccType::amd, "amd"},
    {AccType::fpga, "fpga"},
    {AccType::none, "none"},
}};
constexpr std::array<std::pair<Framework, std::string_view>, 4> kFrameworks{{
    {Framework::tensorflow, "tensorflow"},
    {Framework::pytorch, "pytorch"},
    {Framework::mxnet, "mxnet"},
    {Framework::cntk, "cntk"},
}};
constexpr std::array<std::pair<Compiler, std::string_view>, 3> kCompilers{{
    {Compiler::glow, "glow"},
    {Compiler::ngraph, "ngraph"},
    {Compiler::xla, "xla"},
}};
constexpr std::array<std::pair<Source, std::string_view>, 3> kSources{{
    {Source::hub, "hub"},
    {Source::pip, "pip"},
    {Source::src, "src"},
}};
constexpr std::array<std::pair<Target, std::string_view>, 2> kTargets{{
    {Target::cpu, "cpu"},
    {Target::gpu, "gpu"},
}};

}  // namespace

std::string ascii_lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
    });
    return out;
}

std::string_view to_string(AppType v) { return name_of(kAppTypes, v); }
std::string_view to_string(CpuType v) { return name_of(kCpuTypes, v); }
std::string_view to_string(AccType v) { return name_of(kAccTypes, v); }
std::string_view to_string(Framework v) { return name_of(kFrameworks, v); }
std::string_view to_string(Compiler v) { return name_of(kCompilers, v); }
std::string_view to_string(Source v) { return name_of(kSources, v); }
std::string_view to_string(Target v) { return name_of(kTargets, v); }

std::optional<AppType> parse_app_type(std::string_view t) { return lookup(kAppTypes, t); }
std::optional<CpuType> parse_cpu_type(std::string_view t) { return lookup(kCpuTypes, t); }
std::optional<AccType> parse_acc_type(std::string_view t) { return lookup(kAccTypes, t); }
std::optional<Framework> parse_framework(std::string_view t) { return lookup(kFrameworks, t); }
std::optional<Compiler> parse_compiler(std::string_view t) { return lookup(kCompilers, t); }
std::optional<Source> parse_source(std::string_view t) { return lookup(kSources, t); }
std::optional<Target> parse_target(std::string_view t) { return lookup(kTargets, t); }

Framework compiler_host(Compiler c) {
    return c == Compiler::glow ? Framework::pytorch : Framework::tensorflow;
}

std::optional<Version> Version::parse(std::string_view text) {
    Version v;
    std::size_t pos = 0;
    while (true) {
        const std::size_t dot = text.find('.', pos);
        const std::string_view seg =
            text.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos);
        if (seg.empty() || (seg.size() > 1 && seg.front() == '0')) return std::nullopt;
        unsigned long value = 0;
        const auto [end, ec] = std::from_chars(seg.data(), seg.data() + seg.size(), value);
        if (ec != std::errc{} || end != seg.data() + seg.size()) return std::nullopt;
        v.segments_.push_back(value);
        if (dot == std::string_view::npos) break;
        pos = dot + 1;
    }
    v.text_ = std::string(text);
    return v;
}

}  // namespace deployopt
