#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deployopt/types.hpp"

namespace deployopt {

struct OptBuildTarget {
    CpuType cpu_type = CpuType::x86;
    AccType acc_type = AccType::none;

    friend bool operator==(const OptBuildTarget&, const OptBuildTarget&) = default;
};

struct FrameworkOptions {
    Framework framework = Framework::tensorflow;
    Version version;
    CompilerSet compilers;

    friend bool operator==(const FrameworkOptions&, const FrameworkOptions&) = default;
};

/// Parsed optimisation request.
struct OptimisationRequest {
    bool enable_opt_build = false;
    AppType app_type = AppType::ai_training;
    std::optional<OptBuildTarget> opt_build;
    std::optional<FrameworkOptions> ai_training;

    /// Image target implied by the request: gpu iff an accelerator is named.
    Target target() const noexcept;

    friend bool operator==(const OptimisationRequest&, const OptimisationRequest&) = default;
};

struct Violation {
    std::string field;
    std::string rule;

    friend bool operator==(const Violation&, const Violation&) = default;
};

enum class ParseMode { strict, lenient };

struct ParsedRequest {
    OptimisationRequest request;
    /// Unknown keys ignored in lenient mode, one entry per key path.
    std::vector<std::string> warnings;
};

/// Parses an optimisation document. Both a complete JSON object with a
/// top-level "optimisation" key and the bare `"optimisation": {...}` member
/// form are accepted.
///
/// Throws SyntaxError for malformed JSON, UnsupportedError for an app_type
/// other than ai_training, ValidationError for anything else (the error's
/// field() names the offending key path).
ParsedRequest parse_request(std::string_view text, ParseMode mode = ParseMode::strict);

/// Canonical form: 4-space indentation, sorted keys, lowercase enum
/// literals, compiler flags only when enabled. Throws ValidationError when
/// the request violates an invariant.
std::string serialize_request(const OptimisationRequest& request);

/// Every violated invariant, in a fixed order. Empty iff the request is valid.
std::vector<Violation> validate_request(const OptimisationRequest& request);

}  // namespace deployopt
