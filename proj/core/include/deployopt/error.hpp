#pragma once

#include <stdexcept>
#include <string>

namespace deployopt {

/// Base of every error raised by the library. `code()` is a stable,
/// machine-readable identifier (e.g. "CATALOG_IO") that the CLI prints on
/// failure; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// Malformed document (JSON syntax).
class SyntaxError : public Error {
public:
    using Error::Error;
    explicit SyntaxError(const std::string& message) : Error("DSL_SYNTAX", message) {}
};

/// A value violates a type invariant. `field()` names the offending field.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& message,
                    std::string code = "DSL_VALIDATION")
        : Error(std::move(code), message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class UnsupportedError : public Error {
public:
    explicit UnsupportedError(const std::string& message)
        : Error("DSL_UNSUPPORTED", message) {}
};

class IoError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

class DuplicateTagError : public Error {
public:
    explicit DuplicateTagError(std::string tag)
        : Error("CATALOG_DUPLICATE_TAG", "duplicate image tag '" + tag + "'"),
          tag_(std::move(tag)) {}

    const std::string& tag() const noexcept { return tag_; }

private:
    std::string tag_;
};

class NoMatchError : public Error {
public:
    explicit NoMatchError(std::string filter)
        : Error("NO_MATCH", "no image matches the request: " + filter),
          filter_(std::move(filter)) {}

    /// The first resolution filter that eliminated every candidate.
    const std::string& filter() const noexcept { return filter_; }

private:
    std::string filter_;
};

class EmptyDataError : public Error {
public:
    explicit EmptyDataError(const std::string& message) : Error("EMPTY_DATA", message) {}
};

class SingularDesignError : public Error {
public:
    explicit SingularDesignError(const std::string& message)
        : Error("SINGULAR_DESIGN", message) {}
};

class UncoveredTagError : public Error {
public:
    explicit UncoveredTagError(const std::string& tag)
        : Error("UNCOVERED_TAG", "performance model has no data for '" + tag + "'") {}
};

class DegeneratePredictionError : public Error {
public:
    explicit DegeneratePredictionError(const std::string& message)
        : Error("DEGENERATE_PREDICTION", message) {}
};

class InconsistentResolutionError : public Error {
public:
    explicit InconsistentResolutionError(const std::string& message)
        : Error("INCONSISTENT_RESOLUTION", message) {}
};

class UnsupportedSchedulerError : public Error {
public:
    explicit UnsupportedSchedulerError(const std::string& name)
        : Error("UNSUPPORTED_SCHEDULER", "unsupported scheduler '" + name + "'") {}
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& message)
        : Error("PRECONDITION", message) {}
};

}  // namespace deployopt
