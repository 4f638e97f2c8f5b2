#pragma once

#include <stdexcept>
#include <string>

namespace commdist {

enum class ErrorKind {
    InputNotFinite,
    NonConvergence,
    NotARotation,
    SchemaError,
    NonMonotoneFrequency,
    InsufficientSamples,
    MissingFrequency,
    ExcludedFrequency,
    DegenerateData,
    DimensionMismatch,
    TooFewSamples,
    NonFinite,
    MissingLaplace,
};

const char* to_string(ErrorKind kind) noexcept;

/// Input/schema problems vs. numerical failures; the CLI maps these to exit codes 2 and 3.
bool is_numerical(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), detail_(message) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// The message without the kind prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

}  // namespace commdist
