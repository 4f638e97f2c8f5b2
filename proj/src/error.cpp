#include "commdist/error.hpp"

namespace commdist {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InputNotFinite: return "InputNotFinite";
        case ErrorKind::NonConvergence: return "NonConvergence";
        case ErrorKind::NotARotation: return "NotARotation";
        case ErrorKind::SchemaError: return "SchemaError";
        case ErrorKind::NonMonotoneFrequency: return "NonMonotoneFrequency";
        case ErrorKind::InsufficientSamples: return "InsufficientSamples";
        case ErrorKind::MissingFrequency: return "MissingFrequency";
        case ErrorKind::ExcludedFrequency: return "ExcludedFrequency";
        case ErrorKind::DegenerateData: return "DegenerateData";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::TooFewSamples: return "TooFewSamples";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::MissingLaplace: return "MissingLaplace";
    }
    return "Unknown";
}

bool is_numerical(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NonConvergence:
        case ErrorKind::NonFinite:
        case ErrorKind::DegenerateData:
            return true;
        default:
            return false;
    }
}

}  // namespace commdist
