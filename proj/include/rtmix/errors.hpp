#pragma once

#include <stdexcept>
#include <string>

namespace rtmix {

/// Error taxonomy shared by the library and the CLI. Each class maps to a
/// documented process exit code so scripted callers can branch on failures:
///
///   SchemaError           -> 2   (unreadable file, missing column, bad rows,
///                                 bad argument values)
///   DesignError           -> 3   (condition levels != 2, empty subject cell,
///                                 rows incompatible with a requested transform)
///   NumericError          -> 4   (non-finite likelihood, degenerate system)
///   UnstableEstimateError -> 5   (a Monte Carlo denominator came back zero)
///
/// Anything else escaping to main() is reported as an internal error (code 1).

struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DesignError : std::runtime_error {
    explicit DesignError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Rows violate the preconditions of a value transform (e.g. rt <= shift).
/// A design-class failure: the data cannot support the requested analysis.
struct TransformError : DesignError {
    explicit TransformError(const std::string& msg) : DesignError(msg) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

struct UnstableEstimateError : std::runtime_error {
    explicit UnstableEstimateError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid argument values (probability outside (0,1), non-positive scale, ...).
/// Mapped to the schema exit code: the caller handed us something malformed.
struct DomainError : SchemaError {
    explicit DomainError(const std::string& msg) : SchemaError(msg) {}
};

enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitSchema = 2,
    kExitDesign = 3,
    kExitNumeric = 4,
    kExitUnstable = 5,
};

}  // namespace rtmix
