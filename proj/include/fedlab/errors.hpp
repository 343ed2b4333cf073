#pragma once

#include <stdexcept>
#include <string>

namespace fedlab {

/// Malformed inputs: dimension mismatches, out-of-range indices, bad arguments.
struct StructuralError : std::invalid_argument {
    explicit StructuralError(const std::string& what) : std::invalid_argument(what) {}
};

/// Inputs that are structurally fine but numerically degenerate (e.g. zero-norm model).
struct DegenerateInputError : std::invalid_argument {
    explicit DegenerateInputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Too few clients/rows for the requested statistic.
struct InsufficientPopulationError : std::invalid_argument {
    explicit InsufficientPopulationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Request cannot be satisfied with the given data (empty shard, more clients than samples, ...).
struct InfeasibilityError : std::runtime_error {
    explicit InfeasibilityError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure surfaced to the caller (singular matrix after regularization, ...).
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Config file / CLI validation failure.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Ranking score undefined (zero baseline value).
struct UndefinedScoreError : std::runtime_error {
    explicit UndefinedScoreError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fedlab
