#pragma once

#include <stdexcept>
#include <string>

namespace lagcoup {

// Error taxonomy. Everything derives from std::runtime_error so callers can
// catch broadly; the CLI maps config errors to exit 1 and runtime errors to 2.

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PlanInvalid : ConfigError {
    using ConfigError::ConfigError;
};

struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingTau : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IndexOutOfTrace : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidDistribution : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidSurvival : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TooFewProcesses : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ZeroVariance : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EvaluationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StateSpaceTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TailTooHeavy : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace lagcoup
