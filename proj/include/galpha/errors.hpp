#pragma once

#include <stdexcept>
#include <string>

namespace galpha {

/// Invalid user input or configuration. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A value outside its admissible range, e.g. a dissipation control outside [0, 1].
class RangeError : public ConfigError {
public:
    RangeError(const std::string& what, int index = -1)
        : ConfigError(what), index_(index) {}

    /// Zero-based index of the offending entry, or -1 if not applicable.
    int index() const noexcept { return index_; }

private:
    int index_;
};

/// Failure inside a numerical kernel. The CLI maps this to exit code 1.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LinearSolveError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Vanishing denominator alpha_j + gamma_j * theta (or its last-stage analogue).
class PoleError : public NumericalError {
public:
    PoleError(const std::string& what, int stage)
        : NumericalError(what), stage_(stage) {}

    /// One-based stage index.
    int stage() const noexcept { return stage_; }

private:
    int stage_;
};

} // namespace galpha
