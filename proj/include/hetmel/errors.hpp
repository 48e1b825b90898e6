#pragma once

#include <stdexcept>
#include <string>

namespace hetmel {

// Input outside the model's domain (invalid parameters, bad configuration).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical procedure failed: step-size underflow, non-convergence,
// Newton divergence, unresolved curves.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument landed on a pole of Gamma (or of a 2F1 parameter).
class PoleError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace hetmel
