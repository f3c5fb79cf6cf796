#pragma once

#include <stdexcept>
#include <string>

namespace qubitbath {

// Adaptive controller could not make progress (step size underflow or step budget exhausted).
class StepFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A state component became NaN or infinite during integration.
class NanDetected : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed configuration text; the message carries line/field context.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Well-formed input whose values violate a physical or structural constraint.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qubitbath
