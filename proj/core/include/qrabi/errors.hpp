#pragma once

#include <stdexcept>
#include <string>

namespace qrabi {

// Invalid arguments: bad dimensions, out-of-range indices, parameters outside a formula's domain.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DimensionError : public DomainError {
public:
    using DomainError::DomainError;
};

// Numerical failures: step-size underflow, invariant breach, singular systems.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qrabi
