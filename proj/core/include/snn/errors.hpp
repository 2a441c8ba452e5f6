#pragma once

#include <stdexcept>
#include <string>

namespace snn {

// Bad parameters, failed preconditions, out-of-range scalings.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Requested more derivatives than the test-function algebra carries.
class OrderExhausted : public DomainError {
public:
    using DomainError::DomainError;
};

// A training run or integration produced a non-finite value.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File missing, unreadable, truncated or malformed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace snn
