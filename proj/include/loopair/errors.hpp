#pragma once

#include <stdexcept>
#include <string>

namespace loopair {

/// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

/// Bad user input: malformed plant documents, invalid parameters,
/// dimension/label mismatches, out-of-range arguments.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A linear solve hit a pivot below the acceptance threshold.
class SingularMatrixError : public Error {
public:
    using Error::Error;
};

/// Every candidate matching contains a non-positive interaction element.
class NoViablePairingError : public Error {
public:
    using Error::Error;
};

/// A closed-loop run produced a non-finite state.
class SimulationError : public Error {
public:
    using Error::Error;
};

}  // namespace loopair
