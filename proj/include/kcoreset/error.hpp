#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kcoreset {

// Every error the library raises derives from Error. The CLI maps the
// subclasses onto process exit codes (see cli/commands.hpp).

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Bad arguments: empty sets, dimension mismatch, out-of-range parameters.
class InputError : public Error {
  public:
    using Error::Error;
};

/// File could not be read or written, or did not parse.
class IoError : public Error {
  public:
    using Error::Error;
};

/// Inputs are individually well-formed but inconsistent with each other
/// (metric axioms violated, coreset file does not match the data, ...).
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// A checked guarantee did not hold (only raised when the caller asks for
/// strict behaviour).
class GuaranteeViolation : public Error {
  public:
    using Error::Error;
};

/// An exhaustive computation was refused because it exceeds its guard.
class ComputationRefused : public InputError {
  public:
    using InputError::InputError;
};

/// Relative comparison used by every verifier: a <= b up to `rel` relative slack.
inline bool leq_tol(double a, double b, double rel = 1e-9) {
    return a <= b + rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

inline void require(bool condition, const std::string& message) {
    if (!condition) {
        throw InputError(message);
    }
}

}  // namespace kcoreset
