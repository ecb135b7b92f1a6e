#pragma once

#include <stdexcept>
#include <string>

namespace mwapex {

/// Malformed input text (config or program file); message carries the line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// A domain invariant of the inputs is violated (names the offending quantity).
class ValidationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A local Newton loop exhausted its iteration budget.
class NonConvergenceError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The mixed-control outer iteration failed to meet the stress targets.
class OuterNonConvergenceError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Pole of the apex tangent operator (hardening modulus cancels the bulk term).
class SingularTangentError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flow direction requested for an on-axis state (rho below the cutoff).
class DegenerateDirectionError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No admissible non-negative plastic multiplier exists for the trial state.
class NegativeMultiplierError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File could not be opened or written; message carries the path.
class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mwapex
