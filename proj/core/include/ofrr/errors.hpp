#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ofrr {

/// A caller broke a documented precondition (shape mismatch, zero start
/// vector, invalid configuration).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file. line() is 1-based, 0 when the error is not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Every column was dropped, or a mass matrix retained no eigenvalues.
class EmptyBasisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A stage produced inf or NaN (typically binary16 overflow).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative dense kernel hit its sweep limit.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double off_norm)
      : std::runtime_error(what + " (off-diagonal norm " + std::to_string(off_norm) + ")"),
        off_norm_(off_norm) {}
  double off_norm() const noexcept { return off_norm_; }

 private:
  double off_norm_;
};

}  // namespace ofrr
