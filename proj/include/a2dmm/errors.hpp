#ifndef A2DMM_ERRORS_HPP_
#define A2DMM_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace a2dmm {

//! Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GenerationFailure : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " + std::to_string(got)) {}
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class ParameterOutOfRange : public Error {
 public:
  using Error::Error;
};

//! Raised when an iterate becomes non-finite or leaves the divergence guard.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(std::size_t iteration)
      : Error("divergence detected at iteration " + std::to_string(iteration)), iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  //! 1-based line number, 0 when the error is not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace a2dmm

#endif  // A2DMM_ERRORS_HPP_
