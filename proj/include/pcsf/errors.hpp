#pragma once

#include <stdexcept>
#include <string>

namespace pcsf {

/// Base class of every error raised by the library. Each subclass maps to
/// one process exit code of the `pcsf` tool.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
  virtual const char* kind() const noexcept { return "error"; }
};

/// Precondition or argument-domain violation (bad N, t >= T, ...).
class DomainError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
  const char* kind() const noexcept override { return "domain"; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
  const char* kind() const noexcept override { return "config"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
  const char* kind() const noexcept override { return "io"; }
};

/// Failure of a numerical procedure.
class NumericalError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 1; }
  const char* kind() const noexcept override { return "numerical"; }
};

/// Curvature dropped to zero or below somewhere on the evaluation grid.
class PositivityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "positivity"; }
};

class StepUnderflowError : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "step_underflow"; }
};

class MaxStepsError : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "max_steps"; }
};

class FitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "fit"; }
};

}  // namespace pcsf
