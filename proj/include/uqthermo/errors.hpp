/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace uqthermo {

enum class ErrorKind {
  NotSquare,
  NotHermitian,
  NotPSD,
  TraceMismatch,
  DimMismatch,
  DimTooLarge,
  DomainError,
  GridTooCoarse,
  BadParameter,
  IllConditioned,
  SolverFailure,
  VerificationFailed,
  BackendUnavailable,
  SchemaError,
};

const char* to_string(ErrorKind kind) noexcept;

/// Library-wide exception carrying a machine-readable kind next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace uqthermo
