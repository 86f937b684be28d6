// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace ldgea {

/// Root of every exception thrown by the core library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller broke a documented precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A quantity was requested outside its model's validity range.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or missing configuration, preset or catalog input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Paraxial analysis of a system with no optical power.
class NoPowerError : public Error {
 public:
  using Error::Error;
};

/// The merit evaluation produced a non-finite intermediate.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, int surface)
      : Error(what), surface_(surface) {}
  int surface() const noexcept { return surface_; }

 private:
  int surface_;
};

}  // namespace ldgea
