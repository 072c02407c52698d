// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nvtwin {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (unsorted stream, arity
/// mismatch reaching the evaluator, ...). Indicates a bug upstream.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Two events claimed the same broadcast slot.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class AddressSpaceExceeded : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class HostIoError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  CapacityError(std::size_t required, std::size_t capacity)
      : Error("graph needs " + std::to_string(required) + " nodes, capacity is " +
              std::to_string(capacity)),
        required_(required),
        capacity_(capacity) {}

  std::size_t required() const noexcept { return required_; }
  std::size_t capacity() const noexcept { return capacity_; }

 private:
  std::size_t required_;
  std::size_t capacity_;
};

class IncompleteSpec : public Error {
 public:
  using Error::Error;
};

class BootImageError : public Error {
 public:
  using Error::Error;
};

}  // namespace nvtwin
