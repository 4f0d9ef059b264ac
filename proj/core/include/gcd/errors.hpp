// Copyright 2026 The GCD Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gcd {

/// Root of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user configuration (hyperparameters, config files, CLI flags).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input vectors violate a numeric precondition (length, normalization, support).
class NumericsError : public Error {
 public:
  using Error::Error;
};

/// Base class for failures raised by a logits backend.
class BackendError : public Error {
 public:
  using Error::Error;
};

/// Connection refused, timeout, or other socket-level failure.
class TransportError : public BackendError {
 public:
  using BackendError::BackendError;
};

/// No response within the configured timeout.
class TimeoutError : public TransportError {
 public:
  using TransportError::TransportError;
};

/// Remote endpoint answered with a non-2xx status.
class HttpStatusError : public BackendError {
 public:
  HttpStatusError(int status, const std::string& message)
      : BackendError("HTTP " + std::to_string(status) + ": " + message), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

/// Body could not be parsed or violates the wire schema.
class ProtocolError : public BackendError {
 public:
  using BackendError::BackendError;
};

/// Logits or attention dimensions disagree with the backend descriptor.
class ShapeMismatchError : public BackendError {
 public:
  using BackendError::BackendError;
};

/// Fixture backend asked for a sequence it never recorded.
class FixtureMissError : public BackendError {
 public:
  using BackendError::BackendError;
};

/// A backend failure annotated with the generation step at which it happened.
class GenerationError : public Error {
 public:
  GenerationError(std::size_t step, const std::string& message)
      : Error("step " + std::to_string(step) + ": " + message), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// A metric was requested from traces that never recorded the passes it needs.
class MetricUnavailable : public Error {
 public:
  using Error::Error;
};

}  // namespace gcd
