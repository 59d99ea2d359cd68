// Copyright 2026 The msgm-bench Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
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

namespace msgm {

// Base of every domain error raised by the library. The CLI maps these to
// exit code 1; anything else escaping is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DataErrorKind {
  kMissingColumn,
  kNonMonotoneTimestamps,
  kNonFiniteValue,
  kIrregularStep,
  kMalformed,
};

class DataError : public Error {
 public:
  DataError(DataErrorKind kind, std::string message, std::size_t row = 0)
      : Error(std::move(message)), kind_(kind), row_(row) {}

  DataErrorKind kind() const noexcept { return kind_; }
  // 0-based data row (header excluded) the error refers to, when relevant.
  std::size_t row() const noexcept { return row_; }

 private:
  DataErrorKind kind_;
  std::size_t row_;
};

// Two datasets or a dataset and a checkpoint disagree on the feature schema
// (the same-sensor rule).
class SchemaMismatch : public Error {
 public:
  using Error::Error;
};

// A window range too short to hold a single lookback+horizon example.
class EmptyBatch : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// Non-finite loss or state during training or simulation.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  ProtocolError(std::string message, std::string line)
      : Error(std::move(message)), line_(std::move(line)) {}
  const std::string& line() const noexcept { return line_; }

 private:
  std::string line_;
};

class AdapterTimeout : public Error {
 public:
  using Error::Error;
};

class AdapterExited : public Error {
 public:
  AdapterExited(std::string message, int status)
      : Error(std::move(message)), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace msgm
