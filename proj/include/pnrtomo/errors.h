// Copyright 2026 The pnrtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
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

namespace pnrtomo {

/// Raised when matrix or vector dimensions of two operands disagree.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a configuration or input file is malformed. `field` names the
/// offending entry so the CLI can report it.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string &message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

  const std::string &field() const { return field_; }

 private:
  std::string field_;
};

/// Raised on file system failures and corrupt containers.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A reference builder did not see every outcome label often enough.
class CoverageError : public std::runtime_error {
 public:
  CoverageError(std::size_t label, const std::string &message)
      : std::runtime_error(message), label_(label) {}

  std::size_t label() const { return label_; }

 private:
  std::size_t label_;
};

/// Histogram peaks could not be resolved into the expected number of classes.
class SeparationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pnrtomo
