// Copyright 2026 The abacmine Authors.
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

#include <stdexcept>
#include <string>

namespace abacmine {

/// Input that does not match the attribute schema (unknown attribute,
/// wrong valuedness, unknown entity).
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data: log files, summaries, empty
/// inputs where a non-empty one is required.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Text that failed to parse. Carries a 1-based source position.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, int line, int column)
      : DataError(std::to_string(line) + ":" + std::to_string(column) + ": " +
                  what),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// A broken internal invariant. Indicates a bug, not bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace abacmine
