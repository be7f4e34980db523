// Copyright 2026 The gamered Authors.
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

namespace gamered {

/// Bad shapes, out-of-range parameters, rank-deficient maps.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A matrix that must be inverted is numerically singular.
class SingularMatrix : public std::runtime_error {
 public:
  SingularMatrix(std::string matrix_name, double condition)
      : std::runtime_error("matrix " + matrix_name +
                           " is numerically singular (condition number " +
                           std::to_string(condition) + ")"),
        matrix_name_(std::move(matrix_name)),
        condition_(condition) {}

  const std::string& matrix_name() const noexcept { return matrix_name_; }
  double condition() const noexcept { return condition_; }

 private:
  std::string matrix_name_;
  double condition_;
};

/// A scenario whose derived quantities are undefined (zero margin vector,
/// vanishing denominators, non-positive dual values).
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& msg)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + msg),
        file_(file),
        line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

}  // namespace gamered
