// Copyright 2026 The PEGA Authors.
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

#ifndef PEGA_ERRORS_HPP_
#define PEGA_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pega {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A malformed line in one of the text inputs.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& message)
      : Error(source + ":" + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Input parsed but violates a structural invariant (counts, duplicates).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Dimension mismatch between stored and expected tensors.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Truncated, tampered, or foreign checkpoint.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf encountered during training.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A pipeline stage was asked to run before its upstream stage.
class MissingArtifactError : public Error {
 public:
  using Error::Error;
};

}  // namespace pega

#endif  // PEGA_ERRORS_HPP_
