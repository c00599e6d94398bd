// Copyright 2026 The lpgraph Authors
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

#ifndef LPG_ERRORS_HPP_
#define LPG_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace lpg {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, long line = -1)
      : Error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

// Structurally invalid data: out-of-range node ids, empty graphs,
// inconsistent dimensions across rows.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Invalid argument to an operation (violated precondition).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Input value outside the declared domain of a randomizer.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Matrix/vector dimension mismatch.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: non-finite activations, non-convergent solves.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Privacy budget violation: re-randomizing already-released data.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// Invalid experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Missing or mistyped columns in a results file.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Filesystem-level failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lpg

#endif  // LPG_ERRORS_HPP_
