// Copyright 2026 The fuseloc Authors.
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

namespace fuseloc {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameters or inputs that violate a documented precondition. The CLI maps
// this family to exit code 2.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimension : public InvalidArgument {
 public:
  explicit UnsupportedDimension(const std::string& what)
      : InvalidArgument("unsupported dimension: " + what) {}
};

// A requested target intensity cannot be produced by the model.
class InfeasibleDensity : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Numerical failures during a run (quadrature, fitting). Exit code 3.
class NumericError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace fuseloc
