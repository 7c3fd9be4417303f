// Copyright 2026 The SSANC Toolkit Authors.
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

#ifndef SSANC_ERRORS_H_
#define SSANC_ERRORS_H_

#include <stdexcept>
#include <string>

namespace ssanc {

// Root of the toolkit's exception hierarchy. The CLI maps the concrete
// subclasses onto exit codes (argument/config 2, numeric 3, I/O 4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad shapes, out-of-range parameters, violated preconditions.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent configuration (files or flags).
class ConfigError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Factorization failures, non-convergence, loss of definiteness.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Ill-posed system identification (rank deficiency, silent reference).
class IdentificationError : public NumericError {
 public:
  using NumericError::NumericError;
};

// A metric that is undefined for its inputs (e.g. zero reference energy).
class MetricError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace ssanc

#endif  // SSANC_ERRORS_H_
