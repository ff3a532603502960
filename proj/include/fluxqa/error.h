// Copyright 2026 The fluxqa Authors
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

#ifndef FLUXQA_ERROR_H
#define FLUXQA_ERROR_H

#include <stdexcept>
#include <string>

namespace fluxqa {

/// Bad input: wrong dimensions, out-of-range parameters, malformed files.
/// The CLI maps these to exit code 1 and the REST service to HTTP 422.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string reason, const std::string &message)
      : std::invalid_argument(message), reason_(std::move(reason)) {}
  explicit ValidationError(const std::string &message) : ValidationError("invalid_input", message) {}

  /// Machine-readable reason tag, e.g. "collinear_centers".
  const std::string &reason() const { return reason_; }

 private:
  std::string reason_;
};

/// Calibration data is insufficient to proceed (too few centers, too few periods).
class CalibrationInsufficient : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A numerical procedure failed: integrator step underflow, fit non-convergence.
/// Exit code 2 from the CLI.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fluxqa

#endif  // FLUXQA_ERROR_H
