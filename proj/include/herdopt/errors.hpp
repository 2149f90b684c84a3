/*
 Copyright 2026 The herdopt authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace herdopt {

// Base class for every exception thrown by this library.  Soft outcomes
// (mesh growth exhausted, shooting divergence, ...) are reported through
// status fields instead; exceptions mean the caller asked for something
// that cannot be answered at all.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Linear solve hit a pivot below the singularity threshold.
struct SingularMatrixError : Error {
  using Error::Error;
};

// Adaptive integrator drove the step size below the representable floor.
struct StepSizeUnderflowError : Error {
  using Error::Error;
};

// Riccati solve produced no stabilizing solution meeting the residual
// contract.
struct NoStabilizingSolutionError : Error {
  using Error::Error;
};

// Closed-loop simulation could not produce any gain (the very first
// Riccati solve failed, so there is nothing cached to fall back on).
struct ControllerStalledError : Error {
  using Error::Error;
};

// Trajectory cost requested on a trajectory without control samples.
struct MissingControlsError : Error {
  using Error::Error;
};

// Scenario or trajectory file could not be parsed.
struct ParseError : Error {
  using Error::Error;
};

// Parsed scenario violates a structural requirement (counts, signs, ...).
struct ValidationError : Error {
  using Error::Error;
};

// Filesystem-level failure (missing file, unwritable path).
struct IoError : Error {
  using Error::Error;
};

}  // namespace herdopt
