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

#include <functional>
#include <vector>

#include "herdopt/matrix.hpp"

namespace herdopt {

using VectorField = std::function<Vec(double, const Vec&)>;

// Called once per accepted node, including the initial one, with the node
// time, state and derivative there.
using StepObserver = std::function<void(double, const Vec&, const Vec&)>;

// Accepted nodes of an adaptive integration.  Derivatives are stored so
// the path can be resampled with cubic Hermite interpolation, which has
// the same order as the local error control.
struct OdePath {
  Vec times;
  std::vector<Vec> values;
  std::vector<Vec> derivs;

  std::size_t size() const { return times.size(); }
  const Vec& back() const { return values.back(); }
};

// Embedded Runge-Kutta 5(4) pair with the first-same-as-last property.
// The per-step error estimate is measured against atol + rtol*|y| mixed
// per component; steps shrink by at most 5x and grow by at most 10x.  The
// final step is clamped so the last node lands on tf exactly.  Throws
// StepSizeUnderflowError once the step falls below 1e-14*(tf - t0).
OdePath integrate_adaptive(const VectorField& f, Vec y0, double t0, double tf,
                           double rtol, double atol);
OdePath integrate_adaptive(const VectorField& f, Vec y0, double t0, double tf,
                           double rtol, double atol,
                           const StepObserver& on_step);

// Cubic Hermite evaluation of a stored path at time t, clamped to the
// path's time range.
Vec path_sample(const OdePath& path, double t);

}  // namespace herdopt
