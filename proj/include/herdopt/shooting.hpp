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

#include <utility>

#include "herdopt/matrix.hpp"
#include "herdopt/pmp.hpp"
#include "herdopt/scenario.hpp"
#include "herdopt/trajectory.hpp"

namespace herdopt {

enum class ShootStatus { converged, diverged, max_iterations };

struct ShootResult {
  Vec initial_costate;
  double terminal_costate_norm = 0.0;
  bool converged = false;
  int iterations = 0;
  ShootStatus status = ShootStatus::max_iterations;
  Trajectory trajectory;
};

// Integrates the augmented system together with its variational equation
// M' = J(y) M, M(0) = [0; I], so that the returned matrix block is the
// exact sensitivity of the terminal costate with respect to the initial
// costate.  Returns the terminal augmented state and that sensitivity.
std::pair<Vec, DenseMatrix> integrate_with_sensitivity(
    const Vec& aug0, const ScenarioSpec& spec, double rtol,
    CostateModel model = CostateModel::standard);

// Single shooting on the free terminal costate: Newton on
//   F(costate0) = costate(tf; costate0)
// with the variational sensitivity as the exact Jacobian.  An iterate
// whose norm exceeds 1e8, or an integration that underflows its step
// size, ends the solve with status `diverged`; this method is expected
// to be fragile on strongly coupled scenarios and the status reports
// that honestly.  The trajectory of the last successful integration is
// returned either way.
ShootResult shoot(const ScenarioSpec& spec, Vec costate_guess,
                  int max_iter = 30, double tol = 1e-8, double rtol = 1e-10,
                  CostateModel model = CostateModel::standard);

}  // namespace herdopt
