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

#include "herdopt/matrix.hpp"
#include "herdopt/scenario.hpp"

namespace herdopt {

// The augmented vector is [state | costate], each of spec.state_size()
// entries, the costate blocks mirroring the state layout: position
// costate p then velocity costate q per agent.
//
// The velocity costates of the sheep formally obey q' = -p.  The
// `damped_velocity` variant instead uses q' = -q for the sheep, which
// reproduces a published set of adjoint equations this code was checked
// against; it is kept selectable so that variant's trajectories remain
// reproducible, but it is NOT the stationarity system of the cost below
// and the default should be used everywhere else.
enum class CostateModel { standard, damped_velocity };

// Maximizing control for the dogs given the augmented state: u = q_d/2.
Vec optimal_control(const Vec& aug, const ScenarioSpec& spec);

// Control Hamiltonian with costs entering negatively:
//   H = sum_j (p_d.v_d + q_d.u) + sum_i (p_s.v_s + q_s.g_i)
//     - alpha*sum|s|^2 - beta*sum|d|^2 - sum|u|^2
// (ring mode swaps the beta term for its ring form).  Constant along
// integral curves of augmented_deriv when u = optimal_control.
double hamiltonian(const Vec& aug, const Vec& controls,
                   const ScenarioSpec& spec);

// Right-hand side of the state+costate system with the maximizing
// control substituted.
Vec augmented_deriv(const Vec& aug, const ScenarioSpec& spec,
                    CostateModel model = CostateModel::standard);

// Exact Jacobian of augmented_deriv.
DenseMatrix augmented_jacobian(const Vec& aug, const ScenarioSpec& spec,
                               CostateModel model = CostateModel::standard);

// Two-point boundary residual for the free-endpoint problem: the state
// at t0 must match the scenario's initial conditions and the costate at
// tf must vanish.  Length is 2*spec.state_size().
Vec boundary_residual(const Vec& aug_initial, const Vec& aug_final,
                      const ScenarioSpec& spec);

}  // namespace herdopt
