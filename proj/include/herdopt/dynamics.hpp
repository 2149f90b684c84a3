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
#include "herdopt/trajectory.hpp"

namespace herdopt {

// Repulsion kernel phi(x) = x / (|x|^2 + epsilon)^(lambda/2) summed over
// dogs: the acceleration a sheep at `sheep_pos` feels.
Vec sheep_accel(const Vec& sheep_pos, const std::vector<Vec>& dog_positions,
                double epsilon, double lambda);

// Jacobian of the repulsion kernel phi at displacement x:
//   d phi / d x = w^(-lambda/2) * (I - lambda/w * x x^T),  w = |x|^2 + eps.
// Symmetric, and even in x.
DenseMatrix interaction_jacobian(const Vec& x, double epsilon, double lambda);

// Derivative of interaction_jacobian(x) * q with respect to x, for fixed
// q.  Needed by the adjoint system's Jacobian; symmetric in its result.
DenseMatrix interaction_jacobian_derivative(const Vec& x, const Vec& q,
                                            double epsilon, double lambda);

// Right-hand side of the herd dynamics: dogs are double integrators
// driven by `controls`, sheep accelerate away from every dog through the
// repulsion kernel.
Vec state_deriv(const Vec& state, const Vec& controls,
                const ScenarioSpec& spec);

// d(state_deriv)/d(state) at fixed controls.
DenseMatrix dynamics_jacobian(const Vec& state, const ScenarioSpec& spec);

// d(state_deriv)/d(controls); constant for these dynamics.
DenseMatrix control_jacobian(const ScenarioSpec& spec);

// Instantaneous running cost
//   alpha*sum_i |s_i|^2 + beta*sum_j |d_j|^2 + sum_j |u_j|^2,
// with the beta term replaced by beta/2*(|d_j|^2 - 1)^2 in ring mode.
double running_cost(const Vec& state, const Vec& controls,
                    const ScenarioSpec& spec);

}  // namespace herdopt
