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

#include <optional>
#include <utility>

#include "herdopt/matrix.hpp"
#include "herdopt/scenario.hpp"
#include "herdopt/trajectory.hpp"

namespace herdopt {

// Diagonal weights of the regulator's quadratic cost, plus the smoothing
// constant used when linearizing the interaction for the regulator.  The
// defaults are the tuned values used throughout: they are deliberately
// not the same thing as the scenario's alpha/beta cost.
struct LqrWeights {
  double control_effort = 10.0;
  double sheep_pos = 10.0;
  double sheep_vel = 1.0;
  double dog_vel = 0.1;
  double dog_pos = 0.2;
  double epsilon = 0.1;
};

struct CareOptions {
  double residual_tol = 1e-9;  // relative to 1 + |Q|_max
  int max_refine_iter = 25;
  double q_regularization = 1e-8;  // added to Q's diagonal for state solves
};

// Matrix sign function by the scaled Newton iteration
//   Z <- (Z/c + c Z^{-1}) / 2,  c = |det Z|^(1/n).
// Throws NoStabilizingSolutionError when the iteration does not settle
// on an involutory matrix (eigenvalues on the imaginary axis).
DenseMatrix matrix_sign(DenseMatrix z, int max_iter = 100);

// Solves A^T X + X A + C = 0 for Hurwitz A via the sign iteration run on
// the block form; throws NoStabilizingSolutionError when A is not
// stable enough for the iteration to converge.
DenseMatrix solve_lyapunov(const DenseMatrix& a, const DenseMatrix& c);

// Stabilizing solution of A^T P + P A - P B R^{-1} B^T P + Q = 0.  The
// stable invariant subspace of the Hamiltonian matrix is extracted with
// the sign function, then the solution is polished by Newton-Kleinman
// steps until |residual|_max <= residual_tol * (1 + |Q|_max).  Q is used
// exactly as passed; opts.q_regularization is a knob for the callers
// below, not applied here.  Throws NoStabilizingSolutionError when the
// subspace has the wrong dimension, the residual contract cannot be met,
// or P fails its symmetry/positivity sanity checks.
DenseMatrix solve_care(const DenseMatrix& a, const DenseMatrix& b,
                       const DenseMatrix& q, const DenseMatrix& r,
                       const CareOptions& opts = {});

// K = R^{-1} B^T P.
DenseMatrix lqr_gain(const DenseMatrix& p, const DenseMatrix& b,
                     const DenseMatrix& r);

// Diagonal state and control weight matrices in state layout order, with
// q_regularization added across Q's diagonal.
std::pair<DenseMatrix, DenseMatrix> weight_matrices(
    const ScenarioSpec& spec, const LqrWeights& weights,
    double q_regularization = 0.0);

// Linear model used by the regulator.  The dog-sheep force is the
// relative offset scaled by 1/(|s-d|^2 + eps)^(lambda/2); freezing that
// scalar at the current state gives a matrix with A(x)*x =
// state_deriv(x, 0) exactly.  The differential Jacobian satisfies no
// such identity: the force decays with range, so its radial slope turns
// negative for |s-d|^2 > eps/(lambda-1) and gains built from it steer
// the sheep away from the pen instead of toward it.
DenseMatrix regulator_linearization(const Vec& state,
                                    const ScenarioSpec& spec);

// Carries the last successful gain between closed-loop evaluations so a
// failed Riccati solve degrades to the cached feedback instead of
// aborting the simulation.
struct ControllerCache {
  std::optional<DenseMatrix> gain;
  int care_solves = 0;
  int care_failures = 0;
};

// One evaluation of the closed loop at `state`: build the regulator
// linearization there, solve the Riccati equation, apply u = -K x, and
// return the plant derivative together with u.  The weight table's
// epsilon replaces the scenario's smoothing for the whole evaluation,
// plant included.  On a failed Riccati solve the cached gain is reused;
// if there is none to fall back on, ControllerStalledError is thrown.
std::pair<Vec, Vec> closed_loop_deriv(const Vec& state,
                                      const ScenarioSpec& spec,
                                      const LqrWeights& weights,
                                      ControllerCache& cache,
                                      const CareOptions& opts = {});

// Integrates the closed loop over the scenario horizon, re-solving the
// Riccati equation at every evaluation point.  The report's final_cost
// is the scenario running cost of the simulated trajectory.  A non-null
// cache exposes solve/failure counts to the caller.
std::pair<Trajectory, SolverReport> simulate_lqr(
    const ScenarioSpec& spec, const LqrWeights& weights, double rtol = 1e-6,
    ControllerCache* cache = nullptr, const CareOptions& opts = {});

}  // namespace herdopt
