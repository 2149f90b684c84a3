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

#include "herdopt/matrix.hpp"

namespace herdopt {

using ResidualFn = std::function<Vec(const Vec&)>;
using JacobianFn = std::function<DenseMatrix(const Vec&)>;

struct NewtonResult {
  Vec root;
  bool converged = false;
  int iterations = 0;
};

// Damped Newton iteration on residual(x) = 0.  Each step solves
// J(x) dx = -R(x) and backtracks the step length through up to eight
// halvings until the max-norm of the residual decreases.  If no halving
// helps, the full step is taken anyway and counted as a stall; three
// stalls in a row abort the iteration with converged = false.  A point
// already satisfying |R|_inf <= tol returns immediately with zero
// iterations.  SingularMatrixError from the linear solve propagates.
NewtonResult newton_damped(const ResidualFn& residual,
                           const JacobianFn& jacobian, Vec x0, int max_iter,
                           double tol);

// Central-difference Jacobian of fn at x with stencil half-width h per
// coordinate.  Used to audit hand-written derivatives; costs 2*dim(x)
// evaluations.
DenseMatrix finite_difference_jacobian(const ResidualFn& fn, const Vec& x,
                                       double h = 1e-5);

// Largest entrywise difference between a and b scaled by
// max(1, |a_ij|, |b_ij|).
double max_relative_difference(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace herdopt
