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
#include <utility>

#include "herdopt/matrix.hpp"
#include "herdopt/pmp.hpp"
#include "herdopt/scenario.hpp"
#include "herdopt/trajectory.hpp"

namespace herdopt {

// Autonomous right-hand side and its Jacobian.
using OdeFn = std::function<Vec(const Vec&)>;
using OdeJacFn = std::function<DenseMatrix(const Vec&)>;

// Time nodes with one value vector per node.  Nodes must be strictly
// increasing and there must be at least three of them.
struct Mesh {
  Vec nodes;
  std::vector<Vec> values;

  std::size_t size() const { return nodes.size(); }
};

// Separated two-point boundary conditions: `left` constrains the value at
// the first node, `right` the value at the last one, and the two residual
// lengths must sum to the system dimension.  Keeping the two ends apart
// is what makes the collocation Jacobian banded.
struct BoundaryConditions {
  std::function<Vec(const Vec&)> left;
  std::function<Vec(const Vec&)> right;
  std::function<DenseMatrix(const Vec&)> left_jacobian;
  std::function<DenseMatrix(const Vec&)> right_jacobian;
  std::size_t left_count = 0;
  std::size_t right_count = 0;
};

struct BvpOptions {
  double residual_tol = 1e-3;
  int max_nodes = 5000;
  int max_newton_iter = 20;
  int max_restarts = 30;
};

enum class BvpStatus { converged, max_nodes_exceeded, newton_failed };

struct CollocationResult {
  Mesh mesh;
  SolverReport report;
  BvpStatus status = BvpStatus::newton_failed;
};

// Residual of the cubic Hermite collocation system on the given mesh:
// for every interval the interpolant's defect at the midpoint, followed
// by the left and right boundary residuals.  Length is
// (mesh.size()) * dim(system): one block per interval plus the two
// boundary blocks.
Vec collocation_residual(const Mesh& mesh, const OdeFn& ode,
                         const BoundaryConditions& bc);

// Damped-Newton collocation solve with residual-driven mesh refinement.
// Each round solves the collocation equations on the current mesh, then
// estimates the normalized defect per interval at the quarter points and
// bisects every interval whose estimate exceeds residual_tol.  Growth
// past max_nodes is a soft failure: the best mesh so far is returned
// with status max_nodes_exceeded.  A Newton iteration that produces
// non-finite residuals, blows up, or hits a singular Jacobian is a hard
// failure (status newton_failed).
CollocationResult solve_collocation(const OdeFn& ode, const OdeJacFn& jac,
                                    const BoundaryConditions& bc, Mesh initial,
                                    const BvpOptions& opts = {});

// Cubic Hermite interpolation over a mesh; computes and keeps the node
// derivatives once so repeated sampling is cheap.
class MeshInterpolant {
 public:
  MeshInterpolant(const Mesh& mesh, const OdeFn& ode);

  Vec at(double t) const;

 private:
  const Mesh& mesh_;
  std::vector<Vec> derivs_;
};

// Interpolates mesh values onto new node times.
Mesh resample_mesh(const Mesh& mesh, const OdeFn& ode, const Vec& new_nodes);

// Largest raw midpoint defect across intervals (max norm).  This is the
// quantity the Newton stage drives to zero; on a converged mesh it is
// orders of magnitude below residual_tol.
double max_defect(const Mesh& mesh, const OdeFn& ode);

// Solves the two-point boundary value problem of the herding scenario's
// stationarity system: initial state pinned, terminal costate free.  On
// mesh exhaustion the current solution is interpolated back onto the
// guess's node times and the solve restarts, up to max_restarts times.
// The returned report carries converged, restarts_used (solve attempts),
// accumulated newton_iterations, the last residual estimate and the
// trajectory cost.  Non-convergence is reported, not thrown.
std::pair<Trajectory, SolverReport> solve_with_restarts(
    const ScenarioSpec& spec, Mesh guess, const BvpOptions& opts = {},
    CostateModel model = CostateModel::standard);

// Splits a mesh of augmented vectors into a trajectory with states,
// costates and the maximizing controls at each node.
Trajectory mesh_to_trajectory(const Mesh& mesh, const ScenarioSpec& spec);

}  // namespace herdopt
