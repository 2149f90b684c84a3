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

#include <string>
#include <vector>

#include "herdopt/matrix.hpp"
#include "herdopt/scenario.hpp"

namespace herdopt {

// Time-sampled solution.  States are always present; controls and
// costates are filled by solvers that have them (the LQR path has no
// costates, imported CSV files have no costates either).
struct Trajectory {
  Vec times;
  std::vector<Vec> states;
  std::vector<Vec> controls;
  std::vector<Vec> costates;

  std::size_t size() const { return times.size(); }
  bool has_controls() const {
    return !controls.empty() && controls.size() == times.size();
  }
};

// Summary every solver returns alongside its trajectory.
struct SolverReport {
  bool converged = false;
  int restarts_used = 0;
  int newton_iterations = 0;
  double max_rms_residual = 0.0;
  double final_cost = 0.0;
  std::string failure_reason;
};

// Trapezoid quadrature of the running cost along the trajectory.  Throws
// MissingControlsError when control samples are absent or misshapen.
double trajectory_cost(const Trajectory& traj, const ScenarioSpec& spec);

}  // namespace herdopt
