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

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "herdopt/bvp.hpp"
#include "herdopt/scenario.hpp"
#include "herdopt/trajectory.hpp"

namespace herdopt {

// Deterministic random stream.  The mt19937_64 engine is pinned by the
// standard, but the standard distributions are not, so the uniform and
// gaussian transforms are spelled out in this class: the same seed
// produces the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);

  // One Box-Muller draw; consumes two uniforms per call.
  double gaussian(double sigma = 1.0);

  // Uniform direction on the unit sphere scaled to `radius`.
  Vec on_sphere(int dim, double radius);

 private:
  std::mt19937_64 gen_;
};

// Scenario files are JSON.  Required: dog_positions, sheep_positions
// (lists of dim-length lists).  Optional: m, n (validated against the
// lists when present), dim, tf, lambda, epsilon, alpha, beta,
// dog_cost_mode ("origin"|"ring"), seed, dog_velocities and
// sheep_velocities (default all-zero).  Unknown keys are rejected.  A
// missing seed falls back to the HERDOPT_SEED environment variable, then
// to zero.
ScenarioSpec parse_scenario_text(const std::string& text);
ScenarioSpec parse_scenario(const std::string& path);
void write_scenario(const ScenarioSpec& spec, const std::string& path);

enum class VelocityMode { zero, gaussian };

// Scenario with agents placed uniformly on circles (spheres in higher
// dimension) of the given radii and default physics constants.
ScenarioSpec random_scenario(int dogs, int sheep, int dim, double dog_radius,
                             double sheep_radius, VelocityMode mode,
                             double sigma, std::uint64_t seed);

// Initial guesses for the boundary value solver, all on a uniform time
// grid of `nodes` points.

// Constant guess: initial state with zero costates at every node.
Mesh constant_guess(const ScenarioSpec& spec, int nodes);

// Constant state with independent N(0, sigma^2) costate entries.
Mesh noise_guess(const ScenarioSpec& spec, int nodes, double sigma,
                 std::uint64_t seed);

// Structured guess: every dog follows a log-free spiral in the xy-plane
// from its start radius to target_radius while its angle sweeps to the
// nearest m-th root of unity direction; sheep shrink linearly to the
// origin.  Velocity costates are set to twice the curve acceleration so
// the implied control u = q/2 reproduces the curve; position costates
// are zero.  The first node is overwritten with the exact initial
// conditions.  Supports dim 2 and 3 (z decays linearly).
Mesh structured_guess(const ScenarioSpec& spec, double target_radius,
                      int nodes);

// Trajectory CSV: header line, then one row per sample with time, state
// in layout order and controls, all with 17 significant digits.  This
// round-trips bit-exactly through parse_trajectory_csv.
void export_trajectory_csv(const Trajectory& traj, const ScenarioSpec& spec,
                           const std::string& path);
Trajectory parse_trajectory_csv(const std::string& path,
                                const ScenarioSpec& spec);

// Top-down plot of agent paths (first two coordinates), origin marked,
// start and end of each path labeled with circles.
void export_trajectory_svg(const Trajectory& traj, const ScenarioSpec& spec,
                           const std::string& path);

// Command line entry point shared by the installed binary and the tests.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args);

}  // namespace herdopt
