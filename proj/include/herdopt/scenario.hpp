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
#include <vector>

#include "herdopt/matrix.hpp"

namespace herdopt {

// Whether the dog position penalty pulls toward the origin (beta*|d|^2)
// or toward the unit circle (beta/2*(|d|^2 - 1)^2).
enum class DogCostMode { origin, ring };

// Index helpers for the packed state vector.  Layout: for each dog j,
// [position, velocity]; then for each sheep i, [position, velocity].
// Every block has `dim` components.
struct StateLayout {
  int dim = 2;
  int dogs = 0;
  int sheep = 0;

  int dog_pos(int j) const { return 2 * dim * j; }
  int dog_vel(int j) const { return 2 * dim * j + dim; }
  int sheep_pos(int i) const { return 2 * dim * (dogs + i); }
  int sheep_vel(int i) const { return 2 * dim * (dogs + i) + dim; }
  int state_size() const { return 2 * dim * (dogs + sheep); }
  int control_size() const { return dim * dogs; }
};

// A complete problem instance: counts, physics constants, cost weights,
// horizon and initial conditions.
struct ScenarioSpec {
  int dog_count = 1;
  int sheep_count = 0;
  int dim = 2;

  double tf = 2.0;
  double lambda = 3.0;    // repulsion decay exponent
  double epsilon = 0.1;   // repulsion smoothing
  double alpha = 1.0;     // sheep position weight
  double beta = 0.02;     // dog position weight
  DogCostMode dog_cost_mode = DogCostMode::origin;

  std::vector<Vec> dog_positions;
  std::vector<Vec> dog_velocities;
  std::vector<Vec> sheep_positions;
  std::vector<Vec> sheep_velocities;

  std::uint64_t seed = 0;

  StateLayout layout() const { return {dim, dog_count, sheep_count}; }
  int state_size() const { return layout().state_size(); }
  int control_size() const { return layout().control_size(); }
  int augmented_size() const { return 2 * state_size(); }

  // Packs the initial conditions in state layout order.
  Vec initial_state() const;

  // Throws ValidationError when counts, dimensions or constants are
  // structurally wrong (e.g. epsilon <= 0, position lists not matching
  // the declared counts).
  void validate() const;
};

}  // namespace herdopt
