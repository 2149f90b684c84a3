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

#include "herdopt/scenario.hpp"

#include <string>

#include "herdopt/errors.hpp"

namespace herdopt {

namespace {

void check_blocks(const std::vector<Vec>& blocks, std::size_t count, int dim,
                  const char* what) {
  if (blocks.size() != count)
    throw ValidationError(std::string(what) + ": expected " +
                          std::to_string(count) + " entries, got " +
                          std::to_string(blocks.size()));
  for (const Vec& b : blocks)
    if (b.size() != static_cast<std::size_t>(dim))
      throw ValidationError(std::string(what) +
                            ": entry dimension does not match dim");
}

}  // namespace

Vec ScenarioSpec::initial_state() const {
  const StateLayout lay = layout();
  Vec x(lay.state_size(), 0.0);
  for (int j = 0; j < dog_count; ++j)
    for (int k = 0; k < dim; ++k) {
      x[lay.dog_pos(j) + k] = dog_positions[j][k];
      x[lay.dog_vel(j) + k] = dog_velocities[j][k];
    }
  for (int i = 0; i < sheep_count; ++i)
    for (int k = 0; k < dim; ++k) {
      x[lay.sheep_pos(i) + k] = sheep_positions[i][k];
      x[lay.sheep_vel(i) + k] = sheep_velocities[i][k];
    }
  return x;
}

void ScenarioSpec::validate() const {
  if (dog_count < 1) throw ValidationError("dog count must be at least 1");
  if (sheep_count < 0) throw ValidationError("sheep count must be nonnegative");
  if (dim < 1) throw ValidationError("dim must be positive");
  if (!(tf > 0.0)) throw ValidationError("tf must be positive");
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
  if (alpha < 0.0) throw ValidationError("alpha must be nonnegative");
  if (beta < 0.0) throw ValidationError("beta must be nonnegative");
  check_blocks(dog_positions, dog_count, dim, "dog positions");
  check_blocks(dog_velocities, dog_count, dim, "dog velocities");
  check_blocks(sheep_positions, sheep_count, dim, "sheep positions");
  check_blocks(sheep_velocities, sheep_count, dim, "sheep velocities");
}

}  // namespace herdopt
