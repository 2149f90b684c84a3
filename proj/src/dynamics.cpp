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

#include "herdopt/dynamics.hpp"

#include <cmath>

#include "herdopt/errors.hpp"

namespace herdopt {

Vec sheep_accel(const Vec& sheep_pos, const std::vector<Vec>& dog_positions,
                double epsilon, double lambda) {
  const std::size_t dim = sheep_pos.size();
  Vec acc(dim, 0.0);
  for (const Vec& d : dog_positions) {
    double w = epsilon;
    for (std::size_t k = 0; k < dim; ++k) {
      const double diff = sheep_pos[k] - d[k];
      w += diff * diff;
    }
    const double scale = std::pow(w, -0.5 * lambda);
    for (std::size_t k = 0; k < dim; ++k)
      acc[k] += scale * (sheep_pos[k] - d[k]);
  }
  return acc;
}

DenseMatrix interaction_jacobian(const Vec& x, double epsilon, double lambda) {
  const std::size_t dim = x.size();
  double w = epsilon;
  for (double v : x) w += v * v;
  const double a = std::pow(w, -0.5 * lambda);
  const double b = lambda * a / w;
  DenseMatrix j(dim, dim);
  for (std::size_t r = 0; r < dim; ++r) {
    j(r, r) = a - b * x[r] * x[r];
    // One product per pair keeps the matrix symmetric to the last bit.
    for (std::size_t c = r + 1; c < dim; ++c) {
      const double v = -b * x[r] * x[c];
      j(r, c) = v;
      j(c, r) = v;
    }
  }
  return j;
}

DenseMatrix interaction_jacobian_derivative(const Vec& x, const Vec& q,
                                            double epsilon, double lambda) {
  const std::size_t dim = x.size();
  double w = epsilon;
  for (double v : x) w += v * v;
  const double c1 = lambda * std::pow(w, -0.5 * lambda - 1.0);
  const double c2 = lambda * (lambda + 2.0) * std::pow(w, -0.5 * lambda - 2.0);
  double xq = 0.0;
  for (std::size_t k = 0; k < dim; ++k) xq += x[k] * q[k];

  DenseMatrix t(dim, dim);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c)
      t(r, c) = -c1 * (q[r] * x[c] + x[r] * q[c]) + c2 * xq * x[r] * x[c];
    t(r, r) -= c1 * xq;
  }
  return t;
}

Vec state_deriv(const Vec& state, const Vec& controls,
                const ScenarioSpec& spec) {
  const StateLayout lay = spec.layout();
  const int dim = lay.dim;
  Vec dx(lay.state_size(), 0.0);

  for (int j = 0; j < lay.dogs; ++j)
    for (int k = 0; k < dim; ++k) {
      dx[lay.dog_pos(j) + k] = state[lay.dog_vel(j) + k];
      dx[lay.dog_vel(j) + k] = controls[j * dim + k];
    }

  for (int i = 0; i < lay.sheep; ++i) {
    for (int k = 0; k < dim; ++k)
      dx[lay.sheep_pos(i) + k] = state[lay.sheep_vel(i) + k];
    for (int j = 0; j < lay.dogs; ++j) {
      double w = spec.epsilon;
      for (int k = 0; k < dim; ++k) {
        const double diff =
            state[lay.sheep_pos(i) + k] - state[lay.dog_pos(j) + k];
        w += diff * diff;
      }
      const double scale = std::pow(w, -0.5 * spec.lambda);
      for (int k = 0; k < dim; ++k)
        dx[lay.sheep_vel(i) + k] +=
            scale *
            (state[lay.sheep_pos(i) + k] - state[lay.dog_pos(j) + k]);
    }
  }
  return dx;
}

DenseMatrix dynamics_jacobian(const Vec& state, const ScenarioSpec& spec) {
  const StateLayout lay = spec.layout();
  const int dim = lay.dim;
  DenseMatrix j(lay.state_size(), lay.state_size());

  for (int d = 0; d < lay.dogs; ++d)
    for (int k = 0; k < dim; ++k)
      j(lay.dog_pos(d) + k, lay.dog_vel(d) + k) = 1.0;

  for (int i = 0; i < lay.sheep; ++i) {
    for (int k = 0; k < dim; ++k)
      j(lay.sheep_pos(i) + k, lay.sheep_vel(i) + k) = 1.0;
    Vec diff(dim);
    for (int d = 0; d < lay.dogs; ++d) {
      for (int k = 0; k < dim; ++k)
        diff[k] = state[lay.sheep_pos(i) + k] - state[lay.dog_pos(d) + k];
      const DenseMatrix block =
          interaction_jacobian(diff, spec.epsilon, spec.lambda);
      j.add_block(lay.sheep_vel(i), lay.sheep_pos(i), block, 1.0);
      j.add_block(lay.sheep_vel(i), lay.dog_pos(d), block, -1.0);
    }
  }
  return j;
}

DenseMatrix control_jacobian(const ScenarioSpec& spec) {
  const StateLayout lay = spec.layout();
  DenseMatrix b(lay.state_size(), lay.control_size());
  for (int j = 0; j < lay.dogs; ++j)
    for (int k = 0; k < lay.dim; ++k)
      b(lay.dog_vel(j) + k, j * lay.dim + k) = 1.0;
  return b;
}

double running_cost(const Vec& state, const Vec& controls,
                    const ScenarioSpec& spec) {
  const StateLayout lay = spec.layout();
  const int dim = lay.dim;
  double cost = 0.0;
  for (int i = 0; i < lay.sheep; ++i) {
    double s2 = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double v = state[lay.sheep_pos(i) + k];
      s2 += v * v;
    }
    cost += spec.alpha * s2;
  }
  for (int j = 0; j < lay.dogs; ++j) {
    double d2 = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double v = state[lay.dog_pos(j) + k];
      d2 += v * v;
    }
    if (spec.dog_cost_mode == DogCostMode::ring)
      cost += 0.5 * spec.beta * (d2 - 1.0) * (d2 - 1.0);
    else
      cost += spec.beta * d2;
  }
  for (double u : controls) cost += u * u;
  return cost;
}

double trajectory_cost(const Trajectory& traj, const ScenarioSpec& spec) {
  if (!traj.has_controls())
    throw MissingControlsError("trajectory has no control samples");
  const std::size_t nu = static_cast<std::size_t>(spec.control_size());
  for (const Vec& u : traj.controls)
    if (u.size() != nu)
      throw MissingControlsError("control sample width mismatch");

  double total = 0.0;
  double prev = running_cost(traj.states[0], traj.controls[0], spec);
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double cur = running_cost(traj.states[k], traj.controls[k], spec);
    total += 0.5 * (traj.times[k] - traj.times[k - 1]) * (prev + cur);
    prev = cur;
  }
  return total;
}

}  // namespace herdopt
