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

#include "herdopt/pmp.hpp"

#include <cmath>

#include "herdopt/dynamics.hpp"
#include "herdopt/errors.hpp"

namespace herdopt {

namespace {

// Offsets of the costate blocks inside the augmented vector mirror the
// state layout shifted by state_size().
struct AugLayout {
  StateLayout lay;
  int ns;

  explicit AugLayout(const ScenarioSpec& spec)
      : lay(spec.layout()), ns(lay.state_size()) {}

  int p_dog(int j) const { return ns + lay.dog_pos(j); }
  int q_dog(int j) const { return ns + lay.dog_vel(j); }
  int p_sheep(int i) const { return ns + lay.sheep_pos(i); }
  int q_sheep(int i) const { return ns + lay.sheep_vel(i); }
};

}  // namespace

Vec optimal_control(const Vec& aug, const ScenarioSpec& spec) {
  const AugLayout a(spec);
  Vec u(a.lay.control_size());
  for (int j = 0; j < a.lay.dogs; ++j)
    for (int k = 0; k < a.lay.dim; ++k)
      u[j * a.lay.dim + k] = 0.5 * aug[a.q_dog(j) + k];
  return u;
}

double hamiltonian(const Vec& aug, const Vec& controls,
                   const ScenarioSpec& spec) {
  const AugLayout a(spec);
  const int dim = a.lay.dim;
  double h = 0.0;

  for (int j = 0; j < a.lay.dogs; ++j) {
    double d2 = 0.0;
    for (int k = 0; k < dim; ++k) {
      h += aug[a.p_dog(j) + k] * aug[a.lay.dog_vel(j) + k];
      h += aug[a.q_dog(j) + k] * controls[j * dim + k];
      const double dk = aug[a.lay.dog_pos(j) + k];
      d2 += dk * dk;
    }
    if (spec.dog_cost_mode == DogCostMode::ring)
      h -= 0.5 * spec.beta * (d2 - 1.0) * (d2 - 1.0);
    else
      h -= spec.beta * d2;
  }

  for (int i = 0; i < a.lay.sheep; ++i) {
    Vec spos(dim);
    for (int k = 0; k < dim; ++k) spos[k] = aug[a.lay.sheep_pos(i) + k];
    double s2 = 0.0;
    for (int k = 0; k < dim; ++k) {
      h += aug[a.p_sheep(i) + k] * aug[a.lay.sheep_vel(i) + k];
      s2 += spos[k] * spos[k];
    }
    h -= spec.alpha * s2;
    for (int j = 0; j < a.lay.dogs; ++j) {
      double w = spec.epsilon;
      for (int k = 0; k < dim; ++k) {
        const double diff = spos[k] - aug[a.lay.dog_pos(j) + k];
        w += diff * diff;
      }
      const double scale = std::pow(w, -0.5 * spec.lambda);
      for (int k = 0; k < dim; ++k)
        h += aug[a.q_sheep(i) + k] * scale *
             (spos[k] - aug[a.lay.dog_pos(j) + k]);
    }
  }

  for (double u : controls) h -= u * u;
  return h;
}

Vec augmented_deriv(const Vec& aug, const ScenarioSpec& spec,
                    CostateModel model) {
  const AugLayout a(spec);
  const int dim = a.lay.dim;
  Vec dz(2 * a.ns, 0.0);

  // State half, with u = q_d/2 in place of the controls.
  for (int j = 0; j < a.lay.dogs; ++j)
    for (int k = 0; k < dim; ++k) {
      dz[a.lay.dog_pos(j) + k] = aug[a.lay.dog_vel(j) + k];
      dz[a.lay.dog_vel(j) + k] = 0.5 * aug[a.q_dog(j) + k];
    }
  for (int i = 0; i < a.lay.sheep; ++i)
    for (int k = 0; k < dim; ++k)
      dz[a.lay.sheep_pos(i) + k] = aug[a.lay.sheep_vel(i) + k];

  Vec diff(dim), qsi(dim);
  for (int i = 0; i < a.lay.sheep; ++i) {
    for (int k = 0; k < dim; ++k) qsi[k] = aug[a.q_sheep(i) + k];
    for (int j = 0; j < a.lay.dogs; ++j) {
      double w = spec.epsilon;
      for (int k = 0; k < dim; ++k) {
        diff[k] = aug[a.lay.sheep_pos(i) + k] - aug[a.lay.dog_pos(j) + k];
        w += diff[k] * diff[k];
      }
      const double scale = std::pow(w, -0.5 * spec.lambda);
      for (int k = 0; k < dim; ++k)
        dz[a.lay.sheep_vel(i) + k] += scale * diff[k];

      // The interaction Jacobian is even in its displacement, so the
      // same block serves the dog and sheep costate rows.
      const DenseMatrix jphi =
          interaction_jacobian(diff, spec.epsilon, spec.lambda);
      const Vec jq = jphi * qsi;
      for (int k = 0; k < dim; ++k) {
        dz[a.p_dog(j) + k] += jq[k];
        dz[a.p_sheep(i) + k] -= jq[k];
      }
    }
  }

  for (int j = 0; j < a.lay.dogs; ++j) {
    double d2 = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double dk = aug[a.lay.dog_pos(j) + k];
      d2 += dk * dk;
    }
    const double pull = (spec.dog_cost_mode == DogCostMode::ring)
                            ? 2.0 * spec.beta * (d2 - 1.0)
                            : 2.0 * spec.beta;
    for (int k = 0; k < dim; ++k) {
      dz[a.p_dog(j) + k] += pull * aug[a.lay.dog_pos(j) + k];
      dz[a.q_dog(j) + k] = -aug[a.p_dog(j) + k];
    }
  }
  for (int i = 0; i < a.lay.sheep; ++i)
    for (int k = 0; k < dim; ++k) {
      dz[a.p_sheep(i) + k] += 2.0 * spec.alpha * aug[a.lay.sheep_pos(i) + k];
      dz[a.q_sheep(i) + k] = (model == CostateModel::damped_velocity)
                                 ? -aug[a.q_sheep(i) + k]
                                 : -aug[a.p_sheep(i) + k];
    }
  return dz;
}

DenseMatrix augmented_jacobian(const Vec& aug, const ScenarioSpec& spec,
                               CostateModel model) {
  const AugLayout a(spec);
  const int dim = a.lay.dim;
  DenseMatrix j(2 * a.ns, 2 * a.ns);

  for (int d = 0; d < a.lay.dogs; ++d)
    for (int k = 0; k < dim; ++k) {
      j(a.lay.dog_pos(d) + k, a.lay.dog_vel(d) + k) = 1.0;
      j(a.lay.dog_vel(d) + k, a.q_dog(d) + k) = 0.5;
      j(a.q_dog(d) + k, a.p_dog(d) + k) = -1.0;
    }
  for (int i = 0; i < a.lay.sheep; ++i)
    for (int k = 0; k < dim; ++k) {
      j(a.lay.sheep_pos(i) + k, a.lay.sheep_vel(i) + k) = 1.0;
      if (model == CostateModel::damped_velocity)
        j(a.q_sheep(i) + k, a.q_sheep(i) + k) = -1.0;
      else
        j(a.q_sheep(i) + k, a.p_sheep(i) + k) = -1.0;
      j(a.p_sheep(i) + k, a.lay.sheep_pos(i) + k) += 2.0 * spec.alpha;
    }

  for (int d = 0; d < a.lay.dogs; ++d) {
    double d2 = 0.0;
    Vec dpos(dim);
    for (int k = 0; k < dim; ++k) {
      dpos[k] = aug[a.lay.dog_pos(d) + k];
      d2 += dpos[k] * dpos[k];
    }
    if (spec.dog_cost_mode == DogCostMode::ring) {
      for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c)
          j(a.p_dog(d) + r, a.lay.dog_pos(d) + c) +=
              4.0 * spec.beta * dpos[r] * dpos[c];
        j(a.p_dog(d) + r, a.lay.dog_pos(d) + r) +=
            2.0 * spec.beta * (d2 - 1.0);
      }
    } else {
      for (int k = 0; k < dim; ++k)
        j(a.p_dog(d) + k, a.lay.dog_pos(d) + k) += 2.0 * spec.beta;
    }
  }

  Vec diff(dim), qsi(dim);
  for (int i = 0; i < a.lay.sheep; ++i) {
    for (int k = 0; k < dim; ++k) qsi[k] = aug[a.q_sheep(i) + k];
    for (int d = 0; d < a.lay.dogs; ++d) {
      for (int k = 0; k < dim; ++k)
        diff[k] = aug[a.lay.sheep_pos(i) + k] - aug[a.lay.dog_pos(d) + k];
      const DenseMatrix jphi =
          interaction_jacobian(diff, spec.epsilon, spec.lambda);
      // T = d/d(diff) of (jphi * q); odd in diff.
      const DenseMatrix t = interaction_jacobian_derivative(
          diff, qsi, spec.epsilon, spec.lambda);

      // Sheep acceleration rows.
      j.add_block(a.lay.sheep_vel(i), a.lay.sheep_pos(i), jphi, 1.0);
      j.add_block(a.lay.sheep_vel(i), a.lay.dog_pos(d), jphi, -1.0);

      // Dog position costate rows: p_d' += jphi(diff)*q, and the diff
      // seen from the dog side flips sign, hence the signs below.
      j.add_block(a.p_dog(d), a.lay.sheep_pos(i), t, 1.0);
      j.add_block(a.p_dog(d), a.lay.dog_pos(d), t, -1.0);
      j.add_block(a.p_dog(d), a.q_sheep(i), jphi, 1.0);

      // Sheep position costate rows: p_s' -= jphi(diff)*q.
      j.add_block(a.p_sheep(i), a.lay.sheep_pos(i), t, -1.0);
      j.add_block(a.p_sheep(i), a.lay.dog_pos(d), t, 1.0);
      j.add_block(a.p_sheep(i), a.q_sheep(i), jphi, -1.0);
    }
  }
  return j;
}

Vec boundary_residual(const Vec& aug_initial, const Vec& aug_final,
                      const ScenarioSpec& spec) {
  const int ns = spec.state_size();
  const Vec x0 = spec.initial_state();
  Vec res(2 * ns);
  for (int k = 0; k < ns; ++k) res[k] = aug_initial[k] - x0[k];
  for (int k = 0; k < ns; ++k) res[ns + k] = aug_final[ns + k];
  return res;
}

}  // namespace herdopt
