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

#include "herdopt/shooting.hpp"

#include <cmath>
#include <limits>

#include "herdopt/errors.hpp"
#include "herdopt/ode.hpp"
#include "herdopt/rootfind.hpp"

namespace herdopt {

namespace {

constexpr double kDivergenceNorm = 1e8;

struct DivergedSignal {};

Vec concat_state_costate(const Vec& x0, const Vec& costate) {
  Vec aug(x0.size() + costate.size());
  for (std::size_t i = 0; i < x0.size(); ++i) aug[i] = x0[i];
  for (std::size_t i = 0; i < costate.size(); ++i)
    aug[x0.size() + i] = costate[i];
  return aug;
}

}  // namespace

std::pair<Vec, DenseMatrix> integrate_with_sensitivity(
    const Vec& aug0, const ScenarioSpec& spec, double rtol,
    CostateModel model) {
  const std::size_t na = static_cast<std::size_t>(spec.augmented_size());
  const std::size_t ns = static_cast<std::size_t>(spec.state_size());

  // z = [augmented state | M row-major], M is na x ns.
  Vec z0(na + na * ns, 0.0);
  for (std::size_t i = 0; i < na; ++i) z0[i] = aug0[i];
  for (std::size_t c = 0; c < ns; ++c) z0[na + (ns + c) * ns + c] = 1.0;

  const VectorField field = [&spec, model, na, ns](double, const Vec& z) {
    Vec aug(z.begin(), z.begin() + na);
    Vec dz(z.size(), 0.0);
    const Vec da = augmented_deriv(aug, spec, model);
    for (std::size_t i = 0; i < na; ++i) dz[i] = da[i];
    const DenseMatrix j = augmented_jacobian(aug, spec, model);
    for (std::size_t r = 0; r < na; ++r)
      for (std::size_t t = 0; t < na; ++t) {
        const double jrt = j(r, t);
        if (jrt == 0.0) continue;
        for (std::size_t c = 0; c < ns; ++c)
          dz[na + r * ns + c] += jrt * z[na + t * ns + c];
      }
    return dz;
  };

  const OdePath path =
      integrate_adaptive(field, std::move(z0), 0.0, spec.tf, rtol, 1e-12);
  const Vec& zf = path.back();
  Vec augf(zf.begin(), zf.begin() + na);
  DenseMatrix sens(ns, ns);
  for (std::size_t r = 0; r < ns; ++r)
    for (std::size_t c = 0; c < ns; ++c)
      sens(r, c) = zf[na + (ns + r) * ns + c];
  return {std::move(augf), std::move(sens)};
}

ShootResult shoot(const ScenarioSpec& spec, Vec costate_guess, int max_iter,
                  double tol, double rtol, CostateModel model) {
  spec.validate();
  const std::size_t ns = static_cast<std::size_t>(spec.state_size());
  const Vec x0 = spec.initial_state();

  OdePath last_path;
  bool have_path = false;

  const auto residual = [&](const Vec& costate0) -> Vec {
    if (norm_inf(costate0) > kDivergenceNorm) throw DivergedSignal{};
    const Vec aug0 = concat_state_costate(x0, costate0);
    OdePath path;
    try {
      path = integrate_adaptive(
          [&spec, model](double, const Vec& y) {
            return augmented_deriv(y, spec, model);
          },
          aug0, 0.0, spec.tf, rtol, 1e-12);
    } catch (const StepSizeUnderflowError&) {
      throw DivergedSignal{};
    }
    last_path = std::move(path);
    have_path = true;
    const Vec& augf = last_path.back();
    return Vec(augf.begin() + ns, augf.end());
  };

  int jacobian_calls = 0;
  const auto jacobian = [&](const Vec& costate0) -> DenseMatrix {
    ++jacobian_calls;
    const Vec aug0 = concat_state_costate(x0, costate0);
    try {
      return integrate_with_sensitivity(aug0, spec, rtol, model).second;
    } catch (const StepSizeUnderflowError&) {
      throw DivergedSignal{};
    }
  };

  ShootResult result;
  result.initial_costate = costate_guess;
  result.terminal_costate_norm = std::numeric_limits<double>::quiet_NaN();

  try {
    NewtonResult nr = newton_damped(residual, jacobian,
                                    std::move(costate_guess), max_iter, tol);
    result.iterations = nr.iterations;
    const Vec terminal = residual(nr.root);
    result.initial_costate = std::move(nr.root);
    result.terminal_costate_norm = norm_inf(terminal);
    result.converged = nr.converged;
    result.status =
        nr.converged ? ShootStatus::converged : ShootStatus::max_iterations;
  } catch (const DivergedSignal&) {
    result.iterations = jacobian_calls;
    result.converged = false;
    result.status = ShootStatus::diverged;
  }

  if (have_path) {
    Trajectory& traj = result.trajectory;
    traj.times = last_path.times;
    traj.states.reserve(last_path.size());
    traj.costates.reserve(last_path.size());
    traj.controls.reserve(last_path.size());
    for (const Vec& aug : last_path.values) {
      traj.states.emplace_back(aug.begin(), aug.begin() + ns);
      traj.costates.emplace_back(aug.begin() + ns, aug.end());
      traj.controls.push_back(optimal_control(aug, spec));
    }
    if (result.status == ShootStatus::diverged)
      result.terminal_costate_norm = norm_inf(traj.costates.back());
  }
  return result;
}

}  // namespace herdopt
