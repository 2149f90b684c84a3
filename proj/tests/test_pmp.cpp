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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "herdopt/dynamics.hpp"
#include "herdopt/ode.hpp"
#include "herdopt/pmp.hpp"
#include "herdopt/rootfind.hpp"
#include "support/oracles.hpp"

using namespace herdopt;

namespace {

ScenarioSpec make_spec(int dogs, int sheep, int dim = 2) {
  ScenarioSpec spec;
  spec.dog_count = dogs;
  spec.sheep_count = sheep;
  spec.dim = dim;
  spec.dog_positions.assign(dogs, Vec(dim, 0.0));
  spec.dog_velocities.assign(dogs, Vec(dim, 0.0));
  spec.sheep_positions.assign(sheep, Vec(dim, 0.0));
  spec.sheep_velocities.assign(sheep, Vec(dim, 0.0));
  return spec;
}

// Costate half starts after the packed state; its layout mirrors the
// state layout slot for slot.
int costate_base(const ScenarioSpec& spec) { return spec.state_size(); }

}  // namespace

TEST_CASE("optimal_control is half the dog velocity costate") {
  ScenarioSpec spec = make_spec(1, 1);
  const StateLayout lay = spec.layout();
  Vec aug(spec.augmented_size(), 0.0);
  aug[costate_base(spec) + lay.dog_vel(0) + 0] = 2.0;
  aug[costate_base(spec) + lay.dog_vel(0) + 1] = 4.0;

  Vec u = optimal_control(aug, spec);
  REQUIRE(u.size() == 2);
  CHECK(u[0] == 1.0);
  CHECK(u[1] == 2.0);

  // Zero costates give zero control; the law is linear.
  Vec zero(spec.augmented_size(), 0.0);
  CHECK(norm_inf(optimal_control(zero, spec)) == 0.0);
  for (double& c : aug) c *= 2.0;
  Vec u2 = optimal_control(aug, spec);
  CHECK(u2[0] == 2.0 * u[0]);
  CHECK(u2[1] == 2.0 * u[1]);
}

TEST_CASE("hamiltonian vanishes at the rest configuration") {
  ScenarioSpec spec = make_spec(1, 1);
  Vec aug(spec.augmented_size(), 0.0);
  Vec u(spec.control_size(), 0.0);
  CHECK(hamiltonian(aug, u, spec) == 0.0);
}

TEST_CASE("hamiltonian picks up the sheep position cost with a minus sign") {
  ScenarioSpec spec = make_spec(1, 1);
  spec.alpha = 30.0;
  spec.beta = 0.0;
  const StateLayout lay = spec.layout();
  Vec aug(spec.augmented_size(), 0.0);
  // Dog parked at the origin with zero costates: the kernel term has no
  // q_s to couple to and the beta term sees a zero radius.
  aug[lay.sheep_pos(0) + 0] = 1.0;
  Vec u(spec.control_size(), 0.0);
  CHECK(hamiltonian(aug, u, spec) == doctest::Approx(-30.0).epsilon(1e-9));
}

TEST_CASE("hamiltonian is stationary at the optimal control") {
  std::mt19937_64 gen(77);
  ScenarioSpec spec = make_spec(2, 1);
  for (int trial = 0; trial < 10; ++trial) {
    Vec aug = testing::random_vec(gen, spec.augmented_size(), 1.5);
    Vec u_star = optimal_control(aug, spec);
    auto h_of_u = [&](const Vec& u) { return Vec{hamiltonian(aug, u, spec)}; };
    DenseMatrix grad = finite_difference_jacobian(h_of_u, u_star, 1e-6);
    for (std::size_t c = 0; c < grad.cols(); ++c)
      CHECK(std::fabs(grad(0, c)) <= 1e-6);

    // Concave in u: any other control scores lower.
    Vec worse = u_star;
    worse[0] += 0.7;
    CHECK(hamiltonian(aug, worse, spec) < hamiltonian(aug, u_star, spec));
  }
}

TEST_CASE("zero costates stay zero when position costs are off") {
  ScenarioSpec spec = make_spec(2, 1);
  spec.alpha = 0.0;
  spec.beta = 0.0;
  std::mt19937_64 gen(13);
  Vec aug(spec.augmented_size(), 0.0);
  Vec state = testing::random_vec(gen, spec.state_size(), 2.0);
  for (int i = 0; i < spec.state_size(); ++i) aug[i] = state[i];

  Vec dz = augmented_deriv(aug, spec);
  for (int i = spec.state_size(); i < spec.augmented_size(); ++i)
    CHECK(dz[i] == 0.0);

  // ... and the state rows reduce to the uncontrolled dynamics.
  Vec free = state_deriv(state, Vec(spec.control_size(), 0.0), spec);
  for (int i = 0; i < spec.state_size(); ++i)
    CHECK(dz[i] == doctest::Approx(free[i]));
}

TEST_CASE("dog costates decouple without sheep") {
  ScenarioSpec spec = make_spec(1, 0);
  spec.beta = 0.25;
  const StateLayout lay = spec.layout();
  const int base = costate_base(spec);
  Vec aug(spec.augmented_size(), 0.0);
  aug[lay.dog_pos(0) + 0] = 3.0;
  aug[base + lay.dog_pos(0) + 0] = 0.5;  // p_d
  aug[base + lay.dog_vel(0) + 1] = -2.0;

  Vec dz = augmented_deriv(aug, spec);
  CHECK(dz[base + lay.dog_pos(0) + 0] == doctest::Approx(2.0 * 0.25 * 3.0));
  CHECK(dz[base + lay.dog_pos(0) + 1] == 0.0);
  CHECK(dz[base + lay.dog_vel(0) + 0] == doctest::Approx(-0.5));
  CHECK(dz[base + lay.dog_vel(0) + 1] == 0.0);
}

TEST_CASE("state rows of augmented_deriv agree with state_deriv") {
  std::mt19937_64 gen(29);
  ScenarioSpec spec = make_spec(2, 1);
  for (int trial = 0; trial < 10; ++trial) {
    Vec aug = testing::random_vec(gen, spec.augmented_size(), 1.5);
    Vec dz = augmented_deriv(aug, spec);
    Vec state(aug.begin(), aug.begin() + spec.state_size());
    Vec expected = state_deriv(state, optimal_control(aug, spec), spec);
    for (int i = 0; i < spec.state_size(); ++i)
      CHECK(dz[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }
}

TEST_CASE("augmented_jacobian matches finite differences") {
  std::mt19937_64 gen(57);
  for (CostateModel model :
       {CostateModel::standard, CostateModel::damped_velocity}) {
    for (int dim : {2, 3}) {
      ScenarioSpec spec = make_spec(2, 1, dim);
      for (int trial = 0; trial < 12; ++trial) {
        Vec aug = testing::random_vec(gen, spec.augmented_size(), 1.5);
        auto f = [&](const Vec& z) { return augmented_deriv(z, spec, model); };
        DenseMatrix fd = finite_difference_jacobian(f, aug, 1e-5);
        DenseMatrix exact = augmented_jacobian(aug, spec, model);
        CHECK(max_relative_difference(fd, exact) < 1e-5);
      }
    }
  }
}

TEST_CASE("costate model toggle changes only the sheep velocity rows") {
  ScenarioSpec spec = make_spec(1, 1);
  std::mt19937_64 gen(71);
  const StateLayout lay = spec.layout();
  const int base = costate_base(spec);
  Vec aug = testing::random_vec(gen, spec.augmented_size(), 1.0);

  Vec standard = augmented_deriv(aug, spec, CostateModel::standard);
  Vec damped = augmented_deriv(aug, spec, CostateModel::damped_velocity);
  for (int k = 0; k < 2; ++k) {
    CHECK(standard[base + lay.sheep_vel(0) + k] ==
          doctest::Approx(-aug[base + lay.sheep_pos(0) + k]));
    CHECK(damped[base + lay.sheep_vel(0) + k] ==
          doctest::Approx(-aug[base + lay.sheep_vel(0) + k]));
  }
  for (int i = 0; i < spec.augmented_size(); ++i) {
    if (i >= base + lay.sheep_vel(0) && i < base + lay.sheep_vel(0) + 2)
      continue;
    CHECK(standard[i] == damped[i]);
  }
}

TEST_CASE("hamiltonian is conserved along integrated extremals") {
  ScenarioSpec spec = make_spec(1, 1);
  spec.alpha = 1.0;
  spec.beta = 0.02;
  const StateLayout lay = spec.layout();
  Vec aug(spec.augmented_size(), 0.0);
  aug[lay.dog_pos(0) + 0] = 2.0;
  aug[lay.sheep_pos(0) + 0] = 0.8;
  aug[lay.sheep_pos(0) + 1] = 0.3;
  // Small nonzero costates so the control is active.
  const int base = costate_base(spec);
  aug[base + lay.dog_vel(0) + 0] = 0.2;
  aug[base + lay.dog_vel(0) + 1] = -0.1;
  aug[base + lay.sheep_pos(0) + 0] = 0.05;

  const double rtol = 1e-10;
  auto f = [&](double, const Vec& z) { return augmented_deriv(z, spec); };
  OdePath path = integrate_adaptive(f, aug, 0.0, 2.0, rtol, 1e-12);

  const double h0 = hamiltonian(aug, optimal_control(aug, spec), spec);
  double worst = 0.0;
  for (const Vec& z : path.values) {
    const double h = hamiltonian(z, optimal_control(z, spec), spec);
    worst = std::max(worst, std::fabs(h - h0));
  }
  CHECK(worst <= 1e-6 * (1.0 + std::fabs(h0)));
}

TEST_CASE("boundary_residual pins the initial state and final costate") {
  ScenarioSpec spec = make_spec(2, 1);
  spec.dog_positions = {{2.0, 0.0}, {-1.0, 1.0}};
  spec.sheep_positions = {{1.0, 0.0}};

  Vec aug0(spec.augmented_size(), 0.0);
  Vec init = spec.initial_state();
  for (int i = 0; i < spec.state_size(); ++i) aug0[i] = init[i];
  // Final state arbitrary, final costate zero.
  Vec augf(spec.augmented_size(), 0.0);
  for (int i = 0; i < spec.state_size(); ++i) augf[i] = 0.1 * i;

  Vec res = boundary_residual(aug0, augf, spec);
  REQUIRE(res.size() == std::size_t(spec.augmented_size()));
  CHECK(norm_inf(res) == 0.0);

  // A single perturbed initial coordinate shows up in exactly one entry.
  aug0[spec.layout().dog_pos(1) + 1] += 0.125;
  res = boundary_residual(aug0, augf, spec);
  int nonzero = 0;
  for (double r : res)
    if (r != 0.0) ++nonzero;
  CHECK(nonzero == 1);
  CHECK(norm_inf(res) == doctest::Approx(0.125));

  // Nonzero terminal costate lands in the trailing block.
  aug0[spec.layout().dog_pos(1) + 1] -= 0.125;
  augf[costate_base(spec) + 3] = -0.5;
  res = boundary_residual(aug0, augf, spec);
  CHECK(res[spec.state_size() + 3] == doctest::Approx(-0.5));
}
