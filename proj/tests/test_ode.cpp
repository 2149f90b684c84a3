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

#include "doctest.h"
#include "herdopt/errors.hpp"
#include "herdopt/ode.hpp"

using namespace herdopt;

TEST_CASE("zero vector field keeps the state constant") {
  auto f = [](double, const Vec& y) { return Vec(y.size(), 0.0); };
  OdePath path = integrate_adaptive(f, {5.0}, 0.0, 1.0, 1e-8, 1e-10);
  CHECK(path.back()[0] == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(path.times.front() == 0.0);
  CHECK(path.times.back() == 1.0);
}

TEST_CASE("exponential growth reaches e") {
  auto f = [](double, const Vec& y) { return Vec{y[0]}; };
  OdePath path = integrate_adaptive(f, {1.0}, 0.0, 1.0, 1e-8, 1e-10);
  CHECK(std::fabs(path.back()[0] - std::exp(1.0)) < 1e-6);
}

TEST_CASE("harmonic oscillator returns home after a full period") {
  auto f = [](double, const Vec& y) { return Vec{y[1], -y[0]}; };
  const double two_pi = 2.0 * std::acos(-1.0);
  OdePath path = integrate_adaptive(f, {1.0, 0.0}, 0.0, two_pi, 1e-8, 1e-10);
  CHECK(std::fabs(path.back()[0] - 1.0) < 1e-5);
  CHECK(std::fabs(path.back()[1]) < 1e-5);
}

TEST_CASE("harmonic energy drifts no faster than the tolerance") {
  auto f = [](double, const Vec& y) { return Vec{y[1], -y[0]}; };
  const double rtol = 1e-8;
  const double ten_periods = 20.0 * std::acos(-1.0);
  OdePath path = integrate_adaptive(f, {1.0, 0.0}, 0.0, ten_periods, rtol,
                                    1e-12);
  double worst = 0.0;
  for (const Vec& y : path.values) {
    const double energy = y[0] * y[0] + y[1] * y[1];
    worst = std::max(worst, std::fabs(energy - 1.0));
  }
  CHECK(worst <= 10.0 * rtol * ten_periods);
}

TEST_CASE("finite-time blow-up underflows the step size") {
  // y' = y^2 from y(0)=1 escapes at t=1; no step size survives that.
  auto f = [](double, const Vec& y) { return Vec{y[0] * y[0]}; };
  CHECK_THROWS_AS(integrate_adaptive(f, {1.0}, 0.0, 2.0, 1e-8, 1e-10),
                  StepSizeUnderflowError);
}

TEST_CASE("observer sees the initial point and every accepted step") {
  auto f = [](double, const Vec& y) { return Vec{y[1], -y[0]}; };
  Vec seen_times;
  auto observer = [&](double t, const Vec& y, const Vec& dy) {
    REQUIRE(y.size() == 2);
    REQUIRE(dy.size() == 2);
    CHECK(dy[0] == doctest::Approx(y[1]));
    seen_times.push_back(t);
  };
  OdePath path = integrate_adaptive(f, {1.0, 0.0}, 0.0, 3.0, 1e-6, 1e-9,
                                    observer);
  REQUIRE(seen_times.size() == path.times.size());
  CHECK(seen_times.front() == 0.0);
  CHECK(seen_times.back() == 3.0);
  for (std::size_t i = 0; i + 1 < seen_times.size(); ++i)
    CHECK(seen_times[i] < seen_times[i + 1]);
}

TEST_CASE("dense output interpolates between accepted steps") {
  auto f = [](double, const Vec& y) { return Vec{y[1], -y[0]}; };
  OdePath path = integrate_adaptive(f, {1.0, 0.0}, 0.0, 6.0, 1e-9, 1e-12);
  for (double t = 0.1; t < 6.0; t += 0.37) {
    Vec y = path_sample(path, t);
    CHECK(std::fabs(y[0] - std::cos(t)) < 1e-6);
    CHECK(std::fabs(y[1] + std::sin(t)) < 1e-6);
  }
  // Clamped outside the integration window.
  CHECK(path_sample(path, -1.0)[0] == path.values.front()[0]);
  CHECK(path_sample(path, 7.0)[0] == path.values.back()[0]);
}

TEST_CASE("tighter tolerances tighten the answer") {
  auto f = [](double, const Vec& y) { return Vec{y[0]}; };
  const double loose =
      std::fabs(integrate_adaptive(f, {1.0}, 0.0, 1.0, 1e-4, 1e-6).back()[0] -
                std::exp(1.0));
  const double tight =
      std::fabs(integrate_adaptive(f, {1.0}, 0.0, 1.0, 1e-11, 1e-13).back()[0] -
                std::exp(1.0));
  CHECK(tight < loose);
  CHECK(tight < 1e-9);
}

TEST_CASE("nonautonomous fields receive the correct time argument") {
  // y' = 2t integrates to t^2 exactly.
  auto f = [](double t, const Vec&) { return Vec{2.0 * t}; };
  OdePath path = integrate_adaptive(f, {0.0}, 0.0, 3.0, 1e-10, 1e-12);
  CHECK(path.back()[0] == doctest::Approx(9.0).epsilon(1e-9));
}
