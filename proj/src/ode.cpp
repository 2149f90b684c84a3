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

#include "herdopt/ode.hpp"

#include <algorithm>
#include <cmath>

#include "herdopt/errors.hpp"

namespace herdopt {

namespace {

// Dormand-Prince 5(4) coefficients.  The last stage row doubles as the
// fifth-order weights, so the derivative at an accepted node is free.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                 a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;

// Difference between the fifth- and fourth-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// Starting step in the style of Hairer, Norsett & Wanner (II.4).
double initial_step(const VectorField& f, double t0, const Vec& y0,
                    const Vec& f0, double tf, double rtol, double atol) {
  const std::size_t n = y0.size();
  double d0 = 0.0, d1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sc = atol + rtol * std::abs(y0[i]);
    d0 += (y0[i] / sc) * (y0[i] / sc);
    d1 += (f0[i] / sc) * (f0[i] / sc);
  }
  d0 = std::sqrt(d0 / n);
  d1 = std::sqrt(d1 / n);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, tf - t0);

  Vec y1(n);
  for (std::size_t i = 0; i < n; ++i) y1[i] = y0[i] + h0 * f0[i];
  Vec f1 = f(t0 + h0, y1);
  if (!all_finite(f1)) return std::max(1e-6, 1e-3 * h0);
  double d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sc = atol + rtol * std::abs(y0[i]);
    const double df = (f1[i] - f0[i]) / sc;
    d2 += df * df;
  }
  d2 = std::sqrt(d2 / n) / h0;

  double h1;
  if (std::max(d1, d2) <= 1e-15)
    h1 = std::max(1e-6, h0 * 1e-3);
  else
    h1 = std::pow(0.01 / std::max(d1, d2), 0.2);
  return std::min({100.0 * h0, h1, tf - t0});
}

}  // namespace

OdePath integrate_adaptive(const VectorField& f, Vec y0, double t0, double tf,
                           double rtol, double atol,
                           const StepObserver& on_step) {
  if (!(tf > t0)) throw Error("integrate_adaptive: tf must exceed t0");
  const std::size_t n = y0.size();
  const double h_floor = 1e-14 * (tf - t0);

  OdePath path;
  Vec k1 = f(t0, y0);
  if (!all_finite(k1))
    throw Error("integrate_adaptive: derivative not finite at t0");
  path.times.push_back(t0);
  path.values.push_back(y0);
  path.derivs.push_back(k1);
  if (on_step) on_step(t0, y0, k1);

  double t = t0;
  Vec y = std::move(y0);
  double h = initial_step(f, t0, y, k1, tf, rtol, atol);

  Vec k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);

  while (t < tf) {
    if (h < h_floor)
      throw StepSizeUnderflowError("integrate_adaptive: step size underflow");
    bool last = false;
    if (t + h >= tf) {
      h = tf - t;
      last = true;
    }

    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    k2 = f(t + c2 * h, ytmp);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = f(t + c3 * h, ytmp);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = f(t + c4 * h, ytmp);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] =
          y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = f(t + c5 * h, ytmp);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                            a64 * k4[i] + a65 * k5[i]);
    k6 = f(t + h, ytmp);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] +
                            a75 * k5[i] + a76 * k6[i]);
    k7 = f(t + h, ynew);

    bool finite = all_finite(ynew) && all_finite(k7);
    double err = 0.0;
    if (finite) {
      for (std::size_t i = 0; i < n; ++i) {
        const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                              e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc =
            atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        err += (e / sc) * (e / sc);
      }
      err = std::sqrt(err / n);
    }

    if (finite && err <= 1.0) {
      t = last ? tf : t + h;
      y.swap(ynew);
      k1.swap(k7);
      path.times.push_back(t);
      path.values.push_back(y);
      path.derivs.push_back(k1);
      if (on_step) on_step(t, y, k1);
      const double factor =
          (err == 0.0) ? 10.0
                       : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 10.0);
      h *= factor;
    } else {
      const double factor =
          finite ? std::max(0.9 * std::pow(err, -0.2), 0.2) : 0.2;
      h *= std::min(factor, 0.9);
    }
  }
  return path;
}

OdePath integrate_adaptive(const VectorField& f, Vec y0, double t0, double tf,
                           double rtol, double atol) {
  return integrate_adaptive(f, std::move(y0), t0, tf, rtol, atol,
                            StepObserver());
}

Vec path_sample(const OdePath& path, double t) {
  if (path.size() == 0) throw Error("path_sample: empty path");
  if (t <= path.times.front()) return path.values.front();
  if (t >= path.times.back()) return path.values.back();

  // Largest k with times[k] <= t.
  std::size_t lo = 0, hi = path.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (path.times[mid] <= t)
      lo = mid;
    else
      hi = mid;
  }

  const double h = path.times[hi] - path.times[lo];
  const double s = (t - path.times[lo]) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;

  const Vec& y0 = path.values[lo];
  const Vec& y1 = path.values[hi];
  const Vec& f0 = path.derivs[lo];
  const Vec& f1 = path.derivs[hi];
  Vec out(y0.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
  return out;
}

}  // namespace herdopt
