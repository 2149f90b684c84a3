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

#include "herdopt/lqr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "herdopt/dynamics.hpp"
#include "herdopt/errors.hpp"
#include "herdopt/ode.hpp"

namespace herdopt {

namespace {

DenseMatrix symmetrized(const DenseMatrix& m) {
  DenseMatrix s(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      s(i, j) = 0.5 * (m(i, j) + m(j, i));
  return s;
}

double det_scale(const LuFactorization& lu) {
  const double c =
      std::exp(lu.log_abs_det() / static_cast<double>(lu.size()));
  if (!std::isfinite(c)) return 1.0;
  return std::clamp(c, 1e-8, 1e8);
}

}  // namespace

DenseMatrix matrix_sign(DenseMatrix z, int max_iter) {
  const std::size_t n = z.rows();
  if (n != z.cols()) throw Error("matrix_sign: square matrix required");

  double prev_delta = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iter; ++iter) {
    DenseMatrix zinv;
    double c;
    try {
      const LuFactorization lu(z);
      c = det_scale(lu);
      zinv = lu.inverse();
    } catch (const SingularMatrixError&) {
      throw NoStabilizingSolutionError(
          "sign iteration hit a singular iterate");
    }
    DenseMatrix next(n, n);
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        next(i, j) = 0.5 * (z(i, j) / c + c * zinv(i, j));
        delta = std::max(delta, std::abs(next(i, j) - z(i, j)));
      }
    z = std::move(next);
    const double scale = std::max(1.0, z.max_abs());
    // Once steps stop shrinking near the limit the iterate is sitting on
    // its roundoff plateau; further passes only churn noise.
    const bool stagnant = delta > 0.5 * prev_delta && delta <= 1e-6 * scale;
    prev_delta = delta;
    if (delta <= 1e-13 * scale || stagnant) break;
  }

  // The limit must be involutory; anything else means eigenvalues sat on
  // the imaginary axis (or the iteration ran out) and there is no sign.
  const DenseMatrix check = z * z - DenseMatrix::identity(n);
  if (check.max_abs() > 1e-6 * std::max(1.0, z.max_abs()))
    throw NoStabilizingSolutionError("sign iteration did not converge");
  return z;
}

DenseMatrix solve_lyapunov(const DenseMatrix& a, const DenseMatrix& c) {
  const std::size_t n = a.rows();
  DenseMatrix ak = a;
  DenseMatrix ck = c;
  const int max_iter = 100;

  for (int iter = 0; iter < max_iter; ++iter) {
    DenseMatrix ainv;
    double s;
    try {
      const LuFactorization lu(ak);
      s = det_scale(lu);
      ainv = lu.inverse();
    } catch (const SingularMatrixError&) {
      throw NoStabilizingSolutionError(
          "lyapunov sign iteration hit a singular iterate");
    }
    const DenseMatrix ainv_t = ainv.transposed();
    DenseMatrix cnext = ainv_t * ck * ainv;
    DenseMatrix anext(n, n);
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        anext(i, j) = 0.5 * (ak(i, j) / s + s * ainv(i, j));
        cnext(i, j) = 0.5 * (ck(i, j) / s + s * cnext(i, j));
        delta = std::max(delta, std::abs(anext(i, j) - ak(i, j)));
      }
    ak = std::move(anext);
    ck = std::move(cnext);
    if (delta <= 1e-13 * std::max(1.0, ak.max_abs())) {
      const DenseMatrix residual = ak + DenseMatrix::identity(n);
      if (residual.max_abs() > 1e-6)
        throw NoStabilizingSolutionError(
            "lyapunov sign iteration: matrix is not Hurwitz");
      DenseMatrix x = ck;
      x *= 0.5;
      return symmetrized(x);
    }
  }
  throw NoStabilizingSolutionError("lyapunov sign iteration did not converge");
}

DenseMatrix solve_care(const DenseMatrix& a, const DenseMatrix& b,
                       const DenseMatrix& q, const DenseMatrix& r,
                       const CareOptions& opts) {
  const std::size_t n = a.rows();
  if (a.cols() != n || q.rows() != n || q.cols() != n || b.rows() != n ||
      r.rows() != b.cols() || r.cols() != b.cols())
    throw Error("solve_care: dimension mismatch");

  const LuFactorization rlu(r);
  const DenseMatrix g = b * rlu.solve(b.transposed());

  DenseMatrix ham(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      ham(i, j) = a(i, j);
      ham(i, n + j) = -g(i, j);
      ham(n + i, j) = -q(i, j);
      ham(n + i, n + j) = -a(j, i);
    }

  const DenseMatrix sign = matrix_sign(std::move(ham));

  // A proper stabilizing solution needs the stable subspace to have
  // dimension n, i.e. tr((I - S)/2) = n, i.e. tr(S) = 0.
  double trace = 0.0;
  for (std::size_t i = 0; i < 2 * n; ++i) trace += sign(i, i);
  if (std::abs(trace) > 0.2)
    throw NoStabilizingSolutionError(
        "stable subspace has the wrong dimension");

  // Columns of S + I span the stable subspace; P solves the overdetermined
  // [W12; W22] P = -[W11; W21] through its normal equations.
  DenseMatrix w11(n, n), w12(n, n), w21(n, n), w22(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      w11(i, j) = sign(i, j) + (i == j ? 1.0 : 0.0);
      w12(i, j) = sign(i, n + j);
      w21(i, j) = sign(n + i, j);
      w22(i, j) = sign(n + i, n + j) + (i == j ? 1.0 : 0.0);
    }
  const DenseMatrix w12t = w12.transposed();
  const DenseMatrix w22t = w22.transposed();
  const DenseMatrix normal = w12t * w12 + w22t * w22;
  DenseMatrix rhs = w12t * w11 + w22t * w21;
  rhs *= -1.0;

  DenseMatrix p;
  try {
    p = symmetrized(LuFactorization(normal).solve(rhs));
  } catch (const SingularMatrixError&) {
    throw NoStabilizingSolutionError("stable subspace is degenerate");
  }

  // Newton-Kleinman polish: each pass solves the Lyapunov equation of the
  // current closed loop, which is also a natural guard against having
  // picked a non-stabilizing subspace.
  const double tol = opts.residual_tol * (1.0 + q.max_abs());
  const DenseMatrix at = a.transposed();
  DenseMatrix best = p;
  double best_res = (at * p + p * a - p * g * p + q).max_abs();

  for (int iter = 0; iter < opts.max_refine_iter && best_res > tol; ++iter) {
    const DenseMatrix k = rlu.solve(b.transposed() * p);
    const DenseMatrix acl = a - b * k;
    const DenseMatrix cost = q + k.transposed() * r * k;
    try {
      p = solve_lyapunov(acl, cost);
    } catch (const NoStabilizingSolutionError&) {
      break;
    }
    const double res = (at * p + p * a - p * g * p + q).max_abs();
    if (res < best_res) {
      best = p;
      best_res = res;
    } else {
      break;
    }
  }

  if (best_res > tol)
    throw NoStabilizingSolutionError(
        "riccati residual did not meet tolerance");

  const Vec eigs = symmetric_eigenvalues(best);
  if (!eigs.empty() && eigs.front() < -1e-8 * std::max(1.0, best.max_abs()))
    throw NoStabilizingSolutionError("riccati solution is indefinite");
  return best;
}

DenseMatrix lqr_gain(const DenseMatrix& p, const DenseMatrix& b,
                     const DenseMatrix& r) {
  return LuFactorization(r).solve(b.transposed() * p);
}

std::pair<DenseMatrix, DenseMatrix> weight_matrices(
    const ScenarioSpec& spec, const LqrWeights& weights,
    double q_regularization) {
  const StateLayout lay = spec.layout();
  DenseMatrix q(lay.state_size(), lay.state_size());
  for (int j = 0; j < lay.dogs; ++j)
    for (int k = 0; k < lay.dim; ++k) {
      q(lay.dog_pos(j) + k, lay.dog_pos(j) + k) = weights.dog_pos;
      q(lay.dog_vel(j) + k, lay.dog_vel(j) + k) = weights.dog_vel;
    }
  for (int i = 0; i < lay.sheep; ++i)
    for (int k = 0; k < lay.dim; ++k) {
      q(lay.sheep_pos(i) + k, lay.sheep_pos(i) + k) = weights.sheep_pos;
      q(lay.sheep_vel(i) + k, lay.sheep_vel(i) + k) = weights.sheep_vel;
    }
  for (int d = 0; d < lay.state_size(); ++d) q(d, d) += q_regularization;

  DenseMatrix r(lay.control_size(), lay.control_size());
  for (int u = 0; u < lay.control_size(); ++u)
    r(u, u) = weights.control_effort;
  return {std::move(q), std::move(r)};
}

DenseMatrix regulator_linearization(const Vec& state,
                                    const ScenarioSpec& spec) {
  const StateLayout lay = spec.layout();
  const int dim = lay.dim;
  DenseMatrix a(lay.state_size(), lay.state_size());

  for (int d = 0; d < lay.dogs; ++d)
    for (int k = 0; k < dim; ++k)
      a(lay.dog_pos(d) + k, lay.dog_vel(d) + k) = 1.0;

  for (int i = 0; i < lay.sheep; ++i) {
    for (int k = 0; k < dim; ++k)
      a(lay.sheep_pos(i) + k, lay.sheep_vel(i) + k) = 1.0;
    for (int d = 0; d < lay.dogs; ++d) {
      double w = spec.epsilon;
      for (int k = 0; k < dim; ++k) {
        const double diff =
            state[lay.sheep_pos(i) + k] - state[lay.dog_pos(d) + k];
        w += diff * diff;
      }
      const double c = std::pow(w, -0.5 * spec.lambda);
      for (int k = 0; k < dim; ++k) {
        a(lay.sheep_vel(i) + k, lay.sheep_pos(i) + k) += c;
        a(lay.sheep_vel(i) + k, lay.dog_pos(d) + k) -= c;
      }
    }
  }
  return a;
}

std::pair<Vec, Vec> closed_loop_deriv(const Vec& state,
                                      const ScenarioSpec& spec,
                                      const LqrWeights& weights,
                                      ControllerCache& cache,
                                      const CareOptions& opts) {
  // The weight table carries its own interaction epsilon; it replaces the
  // scenario's value for the whole closed-loop run, plant included.
  ScenarioSpec plant = spec;
  plant.epsilon = weights.epsilon;

  const DenseMatrix b = control_jacobian(plant);
  DenseMatrix gain;
  try {
    const DenseMatrix a = regulator_linearization(state, plant);
    auto [q, r] = weight_matrices(plant, weights, opts.q_regularization);
    const DenseMatrix p = solve_care(a, b, q, r, opts);
    gain = lqr_gain(p, b, r);
    ++cache.care_solves;
    cache.gain = gain;
  } catch (const NoStabilizingSolutionError&) {
    ++cache.care_failures;
    if (!cache.gain)
      throw ControllerStalledError(
          "first riccati solve failed; no cached gain to fall back on");
    gain = *cache.gain;
  }

  Vec u = gain * state;
  for (double& v : u) v = -v;
  Vec deriv = state_deriv(state, u, plant);
  return {std::move(deriv), std::move(u)};
}

std::pair<Trajectory, SolverReport> simulate_lqr(const ScenarioSpec& spec,
                                                 const LqrWeights& weights,
                                                 double rtol,
                                                 ControllerCache* cache,
                                                 const CareOptions& opts) {
  spec.validate();
  ControllerCache local;
  ControllerCache& cc = cache ? *cache : local;

  Trajectory traj;
  const VectorField field = [&](double, const Vec& y) {
    return closed_loop_deriv(y, spec, weights, cc, opts).first;
  };
  const StepObserver observer = [&](double t, const Vec& y, const Vec&) {
    auto [deriv, u] = closed_loop_deriv(y, spec, weights, cc, opts);
    (void)deriv;
    traj.times.push_back(t);
    traj.states.push_back(y);
    traj.controls.push_back(std::move(u));
  };

  integrate_adaptive(field, spec.initial_state(), 0.0, spec.tf, rtol,
                     1e-3 * rtol, observer);

  SolverReport report;
  report.converged = true;
  report.restarts_used = 1;
  report.final_cost = trajectory_cost(traj, spec);
  return {std::move(traj), std::move(report)};
}

}  // namespace herdopt
