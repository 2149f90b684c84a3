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

#include "herdopt/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "herdopt/errors.hpp"

namespace herdopt {

namespace {

bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

void check_mesh(const Mesh& mesh, std::size_t dim) {
  if (mesh.size() < 3) throw Error("mesh needs at least three nodes");
  if (mesh.values.size() != mesh.size())
    throw Error("mesh node/value count mismatch");
  for (std::size_t k = 1; k < mesh.size(); ++k)
    if (!(mesh.nodes[k] > mesh.nodes[k - 1]))
      throw Error("mesh nodes must be strictly increasing");
  for (const Vec& v : mesh.values)
    if (v.size() != dim) throw Error("mesh value dimension mismatch");
}

// Midpoint of the cubic Hermite interpolant over one interval.
void hermite_mid(const Vec& y0, const Vec& f0, const Vec& y1, const Vec& f1,
                 double h, Vec& out) {
  const std::size_t d = y0.size();
  out.resize(d);
  for (std::size_t i = 0; i < d; ++i)
    out[i] = 0.5 * (y0[i] + y1[i]) + 0.125 * h * (f0[i] - f1[i]);
}

// Value and slope of the interpolant at fraction s of the interval.
void hermite_eval(const Vec& y0, const Vec& f0, const Vec& y1, const Vec& f1,
                  double h, double s, Vec* value, Vec* slope) {
  const std::size_t d = y0.size();
  const double s2 = s * s, s3 = s2 * s;
  if (value) {
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    value->resize(d);
    for (std::size_t i = 0; i < d; ++i)
      (*value)[i] =
          h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
  }
  if (slope) {
    const double g00 = (6 * s2 - 6 * s) / h;
    const double g10 = 3 * s2 - 4 * s + 1;
    const double g01 = (-6 * s2 + 6 * s) / h;
    const double g11 = 3 * s2 - 2 * s;
    slope->resize(d);
    for (std::size_t i = 0; i < d; ++i)
      (*slope)[i] =
          g00 * y0[i] + g10 * f0[i] + g01 * y1[i] + g11 * f1[i];
  }
}

// Shared state of one Newton round on a fixed mesh.  Rows are ordered
// [left bc | interval defects | right bc] so that the Jacobian is a band
// of width O(dim); this is a permutation of the documented residual
// order and changes nothing about the solution.
class CollocationNewton {
 public:
  CollocationNewton(const OdeFn& ode, const OdeJacFn& jac,
                    const BoundaryConditions& bc, Mesh& mesh)
      : ode_(ode),
        jac_(jac),
        bc_(bc),
        mesh_(mesh),
        d_(mesh.values[0].size()),
        n_(mesh.size() * d_),
        kl_(bc.left_count + d_ - 1),
        ku_(2 * d_ - 1 - bc.left_count),
        band_(n_, kl_, ku_) {}

  // Residual in banded row order; also refreshes f_ at the nodes.
  // Returns false if any entry is non-finite.
  bool residual(const std::vector<Vec>& values, Vec& out) {
    const std::size_t nn = mesh_.size();
    f_.resize(nn);
    for (std::size_t k = 0; k < nn; ++k) f_[k] = ode_(values[k]);
    out.assign(n_, 0.0);

    const Vec rl = bc_.left(values.front());
    for (std::size_t r = 0; r < bc_.left_count; ++r) out[r] = rl[r];

    Vec ymid, fmid;
    for (std::size_t k = 0; k + 1 < nn; ++k) {
      const double h = mesh_.nodes[k + 1] - mesh_.nodes[k];
      hermite_mid(values[k], f_[k], values[k + 1], f_[k + 1], h, ymid);
      fmid = ode_(ymid);
      const std::size_t row0 = bc_.left_count + k * d_;
      for (std::size_t i = 0; i < d_; ++i)
        out[row0 + i] = 1.5 / h * (values[k + 1][i] - values[k][i]) -
                        0.25 * (f_[k][i] + f_[k + 1][i]) - fmid[i];
    }

    const Vec rr = bc_.right(values.back());
    const std::size_t row0 = bc_.left_count + (nn - 1) * d_;
    for (std::size_t r = 0; r < bc_.right_count; ++r) out[row0 + r] = rr[r];
    return all_finite(out);
  }

  // Largest |f|_inf over the nodes of the last residual evaluation.
  double node_deriv_scale() const {
    double m = 0.0;
    for (const Vec& f : f_) m = std::max(m, norm_inf(f));
    return m;
  }

  // Assembles the banded Jacobian at `values` (f_ must be current) and
  // solves band * dx = -res.
  Vec solve_step(const std::vector<Vec>& values, const Vec& res) {
    const std::size_t nn = mesh_.size();
    band_.clear();

    jac_nodes_.resize(nn);
    for (std::size_t k = 0; k < nn; ++k) jac_nodes_[k] = jac_(values[k]);

    const DenseMatrix jl = bc_.left_jacobian(values.front());
    for (std::size_t r = 0; r < bc_.left_count; ++r)
      for (std::size_t c = 0; c < d_; ++c) band_.at(r, c) = jl(r, c);

    Vec ymid;
    for (std::size_t k = 0; k + 1 < nn; ++k) {
      const double h = mesh_.nodes[k + 1] - mesh_.nodes[k];
      hermite_mid(values[k], f_[k], values[k + 1], f_[k + 1], h, ymid);
      const DenseMatrix jm = jac_(ymid);
      const DenseMatrix& j0 = jac_nodes_[k];
      const DenseMatrix& j1 = jac_nodes_[k + 1];
      const std::size_t row0 = bc_.left_count + k * d_;
      const std::size_t col0 = k * d_;
      for (std::size_t r = 0; r < d_; ++r) {
        for (std::size_t c = 0; c < d_; ++c) {
          double left = -0.25 * j0(r, c);
          double right = -0.25 * j1(r, c);
          for (std::size_t t = 0; t < d_; ++t) {
            left -= jm(r, t) * (0.125 * h) * j0(t, c);
            right += jm(r, t) * (0.125 * h) * j1(t, c);
          }
          left -= 0.5 * jm(r, c);
          right -= 0.5 * jm(r, c);
          if (r == c) {
            left -= 1.5 / h;
            right += 1.5 / h;
          }
          band_.at(row0 + r, col0 + c) += left;
          band_.at(row0 + r, col0 + d_ + c) += right;
        }
      }
    }

    const DenseMatrix jr = bc_.right_jacobian(values.back());
    const std::size_t row0 = bc_.left_count + (nn - 1) * d_;
    const std::size_t col0 = (nn - 1) * d_;
    for (std::size_t r = 0; r < bc_.right_count; ++r)
      for (std::size_t c = 0; c < d_; ++c)
        band_.at(row0 + r, col0 + c) = jr(r, c);

    Vec dx(n_);
    for (std::size_t i = 0; i < n_; ++i) dx[i] = -res[i];
    band_.factor_and_solve(dx);
    return dx;
  }

  const std::vector<Vec>& node_derivs() const { return f_; }

 private:
  const OdeFn& ode_;
  const OdeJacFn& jac_;
  const BoundaryConditions& bc_;
  Mesh& mesh_;
  std::size_t d_, n_, kl_, ku_;
  BandedMatrix band_;
  std::vector<Vec> f_;
  std::vector<DenseMatrix> jac_nodes_;
};

struct NewtonOutcome {
  bool met_tol = false;
  bool hard_failure = false;
  int iterations = 0;
  std::string reason;
};

NewtonOutcome newton_round(const OdeFn& ode, const OdeJacFn& jac,
                           const BoundaryConditions& bc, Mesh& mesh,
                           const BvpOptions& opts) {
  NewtonOutcome outcome;
  CollocationNewton sys(ode, jac, bc, mesh);

  Vec res;
  if (!sys.residual(mesh.values, res)) {
    outcome.hard_failure = true;
    outcome.reason = "collocation residual not finite";
    return outcome;
  }
  double rnorm = norm_inf(res);
  const double blowup = 1e8 * (rnorm + 1.0);
  auto tol_now = [&]() {
    return 1e-3 * opts.residual_tol * (1.0 + sys.node_deriv_scale());
  };
  if (rnorm <= tol_now()) {
    outcome.met_tol = true;
    return outcome;
  }

  const std::size_t d = mesh.values[0].size();
  std::vector<Vec> trial(mesh.size(), Vec(d));
  Vec trial_res;
  int stalls = 0;

  for (int iter = 0; iter < opts.max_newton_iter; ++iter) {
    Vec dx;
    try {
      dx = sys.solve_step(mesh.values, res);
    } catch (const SingularMatrixError&) {
      outcome.hard_failure = true;
      outcome.reason = "singular collocation Jacobian";
      return outcome;
    }
    outcome.iterations = iter + 1;

    double lambda = 1.0;
    bool improved = false;
    for (int halving = 0; halving <= 8; ++halving) {
      for (std::size_t k = 0; k < mesh.size(); ++k)
        for (std::size_t i = 0; i < d; ++i)
          trial[k][i] = mesh.values[k][i] + lambda * dx[k * d + i];
      const bool finite = sys.residual(trial, trial_res);
      const double tn = finite ? norm_inf(trial_res) : 0.0;
      if (finite && tn < rnorm) {
        mesh.values.swap(trial);
        res.swap(trial_res);
        rnorm = tn;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }

    if (improved) {
      stalls = 0;
    } else {
      ++stalls;
      for (std::size_t k = 0; k < mesh.size(); ++k)
        for (std::size_t i = 0; i < d; ++i)
          mesh.values[k][i] += dx[k * d + i];
      if (!sys.residual(mesh.values, res)) {
        outcome.hard_failure = true;
        outcome.reason = "collocation residual not finite";
        return outcome;
      }
      rnorm = norm_inf(res);
      if (stalls >= 3) return outcome;
    }

    if (rnorm > blowup) {
      outcome.hard_failure = true;
      outcome.reason = "newton iteration diverged";
      return outcome;
    }
    if (rnorm <= tol_now()) {
      outcome.met_tol = true;
      return outcome;
    }
  }
  // Out of iterations with a finite iterate: let refinement proceed.
  return outcome;
}

// Normalized defect estimate per interval, sampled at the quarter points
// of the Hermite interpolant.
Vec interval_residuals(const Mesh& mesh, const OdeFn& ode,
                       const std::vector<Vec>& f) {
  const std::size_t d = mesh.values[0].size();
  Vec est(mesh.size() - 1, 0.0);
  Vec y, yp;
  for (std::size_t k = 0; k + 1 < mesh.size(); ++k) {
    const double h = mesh.nodes[k + 1] - mesh.nodes[k];
    double acc = 0.0;
    for (double s : {0.25, 0.75}) {
      hermite_eval(mesh.values[k], f[k], mesh.values[k + 1], f[k + 1], h, s,
                   &y, &yp);
      const Vec fy = ode(y);
      for (std::size_t i = 0; i < d; ++i) {
        const double nd = (yp[i] - fy[i]) / (1.0 + std::abs(fy[i]));
        acc += nd * nd;
      }
    }
    est[k] = std::sqrt(acc / (2.0 * d));
  }
  return est;
}

}  // namespace

Vec collocation_residual(const Mesh& mesh, const OdeFn& ode,
                         const BoundaryConditions& bc) {
  check_mesh(mesh, mesh.values[0].size());
  const std::size_t d = mesh.values[0].size();
  if (bc.left_count + bc.right_count != d)
    throw Error("boundary residual sizes must sum to the system dimension");

  std::vector<Vec> f(mesh.size());
  for (std::size_t k = 0; k < mesh.size(); ++k) f[k] = ode(mesh.values[k]);

  Vec out(mesh.size() * d);
  Vec ymid;
  for (std::size_t k = 0; k + 1 < mesh.size(); ++k) {
    const double h = mesh.nodes[k + 1] - mesh.nodes[k];
    hermite_mid(mesh.values[k], f[k], mesh.values[k + 1], f[k + 1], h, ymid);
    const Vec fmid = ode(ymid);
    for (std::size_t i = 0; i < d; ++i)
      out[k * d + i] = 1.5 / h * (mesh.values[k + 1][i] - mesh.values[k][i]) -
                       0.25 * (f[k][i] + f[k + 1][i]) - fmid[i];
  }
  const Vec rl = bc.left(mesh.values.front());
  const Vec rr = bc.right(mesh.values.back());
  std::size_t pos = (mesh.size() - 1) * d;
  for (std::size_t r = 0; r < bc.left_count; ++r) out[pos++] = rl[r];
  for (std::size_t r = 0; r < bc.right_count; ++r) out[pos++] = rr[r];
  return out;
}

CollocationResult solve_collocation(const OdeFn& ode, const OdeJacFn& jac,
                                    const BoundaryConditions& bc, Mesh initial,
                                    const BvpOptions& opts) {
  const std::size_t d = initial.values.empty() ? 0 : initial.values[0].size();
  check_mesh(initial, d);
  if (bc.left_count + bc.right_count != d)
    throw Error("boundary residual sizes must sum to the system dimension");

  CollocationResult result;
  result.mesh = std::move(initial);
  Mesh& mesh = result.mesh;

  while (true) {
    const NewtonOutcome outcome = newton_round(ode, jac, bc, mesh, opts);
    result.report.newton_iterations += outcome.iterations;
    if (outcome.hard_failure) {
      result.status = BvpStatus::newton_failed;
      result.report.failure_reason = outcome.reason;
      return result;
    }

    std::vector<Vec> f(mesh.size());
    for (std::size_t k = 0; k < mesh.size(); ++k) f[k] = ode(mesh.values[k]);
    const Vec est = interval_residuals(mesh, ode, f);
    double worst = 0.0;
    std::size_t worst_idx = 0;
    for (std::size_t k = 0; k < est.size(); ++k)
      if (est[k] > worst) {
        worst = est[k];
        worst_idx = k;
      }
    result.report.max_rms_residual = worst;

    if (outcome.met_tol && worst <= opts.residual_tol) {
      result.status = BvpStatus::converged;
      result.report.converged = true;
      return result;
    }

    std::vector<std::size_t> split;
    for (std::size_t k = 0; k < est.size(); ++k)
      if (est[k] > opts.residual_tol) split.push_back(k);
    if (split.empty()) split.push_back(worst_idx);

    if (mesh.size() + split.size() > static_cast<std::size_t>(opts.max_nodes)) {
      result.status = BvpStatus::max_nodes_exceeded;
      result.report.failure_reason = "mesh refinement exceeded max_nodes";
      return result;
    }

    Mesh refined;
    refined.nodes.reserve(mesh.size() + split.size());
    refined.values.reserve(mesh.size() + split.size());
    std::size_t next_split = 0;
    Vec ymid;
    for (std::size_t k = 0; k < mesh.size(); ++k) {
      refined.nodes.push_back(mesh.nodes[k]);
      refined.values.push_back(mesh.values[k]);
      if (next_split < split.size() && split[next_split] == k) {
        const double h = mesh.nodes[k + 1] - mesh.nodes[k];
        hermite_mid(mesh.values[k], f[k], mesh.values[k + 1], f[k + 1], h,
                    ymid);
        refined.nodes.push_back(mesh.nodes[k] + 0.5 * h);
        refined.values.push_back(ymid);
        ++next_split;
      }
    }
    mesh = std::move(refined);
  }
}

MeshInterpolant::MeshInterpolant(const Mesh& mesh, const OdeFn& ode)
    : mesh_(mesh), derivs_(mesh.size()) {
  for (std::size_t k = 0; k < mesh.size(); ++k)
    derivs_[k] = ode(mesh.values[k]);
}

Vec MeshInterpolant::at(double t) const {
  if (t <= mesh_.nodes.front()) return mesh_.values.front();
  if (t >= mesh_.nodes.back()) return mesh_.values.back();
  std::size_t lo = 0, hi = mesh_.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (mesh_.nodes[mid] <= t)
      lo = mid;
    else
      hi = mid;
  }
  const double h = mesh_.nodes[hi] - mesh_.nodes[lo];
  const double s = (t - mesh_.nodes[lo]) / h;
  Vec value;
  hermite_eval(mesh_.values[lo], derivs_[lo], mesh_.values[hi], derivs_[hi],
               h, s, &value, nullptr);
  return value;
}

Mesh resample_mesh(const Mesh& mesh, const OdeFn& ode, const Vec& new_nodes) {
  const MeshInterpolant interp(mesh, ode);
  Mesh out;
  out.nodes = new_nodes;
  out.values.reserve(new_nodes.size());
  for (double t : new_nodes) out.values.push_back(interp.at(t));
  return out;
}

double max_defect(const Mesh& mesh, const OdeFn& ode) {
  std::vector<Vec> f(mesh.size());
  for (std::size_t k = 0; k < mesh.size(); ++k) f[k] = ode(mesh.values[k]);
  double worst = 0.0;
  Vec ymid;
  for (std::size_t k = 0; k + 1 < mesh.size(); ++k) {
    const double h = mesh.nodes[k + 1] - mesh.nodes[k];
    hermite_mid(mesh.values[k], f[k], mesh.values[k + 1], f[k + 1], h, ymid);
    const Vec fmid = ode(ymid);
    for (std::size_t i = 0; i < ymid.size(); ++i) {
      const double defect =
          1.5 / h * (mesh.values[k + 1][i] - mesh.values[k][i]) -
          0.25 * (f[k][i] + f[k + 1][i]) - fmid[i];
      worst = std::max(worst, std::abs(defect));
    }
  }
  return worst;
}

Trajectory mesh_to_trajectory(const Mesh& mesh, const ScenarioSpec& spec) {
  const int ns = spec.state_size();
  Trajectory traj;
  traj.times = mesh.nodes;
  traj.states.reserve(mesh.size());
  traj.costates.reserve(mesh.size());
  traj.controls.reserve(mesh.size());
  for (const Vec& v : mesh.values) {
    traj.states.emplace_back(v.begin(), v.begin() + ns);
    traj.costates.emplace_back(v.begin() + ns, v.end());
    traj.controls.push_back(optimal_control(v, spec));
  }
  return traj;
}

std::pair<Trajectory, SolverReport> solve_with_restarts(
    const ScenarioSpec& spec, Mesh guess, const BvpOptions& opts,
    CostateModel model) {
  spec.validate();
  const OdeFn ode = [&spec, model](const Vec& y) {
    return augmented_deriv(y, spec, model);
  };
  const OdeJacFn jac = [&spec, model](const Vec& y) {
    return augmented_jacobian(y, spec, model);
  };

  const int ns = spec.state_size();
  const Vec x0 = spec.initial_state();
  BoundaryConditions bc;
  bc.left_count = static_cast<std::size_t>(ns);
  bc.right_count = static_cast<std::size_t>(ns);
  bc.left = [ns, x0](const Vec& y) {
    Vec r(ns);
    for (int k = 0; k < ns; ++k) r[k] = y[k] - x0[k];
    return r;
  };
  bc.right = [ns](const Vec& y) {
    Vec r(ns);
    for (int k = 0; k < ns; ++k) r[k] = y[ns + k];
    return r;
  };
  bc.left_jacobian = [ns](const Vec&) {
    DenseMatrix j(ns, 2 * ns);
    for (int k = 0; k < ns; ++k) j(k, k) = 1.0;
    return j;
  };
  bc.right_jacobian = [ns](const Vec&) {
    DenseMatrix j(ns, 2 * ns);
    for (int k = 0; k < ns; ++k) j(k, ns + k) = 1.0;
    return j;
  };

  const Vec original_nodes = guess.nodes;
  SolverReport report;
  CollocationResult result;
  Mesh mesh = std::move(guess);

  for (int attempt = 1; attempt <= opts.max_restarts; ++attempt) {
    result = solve_collocation(ode, jac, bc, std::move(mesh), opts);
    report.restarts_used = attempt;
    report.newton_iterations += result.report.newton_iterations;
    report.max_rms_residual = result.report.max_rms_residual;
    report.failure_reason = result.report.failure_reason;

    if (result.status == BvpStatus::converged) {
      report.converged = true;
      break;
    }
    if (result.status == BvpStatus::newton_failed) break;
    if (attempt == opts.max_restarts) break;
    mesh = resample_mesh(result.mesh, ode, original_nodes);
  }

  Trajectory traj = mesh_to_trajectory(result.mesh, spec);
  report.final_cost = trajectory_cost(traj, spec);
  return {std::move(traj), std::move(report)};
}

}  // namespace herdopt
