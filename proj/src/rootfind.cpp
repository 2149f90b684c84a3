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

#include "herdopt/rootfind.hpp"

#include <algorithm>
#include <cmath>

#include "herdopt/errors.hpp"

namespace herdopt {

NewtonResult newton_damped(const ResidualFn& residual,
                           const JacobianFn& jacobian, Vec x0, int max_iter,
                           double tol) {
  NewtonResult result;
  result.root = std::move(x0);

  Vec r = residual(result.root);
  double rnorm = norm_inf(r);
  if (rnorm <= tol) {
    result.converged = true;
    return result;
  }

  int stalls = 0;
  for (int iter = 0; iter < max_iter; ++iter) {
    DenseMatrix j = jacobian(result.root);
    Vec rhs(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) rhs[i] = -r[i];
    Vec dx = linear_solve(j, rhs);

    double lambda = 1.0;
    Vec best_x, best_r;
    double best_norm = rnorm;
    bool improved = false;
    for (int halving = 0; halving <= 8; ++halving) {
      Vec trial(result.root.size());
      for (std::size_t i = 0; i < trial.size(); ++i)
        trial[i] = result.root[i] + lambda * dx[i];
      Vec tr = residual(trial);
      const double tn = norm_inf(tr);
      if (std::isfinite(tn) && tn < best_norm) {
        best_x = std::move(trial);
        best_r = std::move(tr);
        best_norm = tn;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }

    result.iterations = iter + 1;
    if (improved) {
      stalls = 0;
      result.root = std::move(best_x);
      r = std::move(best_r);
      rnorm = best_norm;
    } else {
      // Take the undamped step anyway; Newton sometimes has to climb out
      // of a shallow basin, but persistent failure to descend means the
      // iteration is lost.
      ++stalls;
      for (std::size_t i = 0; i < result.root.size(); ++i)
        result.root[i] += dx[i];
      r = residual(result.root);
      rnorm = norm_inf(r);
      if (stalls >= 3) {
        result.converged = rnorm <= tol;
        return result;
      }
    }

    if (rnorm <= tol) {
      result.converged = true;
      return result;
    }
  }
  result.converged = rnorm <= tol;
  return result;
}

DenseMatrix finite_difference_jacobian(const ResidualFn& fn, const Vec& x,
                                       double h) {
  Vec xp = x, xm = x;
  const std::size_t n = x.size();
  DenseMatrix j;
  for (std::size_t col = 0; col < n; ++col) {
    xp[col] = x[col] + h;
    xm[col] = x[col] - h;
    const Vec fp = fn(xp);
    const Vec fm = fn(xm);
    if (col == 0) j = DenseMatrix(fp.size(), n);
    for (std::size_t row = 0; row < fp.size(); ++row)
      j(row, col) = (fp[row] - fm[row]) / (2.0 * h);
    xp[col] = x[col];
    xm[col] = x[col];
  }
  return j;
}

double max_relative_difference(const DenseMatrix& a, const DenseMatrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double scale =
          std::max({1.0, std::abs(a(i, j)), std::abs(b(i, j))});
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / scale);
    }
  return worst;
}

}  // namespace herdopt
