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

#include "herdopt/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "herdopt/errors.hpp"

namespace herdopt {

namespace {
constexpr double kPivotRelTol = 1e-12;
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other) {
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

void DenseMatrix::add_block(std::size_t i0, std::size_t j0,
                            const DenseMatrix& block, double scale) {
  for (std::size_t i = 0; i < block.rows(); ++i)
    for (std::size_t j = 0; j < block.cols(); ++j)
      (*this)(i0 + i, j0 + j) += scale * block(i, j);
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) {
  a += b;
  return a;
}

DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) {
  a -= b;
  return a;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

DenseMatrix operator*(double s, DenseMatrix a) {
  a *= s;
  return a;
}

Vec operator*(const DenseMatrix& a, const Vec& x) {
  Vec y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

double dot(const Vec& a, const Vec& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm_inf(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

LuFactorization::LuFactorization(DenseMatrix a) : lu_(std::move(a)) {
  if (lu_.rows() != lu_.cols())
    throw Error("LU factorization needs a square matrix");
  const std::size_t n = lu_.rows();
  pivots_.resize(n);
  const double threshold = kPivotRelTol * lu_.max_abs();

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(lu_(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (!(best > threshold) || best == 0.0)
      throw SingularMatrixError("singular matrix in LU factorization");
    pivots_[k] = p;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
      det_sign_ = -det_sign_;
    }
    const double pivot = lu_(k, k);
    log_abs_det_ += std::log(std::abs(pivot));
    if (pivot < 0.0) det_sign_ = -det_sign_;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = lu_(i, k) / pivot;
      lu_(i, k) = l;
      if (l == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= l * lu_(k, j);
    }
  }
}

Vec LuFactorization::solve(Vec b) const {
  const std::size_t n = lu_.rows();
  if (b.size() != n) throw Error("linear solve: size mismatch");
  // The stored L rows were exchanged along with U during factorization, so
  // all interchanges must land on b before the first elimination touches it.
  for (std::size_t k = 0; k < n; ++k)
    if (pivots_[k] != k) std::swap(b[k], b[pivots_[k]]);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = k + 1; i < n; ++i) b[i] -= lu_(i, k) * b[k];
  for (std::size_t k = n; k-- > 0;) {
    double acc = b[k];
    for (std::size_t j = k + 1; j < n; ++j) acc -= lu_(k, j) * b[j];
    b[k] = acc / lu_(k, k);
  }
  return b;
}

DenseMatrix LuFactorization::solve(DenseMatrix b) const {
  const std::size_t n = lu_.rows();
  DenseMatrix x(n, b.cols());
  Vec col(n);
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = b(i, j);
    Vec sol = solve(col);
    for (std::size_t i = 0; i < n; ++i) x(i, j) = sol[i];
  }
  return x;
}

DenseMatrix LuFactorization::inverse() const {
  return solve(DenseMatrix::identity(lu_.rows()));
}

Vec linear_solve(const DenseMatrix& a, const Vec& b) {
  return LuFactorization(a).solve(b);
}

BandedMatrix::BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(kl), ku_(ku), ab_((2 * kl + ku + 1) * n, 0.0), pivots_(n) {}

void BandedMatrix::clear() { std::fill(ab_.begin(), ab_.end(), 0.0); }

void BandedMatrix::factor_and_solve(Vec& b) {
  if (b.size() != n_) throw Error("banded solve: size mismatch");
  const std::size_t kv = kl_ + ku_;  // superdiagonal reach after fill-in
  double max_entry = 0.0;
  for (double v : ab_) max_entry = std::max(max_entry, std::abs(v));
  const double threshold = kPivotRelTol * max_entry;

  for (std::size_t k = 0; k < n_; ++k) {
    const std::size_t lm = std::min(kl_, n_ - 1 - k);
    std::size_t p = 0;
    double best = std::abs(at(k, k));
    for (std::size_t i = 1; i <= lm; ++i) {
      const double v = std::abs(at(k + i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (!(best > threshold) || best == 0.0)
      throw SingularMatrixError("singular matrix in banded factorization");
    pivots_[k] = k + p;
    const std::size_t jmax = std::min(n_ - 1, k + kv);
    if (p != 0) {
      for (std::size_t j = k; j <= jmax; ++j)
        std::swap(at(k, j), at(k + p, j));
    }
    const double pivot = at(k, k);
    for (std::size_t i = 1; i <= lm; ++i) {
      const double l = at(k + i, k) / pivot;
      at(k + i, k) = l;
      if (l == 0.0) continue;
      for (std::size_t j = k + 1; j <= jmax; ++j)
        at(k + i, j) -= l * at(k, j);
    }
  }

  for (std::size_t k = 0; k < n_; ++k) {
    if (pivots_[k] != k) std::swap(b[k], b[pivots_[k]]);
    const std::size_t lm = std::min(kl_, n_ - 1 - k);
    for (std::size_t i = 1; i <= lm; ++i) b[k + i] -= at(k + i, k) * b[k];
  }
  for (std::size_t k = n_; k-- > 0;) {
    double acc = b[k];
    const std::size_t jmax = std::min(n_ - 1, k + kv);
    for (std::size_t j = k + 1; j <= jmax; ++j) acc -= at(k, j) * b[j];
    b[k] = acc / at(k, k);
  }
}

Vec symmetric_eigenvalues(DenseMatrix a) {
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = avg;
      a(j, i) = avg;
    }

  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    double diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) diag += a(i, i) * a(i, i);
    if (off <= 1e-30 * std::max(1.0, diag)) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0)
                             ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                             : 1.0 / (theta - std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }

  Vec eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

}  // namespace herdopt
