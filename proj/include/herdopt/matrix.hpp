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

#pragma once

#include <cstddef>
#include <vector>

namespace herdopt {

using Vec = std::vector<double>;

// Row-major dense matrix.  All arithmetic below runs in a fixed order so
// repeated runs on the same inputs produce bit-identical results; that is
// a deliberate property of the whole library and the reason none of these
// kernels are threaded or blocked.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  DenseMatrix transposed() const;

  DenseMatrix& operator+=(const DenseMatrix& other);
  DenseMatrix& operator-=(const DenseMatrix& other);
  DenseMatrix& operator*=(double s);

  // Adds `block` into this matrix with its (0,0) entry landing at (i0,j0).
  void add_block(std::size_t i0, std::size_t j0, const DenseMatrix& block,
                 double scale = 1.0);

  // Largest absolute entry; zero for an empty matrix.
  double max_abs() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vec data_;
};

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, DenseMatrix a);
Vec operator*(const DenseMatrix& a, const Vec& x);

double dot(const Vec& a, const Vec& b);
double norm_inf(const Vec& v);
double norm2(const Vec& v);

// LU factorization with partial pivoting.  A pivot whose magnitude falls
// below 1e-12 times the largest absolute entry of the input is treated as
// exactly zero and raises SingularMatrixError.  Pivot ties go to the
// smallest row index, which keeps factorizations reproducible.
class LuFactorization {
 public:
  explicit LuFactorization(DenseMatrix a);

  Vec solve(Vec b) const;
  DenseMatrix solve(DenseMatrix b) const;
  DenseMatrix inverse() const;

  // log|det| and its sign; sign is 0 never (singularity already threw).
  double log_abs_det() const { return log_abs_det_; }
  double det_sign() const { return det_sign_; }

  std::size_t size() const { return lu_.rows(); }

 private:
  DenseMatrix lu_;
  std::vector<std::size_t> pivots_;
  double log_abs_det_ = 0.0;
  double det_sign_ = 1.0;
};

// One-shot convenience wrapper around LuFactorization.
Vec linear_solve(const DenseMatrix& a, const Vec& b);

// Band matrix with kl sub- and ku super-diagonals stored in LAPACK band
// layout, with kl extra rows reserved for the fill-in that partial
// pivoting creates.  Entry (i,j) is addressable when j-ku <= i <= j+kl.
class BandedMatrix {
 public:
  BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku);

  std::size_t size() const { return n_; }

  double& at(std::size_t i, std::size_t j) {
    return ab_[(i - j + kl_ + ku_) * n_ + j];
  }
  double at(std::size_t i, std::size_t j) const {
    return ab_[(i - j + kl_ + ku_) * n_ + j];
  }

  void clear();

  // In-place LU with partial pivoting followed by a solve.  Shares the
  // singularity threshold of the dense path.  The factorization destroys
  // the stored bands, so assemble, solve once, then clear for reuse.
  void factor_and_solve(Vec& b);

 private:
  std::size_t n_, kl_, ku_;
  Vec ab_;
  std::vector<std::size_t> pivots_;
};

// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps, ascending.
// Off-diagonal asymmetry in the input is averaged away first.
Vec symmetric_eigenvalues(DenseMatrix a);

}  // namespace herdopt
