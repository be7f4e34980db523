// Copyright 2026 The gamered Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <string_view>

namespace gamered {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
/// Row-major storage for data matrices and reduction maps, so that a row is
/// contiguous for the SIMD kernels.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Relative threshold on singular values / eigenvalues below which a matrix
/// is treated as rank deficient or not positive definite.
inline constexpr double kRankTolerance = 1e-10;

/// Applies g -> (A A^T)^{-1} A g for a K x M matrix A of full row rank.
///
/// Built from a thin QR factorisation A^T = Q R, so that
/// (A A^T)^{-1} A = R^{-1} Q^T and no normal-equation inverse is formed.
/// This is also the Moore-Penrose least-squares solution r~ of A^T r~ = r.
class RowSpaceSolver {
 public:
  /// Throws InvalidArgument (mentioning `name`) when A is rank deficient,
  /// i.e. smallest singular value <= kRankTolerance * largest.
  explicit RowSpaceSolver(const Matrix& a, std::string_view name = "A");

  Eigen::Index rows() const noexcept { return r_.rows(); }
  Eigen::Index cols() const noexcept { return q_.rows(); }

  /// (A A^T)^{-1} A v for v in R^M.
  Vector apply(const Vector& v) const;
  /// (A A^T)^{-1} A B, column by column, for an M x c matrix B.
  Matrix apply(const Matrix& b) const;
  /// A^T (A A^T)^{-1} y: the minimum-norm x with A x = y.
  Vector lift(const Vector& y) const;

  double min_singular_value() const noexcept { return sigma_min_; }
  double max_singular_value() const noexcept { return sigma_max_; }

 private:
  Matrix q_;  // M x K, orthonormal columns
  Matrix r_;  // K x K, upper triangular
  double sigma_min_ = 0.0;
  double sigma_max_ = 0.0;
};

/// Singular values of `a` in decreasing order.
Vector singular_values(const Matrix& a);

/// True when a (rows <= cols) has full row rank by the kRankTolerance rule.
bool has_full_row_rank(const Matrix& a);

Matrix symmetric_part(const Matrix& a);

/// Extreme eigenvalues of the symmetric part of `a`.
struct EigenRange {
  double min = 0.0;
  double max = 0.0;
};
EigenRange eigen_range(const Matrix& a);

/// min_eig > kRankTolerance * max_eig of the symmetric part, max_eig > 0.
bool is_positive_definite(const Matrix& a);

/// 2-norm condition number; +inf for an exactly singular matrix.
double condition_number(const Matrix& a);

double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace gamered
