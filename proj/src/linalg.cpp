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

#include "gamered/linalg.hpp"

#include <limits>
#include <string>

#include "gamered/error.hpp"

namespace gamered {

RowSpaceSolver::RowSpaceSolver(const Matrix& a, std::string_view name) {
  if (a.rows() == 0 || a.rows() > a.cols()) {
    throw InvalidArgument(std::string(name) + ": expected a K x M matrix with 1 <= K <= M, got " +
                          std::to_string(a.rows()) + " x " + std::to_string(a.cols()));
  }
  const Eigen::HouseholderQR<Matrix> qr(a.transpose());
  q_ = qr.householderQ() * Matrix::Identity(a.cols(), a.rows());
  r_ = qr.matrixQR().topRows(a.rows()).triangularView<Eigen::Upper>();
  const Vector s = singular_values(r_);
  sigma_max_ = s(0);
  sigma_min_ = s(s.size() - 1);
  if (!(sigma_min_ > kRankTolerance * sigma_max_)) {
    throw InvalidArgument(std::string(name) + " is not of full row rank (smallest singular value " +
                          std::to_string(sigma_min_) + ", largest " + std::to_string(sigma_max_) + ")");
  }
}

Vector RowSpaceSolver::apply(const Vector& v) const {
  if (v.size() != cols()) {
    throw InvalidArgument("RowSpaceSolver: vector length " + std::to_string(v.size()) + " != " +
                          std::to_string(cols()));
  }
  return r_.triangularView<Eigen::Upper>().solve(q_.transpose() * v);
}

Matrix RowSpaceSolver::apply(const Matrix& b) const {
  if (b.rows() != cols()) {
    throw InvalidArgument("RowSpaceSolver: matrix has " + std::to_string(b.rows()) + " rows, expected " +
                          std::to_string(cols()));
  }
  return r_.triangularView<Eigen::Upper>().solve(q_.transpose() * b);
}

Vector RowSpaceSolver::lift(const Vector& y) const {
  if (y.size() != rows()) {
    throw InvalidArgument("RowSpaceSolver: reduced vector length " + std::to_string(y.size()) + " != " +
                          std::to_string(rows()));
  }
  return q_ * r_.transpose().triangularView<Eigen::Lower>().solve(y);
}

Vector singular_values(const Matrix& a) {
  if (a.size() == 0) return Vector();
  return Eigen::BDCSVD<Matrix>(a).singularValues();
}

bool has_full_row_rank(const Matrix& a) {
  if (a.rows() == 0 || a.rows() > a.cols()) return false;
  const Vector s = singular_values(a);
  return s(s.size() - 1) > kRankTolerance * s(0);
}

Matrix symmetric_part(const Matrix& a) { return 0.5 * (a + a.transpose()); }

EigenRange eigen_range(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw InvalidArgument("eigen_range: expected a nonempty square matrix");
  const Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric_part(a), Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();
  return {ev(0), ev(ev.size() - 1)};
}

bool is_positive_definite(const Matrix& a) {
  const EigenRange e = eigen_range(a);
  return e.max > 0.0 && e.min > kRankTolerance * e.max;
}

double condition_number(const Matrix& a) {
  const Vector s = singular_values(a);
  if (s.size() == 0 || s(s.size() - 1) == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(s.size() - 1);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidArgument("max_abs_diff: shape mismatch");
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace gamered
