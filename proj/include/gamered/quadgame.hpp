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

// Two-player bilinear quadratic games
//
//   J1(x1, x2) = x1' Q1 x2 - x1' r1 + v1,
//   J2(x1, x2) = x2' Q2 x1 - x2' r2 + v2,
//
// their closed-form Nash equilibrium, and the exact correspondence between a
// large-scale game and a reduced game played on y_i = A_i x_i.

#include <filesystem>
#include <utility>

#include "gamered/linalg.hpp"
#include "gamered/randmaps.hpp"

namespace gamered {

/// Game parameters. Used for both the original (dimension M) and the reduced
/// (dimension K) parameterisation; the costs have the same form in each.
struct QuadGame2P {
  Matrix q1;
  Matrix q2;
  Vector r1;
  Vector r2;
  double v1 = 0.0;
  double v2 = 0.0;

  Eigen::Index dim() const noexcept { return r1.size(); }
  /// Throws InvalidArgument on inconsistent shapes.
  void validate() const;
  /// Both Q matrices pass the is_positive_definite() test.
  bool pd_ok() const;

  double cost1(const Vector& x1, const Vector& x2) const { return x1.dot(q1 * x2) - x1.dot(r1) + v1; }
  double cost2(const Vector& x1, const Vector& x2) const { return x2.dot(q2 * x1) - x2.dot(r2) + v2; }
};

/// Same fields, reduced dimension K.
using ReducedQuadGame2P = QuadGame2P;

class ReductionPair {
 public:
  /// Both maps must be K x M with full row rank; throws InvalidArgument.
  ReductionPair(LinearReductionMap a1, LinearReductionMap a2);

  const LinearReductionMap& a1() const noexcept { return a1_; }
  const LinearReductionMap& a2() const noexcept { return a2_; }
  /// Identical effective matrices.
  bool same_map() const noexcept { return same_map_; }

  Eigen::Index reduced_dim() const noexcept { return a1_.rows(); }
  Eigen::Index ambient_dim() const noexcept { return a1_.cols(); }

  const Matrix& matrix1() const noexcept { return m1_; }
  const Matrix& matrix2() const noexcept { return m2_; }
  const RowSpaceSolver& solver1() const noexcept { return s1_; }
  const RowSpaceSolver& solver2() const noexcept { return s2_; }

 private:
  LinearReductionMap a1_;
  LinearReductionMap a2_;
  Matrix m1_;
  Matrix m2_;
  RowSpaceSolver s1_;
  RowSpaceSolver s2_;
  bool same_map_;
};

inline constexpr double kSingularConditionLimit = 1e12;

struct NashEquilibrium2P {
  Vector x1;
  Vector x2;
  double condition_q1 = 0.0;
  double condition_q2 = 0.0;
  /// ||Q1 x2 - r1|| and ||Q2 x1 - r2||.
  double residual1 = 0.0;
  double residual2 = 0.0;
};

/// x1* = Q2^{-1} r2 and x2* = Q1^{-1} r1. Each player's equilibrium action is
/// fixed by the other player's parameters, so x1* is computed from (Q2, r2)
/// alone. Throws SingularMatrix (naming "Q1" or "Q2") when the condition
/// number exceeds kSingularConditionLimit.
NashEquilibrium2P closed_form_ne(const QuadGame2P& game);

struct ReductionResult {
  ReducedQuadGame2P reduced;
  /// ||A1' r1~ - r1|| and ||A2' r2~ - r2||: zero iff r_i lies in the row
  /// space of A_i.
  double lift_residual1 = 0.0;
  double lift_residual2 = 0.0;
};

/// Q1~ = (A1 A1')^{-1} A1 Q1 A2' (A2 A2')^{-1}, Q2~ with the roles of the
/// maps swapped, r_i~ the least-squares solution of A_i' r_i~ = r_i.
ReductionResult reduce_game(const QuadGame2P& game, const ReductionPair& maps);

/// Q1 = A1' Q1~ A2, Q2 = A2' Q2~ A1, r_i = A_i' r_i~. The lifted game
/// satisfies J_i(x1, x2) = J_i~(A1 x1, A2 x2) identically.
QuadGame2P lift_game(const ReducedQuadGame2P& reduced, const ReductionPair& maps);

/// R~ = (A A')^{-1} A R. With Q = R R' and a shared map A, R~ R~' equals the
/// reduced Q~.
Matrix cholesky_transport(const Matrix& r, const LinearReductionMap& a);

struct PdProbeReport {
  bool reduced_pd = false;
  /// Smallest eigenvalue of the symmetric part of Q~.
  double min_eig = 0.0;
  double max_eig = 0.0;
};

/// Reduces Q with Q~ = (A1 A1')^{-1} A1 Q A2' (A2 A2')^{-1} and tests the
/// symmetric part of Q~. With a shared map this is a congruence and Q~ stays
/// positive definite; with distinct maps it need not.
/// Throws InvalidArgument if Q is not positive definite.
PdProbeReport pd_preservation_probe(const Matrix& q, const ReductionPair& maps);

/// Q = B B' + shift * I with B ~ N(0,1) entries, from `seed`.
Matrix random_pd_matrix(Eigen::Index dim, std::uint64_t seed, double shift = 1.0);
/// Random PD Q1, Q2, N(0,1) r1, r2, uniform v1, v2.
QuadGame2P random_quad_game(Eigen::Index dim, std::uint64_t seed);

/// Directory layout: Q1.csv, Q2.csv, r1.csv, r2.csv and meta.txt (dim, v1, v2).
void save_game(const QuadGame2P& game, const std::filesystem::path& dir);
QuadGame2P load_game(const std::filesystem::path& dir);

}  // namespace gamered
