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

#include "gamered/quadgame.hpp"

#include <string>

#include "gamered/error.hpp"
#include "gamered/io.hpp"
#include "gamered/rng.hpp"

namespace gamered {
namespace {

void require_square(const Matrix& m, Eigen::Index dim, const char* name) {
  if (m.rows() != dim || m.cols() != dim) {
    throw InvalidArgument(std::string(name) + " must be " + std::to_string(dim) + " x " + std::to_string(dim) +
                          ", got " + std::to_string(m.rows()) + " x " + std::to_string(m.cols()));
  }
}

Vector solve_checked(const Matrix& q, const Vector& r, const char* name, double& condition) {
  condition = condition_number(q);
  if (!(condition <= kSingularConditionLimit)) throw SingularMatrix(name, condition);
  return q.partialPivLu().solve(r);
}

// S = (A A')^{-1} A applied from the left to every column of B.
Matrix left_reduce(const RowSpaceSolver& s, const Matrix& b) { return s.apply(b); }

LinearReductionMap with_shape_of(const LinearReductionMap& ref, LinearReductionMap m) {
  if (ref.rows() != m.rows() || ref.cols() != m.cols()) {
    throw InvalidArgument("reduction maps must have equal shapes");
  }
  return m;
}

}  // namespace

void QuadGame2P::validate() const {
  const Eigen::Index m = dim();
  if (m < 1) throw InvalidArgument("quadratic game dimension must be positive");
  require_square(q1, m, "Q1");
  require_square(q2, m, "Q2");
  if (r2.size() != m) throw InvalidArgument("r2 must have length " + std::to_string(m));
}

bool QuadGame2P::pd_ok() const { return is_positive_definite(q1) && is_positive_definite(q2); }

ReductionPair::ReductionPair(LinearReductionMap a1, LinearReductionMap a2)
    : a1_(std::move(a1)),
      a2_(with_shape_of(a1_, std::move(a2))),
      m1_(a1_.effective()),
      m2_(a2_.effective()),
      s1_(m1_, "A1"),
      s2_(m2_, "A2"),
      same_map_(m1_ == m2_) {}

NashEquilibrium2P closed_form_ne(const QuadGame2P& game) {
  game.validate();
  NashEquilibrium2P ne;
  ne.x1 = solve_checked(game.q2, game.r2, "Q2", ne.condition_q2);
  ne.x2 = solve_checked(game.q1, game.r1, "Q1", ne.condition_q1);
  ne.residual1 = (game.q1 * ne.x2 - game.r1).norm();
  ne.residual2 = (game.q2 * ne.x1 - game.r2).norm();
  return ne;
}

ReductionResult reduce_game(const QuadGame2P& game, const ReductionPair& maps) {
  game.validate();
  if (game.dim() != maps.ambient_dim()) {
    throw InvalidArgument("game dimension " + std::to_string(game.dim()) + " does not match map columns " +
                          std::to_string(maps.ambient_dim()));
  }
  const auto& s1 = maps.solver1();
  const auto& s2 = maps.solver2();
  ReductionResult out;
  // S1 Q1 S2' = S1 (S2 Q1')'
  out.reduced.q1 = left_reduce(s1, left_reduce(s2, game.q1.transpose()).transpose());
  out.reduced.q2 = left_reduce(s2, left_reduce(s1, game.q2.transpose()).transpose());
  out.reduced.r1 = s1.apply(game.r1);
  out.reduced.r2 = s2.apply(game.r2);
  out.reduced.v1 = game.v1;
  out.reduced.v2 = game.v2;
  out.lift_residual1 = (maps.matrix1().transpose() * out.reduced.r1 - game.r1).norm();
  out.lift_residual2 = (maps.matrix2().transpose() * out.reduced.r2 - game.r2).norm();
  return out;
}

QuadGame2P lift_game(const ReducedQuadGame2P& reduced, const ReductionPair& maps) {
  reduced.validate();
  if (reduced.dim() != maps.reduced_dim()) {
    throw InvalidArgument("reduced game dimension " + std::to_string(reduced.dim()) + " does not match map rows " +
                          std::to_string(maps.reduced_dim()));
  }
  const Matrix& a1 = maps.matrix1();
  const Matrix& a2 = maps.matrix2();
  QuadGame2P g;
  g.q1 = a1.transpose() * reduced.q1 * a2;
  g.q2 = a2.transpose() * reduced.q2 * a1;
  g.r1 = a1.transpose() * reduced.r1;
  g.r2 = a2.transpose() * reduced.r2;
  g.v1 = reduced.v1;
  g.v2 = reduced.v2;
  return g;
}

Matrix cholesky_transport(const Matrix& r, const LinearReductionMap& a) {
  if (r.rows() != a.cols()) {
    throw InvalidArgument("cholesky_transport: factor has " + std::to_string(r.rows()) + " rows, map expects " +
                          std::to_string(a.cols()));
  }
  const RowSpaceSolver s(a.effective(), "A");
  return s.apply(r);
}

PdProbeReport pd_preservation_probe(const Matrix& q, const ReductionPair& maps) {
  require_square(q, maps.ambient_dim(), "Q");
  if (!is_positive_definite(q)) throw InvalidArgument("pd_preservation_probe: Q is not positive definite");
  const Matrix qt = left_reduce(maps.solver1(), left_reduce(maps.solver2(), q.transpose()).transpose());
  const EigenRange e = eigen_range(qt);
  return {e.max > 0.0 && e.min > kRankTolerance * e.max, e.min, e.max};
}

Matrix random_pd_matrix(Eigen::Index dim, std::uint64_t seed, double shift) {
  Rng rng(seed);
  Matrix b(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) b(i, j) = rng.normal();
  Matrix q = b * b.transpose() / static_cast<double>(dim);
  q.diagonal().array() += shift;
  return q;
}

QuadGame2P random_quad_game(Eigen::Index dim, std::uint64_t seed) {
  QuadGame2P g;
  g.q1 = random_pd_matrix(dim, derive_seed(seed, {1}));
  g.q2 = random_pd_matrix(dim, derive_seed(seed, {2}));
  Rng rng(derive_seed(seed, {3}));
  g.r1.resize(dim);
  g.r2.resize(dim);
  for (Eigen::Index i = 0; i < dim; ++i) g.r1(i) = rng.normal();
  for (Eigen::Index i = 0; i < dim; ++i) g.r2(i) = rng.normal();
  g.v1 = rng.uniform();
  g.v2 = rng.uniform();
  return g;
}

void save_game(const QuadGame2P& game, const std::filesystem::path& dir) {
  game.validate();
  std::filesystem::create_directories(dir);
  io::write_matrix_csv(dir / "Q1.csv", game.q1);
  io::write_matrix_csv(dir / "Q2.csv", game.q2);
  io::write_vector_csv(dir / "r1.csv", game.r1);
  io::write_vector_csv(dir / "r2.csv", game.r2);
  io::write_key_values(dir / "meta.txt", {{"dim", std::to_string(game.dim())},
                                          {"v1", io::format_real(game.v1)},
                                          {"v2", io::format_real(game.v2)}});
}

QuadGame2P load_game(const std::filesystem::path& dir) {
  const auto meta_path = dir / "meta.txt";
  const auto meta = io::read_key_values(meta_path);
  const auto get = [&](const char* key) {
    const auto it = meta.find(key);
    if (it == meta.end()) throw ParseError(meta_path.string(), 0, std::string("missing key '") + key + "'");
    return it->second;
  };
  QuadGame2P g;
  g.q1 = io::read_matrix_csv(dir / "Q1.csv");
  g.q2 = io::read_matrix_csv(dir / "Q2.csv");
  g.r1 = io::read_vector_csv(dir / "r1.csv");
  g.r2 = io::read_vector_csv(dir / "r2.csv");
  g.v1 = io::parse_real(get("v1"), meta_path.string(), 0);
  g.v2 = io::parse_real(get("v2"), meta_path.string(), 0);
  const long long dim = std::stoll(get("dim"));
  if (dim != g.dim()) throw ParseError(meta_path.string(), 0, "dim does not match r1.csv length");
  g.validate();
  return g;
}

}  // namespace gamered
