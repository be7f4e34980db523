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

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "gamered/convexred.hpp"
#include "gamered/error.hpp"
#include "gamered/experiments.hpp"
#include "gamered/quadgame.hpp"
#include "gamered/rng.hpp"
#include "oracles.hpp"

namespace gamered {
namespace {

Vector random_vector(Eigen::Index n, std::uint64_t seed) { return gaussian_points(1, n, seed).row(0).transpose(); }

SmoothGame single_player(Eigen::Index dim, CostFn cost, double half = 10.0) {
  PlayerSpec p;
  p.dim = dim;
  p.cost = std::move(cost);
  p.box = Box::uniform(dim, -half, half);
  return SmoothGame({p});
}

// J(x) = g(A x) for one player.
SmoothGame composed_game(const LinearReductionMap& a, std::function<double(const Vector&)> g) {
  const Matrix am = a.effective();
  return single_player(a.cols(), [am, g](const JointDecision& x) { return g(am * x[0]); });
}

TEST(SmoothGame, Validation) {
  EXPECT_THROW(SmoothGame({}), InvalidArgument);
  PlayerSpec p;
  p.dim = 2;
  p.box = Box::uniform(2, 0, 1);
  EXPECT_THROW(SmoothGame({p}), InvalidArgument);  // no cost
  p.cost = [](const JointDecision& x) { return x[0].sum(); };
  p.box.lower(0) = 2;
  EXPECT_THROW(SmoothGame({p}), InvalidArgument);
  p.box = Box::uniform(3, 0, 1);
  EXPECT_THROW(SmoothGame({p}), InvalidArgument);
  p.box = Box::uniform(2, 0, 1);
  const SmoothGame g({p});
  EXPECT_THROW(g.check_joint({Vector::Zero(3)}), InvalidArgument);
  EXPECT_THROW(g.check_joint({Vector::Zero(2), Vector::Zero(2)}), InvalidArgument);
}

TEST(SmoothGame, AnalyticGradientsAgreeWithDifferences) {
  const auto g = games::logsumexp_game(random_vector(4, 1), random_vector(4, 2), 0.7, 3.0);
  EXPECT_LE(g.gradient_mismatch(20, 5), 1e-4);
  const auto q = games::coupled_quadratic(random_vector(3, 3), random_vector(3, 4), 0.5, true, 2.0);
  EXPECT_LE(q.gradient_mismatch(20, 6), 1e-4);
  const auto x = g.sample_in_boxes(9);
  for (std::size_t i = 0; i < 2; ++i) {
    const Matrix hn = numeric_own_hessian(g.player(i).cost, x, i, 1e-4);
    EXPECT_LE((hn - g.own_hessian(i, x)).norm(), 1e-4 * g.own_hessian(i, x).norm());
  }
}

TEST(TransportGradient, BlockIdentity) {
  RowMatrix a = RowMatrix::Zero(3, 7);
  a.leftCols(3).setIdentity();
  const auto m = LinearReductionMap::from_matrix(MapKind::gaussian, a, 1.0);
  const Vector g = random_vector(7, 1);
  EXPECT_LE((transport_gradient(m, g) - g.head(3)).norm(), 1e-15);
}

TEST(TransportGradient, RoundTripOnRowSpace) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = make_map(MapKind::gaussian, 5, 30, seed);
    const Vector h = random_vector(5, seed + 100);
    EXPECT_LE((transport_gradient(a, a.effective().transpose() * h) - h).norm(), 1e-10);
  }
  EXPECT_THROW(transport_gradient(make_map(MapKind::gaussian, 2, 4, 0), Vector::Zero(5)), InvalidArgument);
}

TEST(TransportGradient, QuadraticComposition) {
  const auto a = make_map(MapKind::sign, 4, 12, 3);
  const Matrix am = a.effective();
  const Vector x = random_vector(12, 4);
  // g(y) = 1/2 |y|^2: grad J(x) = A'A x and grad g(Ax) = A x.
  EXPECT_LE((transport_gradient(a, am.transpose() * am * x) - am * x).norm(), 1e-10);
}

TEST(TransportHessian, OrthonormalRowsAndCancellation) {
  const auto sel = make_map(MapKind::selection, 3, 8, 2);
  EXPECT_LE(max_abs_diff(transport_hessian(sel, Matrix::Identity(8, 8)), Matrix::Identity(3, 3)), 1e-15);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = make_map(MapKind::gaussian, 4, 25, seed);
    const Matrix s = random_pd_matrix(4, seed) - 2.0 * Matrix::Identity(4, 4);
    const Matrix am = a.effective();
    EXPECT_LE(max_abs_diff(transport_hessian(a, am.transpose() * s * am), s), 1e-10);
  }
}

TEST(TransportHessian, RejectsAsymmetric) {
  const auto a = make_map(MapKind::gaussian, 2, 4, 0);
  Matrix h = Matrix::Identity(4, 4);
  h(0, 1) = 1e-3;
  EXPECT_THROW(transport_hessian(a, h), InvalidArgument);
  h(0, 1) = 1e-10;
  EXPECT_NO_THROW(transport_hessian(a, h));
}

TEST(TransportHessian, FiniteDifferenceComposition) {
  const auto a = make_map(MapKind::gaussian, 3, 10, 11);
  const Matrix s = random_pd_matrix(3, 12);
  const auto game = composed_game(a, [s](const Vector& y) { return 0.5 * y.dot(s * y); });
  const JointDecision x{random_vector(10, 13)};
  const Matrix t = transport_hessian(a, symmetric_part(game.own_hessian(0, x)));
  EXPECT_LE(max_abs_diff(t, s), 1e-4 * s.cwiseAbs().maxCoeff());
}

TEST(TaylorModel, QuadraticIsExact) {
  const Matrix s = random_pd_matrix(4, 1);
  const Vector b = random_vector(4, 2);
  const auto game = single_player(4, [s, b](const JointDecision& x) { return 0.5 * x[0].dot(s * x[0]) + b.dot(x[0]); });
  const JointDecision c{random_vector(4, 3) * 0.1};
  const auto model = taylor_model(game, c, 0.5);
  Rng rng(4);
  for (int k = 0; k < 100; ++k) {
    Vector d(4);
    for (auto& v : d) v = rng.normal();
    d *= 0.5 * rng.uniform() / d.norm();
    const Vector x = c[0] + d;
    EXPECT_NEAR(model.evaluate(0, x), game.cost(0, {x}), 1e-8);
  }
}

TEST(TaylorModel, CubicRemainderForExpQuadratic) {
  const auto game = single_player(3, [](const JointDecision& x) { return std::exp(x[0].squaredNorm()); });
  const double radius = 0.1;
  const JointDecision c{Vector::Zero(3)};
  const auto model = taylor_model(game, c, radius);
  Rng rng(5);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    Vector d(3);
    for (auto& v : d) v = rng.normal();
    d *= radius * rng.uniform() / d.norm();
    worst = std::max(worst, std::abs(model.evaluate(0, d) - game.cost(0, {d})));
  }
  EXPECT_LE(worst, 10 * radius * radius * radius);
}

TEST(TaylorModel, LinearCostHasZeroHessian) {
  const Vector b = random_vector(5, 1);
  const auto game = single_player(5, [b](const JointDecision& x) { return b.dot(x[0]); });
  const auto model = taylor_model(game, {Vector::Zero(5)}, 1.0);
  EXPECT_LE(model.hessians[0].cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE((model.gradients[0] - b).norm(), 1e-6);
  EXPECT_TRUE(model.hessians[0].isApprox(model.hessians[0].transpose()));
}

TEST(TaylorModel, BoundaryCenterRejected) {
  const auto game = single_player(2, [](const JointDecision& x) { return x[0].sum(); }, 1.0);
  EXPECT_THROW(taylor_model(game, {Vector::Constant(2, 1.0)}, 0.1), InvalidArgument);
  EXPECT_THROW(taylor_model(game, {Vector::Constant(2, 1.0 - 1e-6)}, 0.1), InvalidArgument);
  EXPECT_NO_THROW(taylor_model(game, {Vector::Constant(2, 0.99)}, 0.1));
}

// Two-player g_i(A1 x1, A2 x2) games and their reduced counterparts.
struct ComposedPair {
  SmoothGame original;
  SmoothGame reduced;
  std::vector<LinearReductionMap> maps;
};

ComposedPair composed_pair(double cubic) {
  std::vector<LinearReductionMap> maps{make_map(MapKind::gaussian, 2, 4, 1), make_map(MapKind::gaussian, 2, 4, 2)};
  const Matrix a1 = maps[0].effective(), a2 = maps[1].effective();
  auto g1 = [](const Vector& y1, const Vector& y2) { return logsumexp(y1 - 0.3 * y2) + 0.5 * y1.squaredNorm(); };
  auto g2 = [](const Vector& y1, const Vector& y2) { return std::exp(0.1 * y2.dot(y1)) + y2.squaredNorm(); };
  std::vector<PlayerSpec> orig(2), red(2);
  orig[0].cost = [=](const JointDecision& x) { return g1(a1 * x[0], a2 * x[1]) + cubic * std::pow(x[0](0), 3); };
  orig[1].cost = [=](const JointDecision& x) { return g2(a1 * x[0], a2 * x[1]); };
  red[0].cost = [=](const JointDecision& y) { return g1(y[0], y[1]); };
  red[1].cost = [=](const JointDecision& y) { return g2(y[0], y[1]); };
  for (auto* v : {&orig, &red}) {
    for (auto& p : *v) {
      p.dim = v == &orig ? 4 : 2;
      p.box = Box::uniform(p.dim, -5, 5);
    }
  }
  return {SmoothGame(orig), SmoothGame(red), maps};
}

TEST(LocalEquivalence, ExactCompositionHasNoGap) {
  const auto p = composed_pair(0.0);
  const auto gap = local_equivalence_gap(p.original, p.reduced, p.maps, {Vector::Zero(4), Vector::Zero(4)}, 0.5, 200, 3);
  EXPECT_LE(gap.delta_max, 1e-10);
  EXPECT_LE(gap.delta_mean, gap.delta_max);
}

TEST(LocalEquivalence, LiftedQuadraticGameHasNoGap) {
  const auto a1 = make_map(MapKind::gaussian, 3, 9, 5), a2 = make_map(MapKind::gaussian, 3, 9, 6);
  const QuadGame2P red = random_quad_game(3, 7);
  const QuadGame2P lifted = lift_game(red, ReductionPair(a1, a2));
  auto make = [](const QuadGame2P& q) {
    std::vector<PlayerSpec> ps(2);
    ps[0].cost = [q](const JointDecision& x) { return q.cost1(x[0], x[1]); };
    ps[1].cost = [q](const JointDecision& x) { return q.cost2(x[0], x[1]); };
    for (auto& p : ps) {
      p.dim = q.dim();
      p.box = Box::uniform(p.dim, -10, 10);
    }
    return SmoothGame(ps);
  };
  const JointDecision c{random_vector(9, 1), random_vector(9, 2)};
  const auto gap = local_equivalence_gap(make(lifted), make(red), {a1, a2}, c, 1.0, 100, 4);
  EXPECT_LE(gap.delta_max, 1e-10);
}

TEST(LocalEquivalence, CubicPerturbationScalesWithRadiusCubed) {
  const double c = 0.2;
  const auto p = composed_pair(c);
  for (double radius : {0.1, 0.05}) {
    const auto gap =
        local_equivalence_gap(p.original, p.reduced, p.maps, {Vector::Zero(4), Vector::Zero(4)}, radius, 500, 8);
    const double r3 = radius * radius * radius;
    EXPECT_GE(gap.delta_max, 0.1 * c * r3);
    EXPECT_LE(gap.delta_max, 10 * c * r3);
  }
}

TEST(BestResponse, DecoupledReachesClippedCentersInOneRound) {
  Vector c1(3), c2(3);
  c1 << 0.5, 3.0, -4.0;
  c2 << -0.2, 0.1, 2.5;
  const Box box = Box::uniform(3, -2, 2);
  const auto game = games::decoupled_quadratic({c1, c2}, {box, box});
  const auto res = ne_solve_best_response(game, {Vector::Zero(3), Vector::Zero(3)}, 1e-10, 50);
  ASSERT_TRUE(res.converged);
  // The first sweep lands on the equilibrium; the second only confirms it.
  EXPECT_EQ(res.rounds, 2);
  EXPECT_EQ(res.move_history.at(1), 0.0);
  EXPECT_LE((res.solution[0] - box.project(c1)).lpNorm<Eigen::Infinity>(), 1e-10);
  EXPECT_LE((res.solution[1] - box.project(c2)).lpNorm<Eigen::Infinity>(), 1e-10);
  EXPECT_FALSE(res.convexity_warning);
}

TEST(BestResponse, CoupledQuadraticMatchesLinearSystem) {
  for (bool anti : {false, true}) {
    const Vector b1 = random_vector(4, 1), b2 = random_vector(4, 2);
    const auto game = games::coupled_quadratic(b1, b2, 0.1, anti, 50.0);
    const double tol = 1e-9;
    const auto res = ne_solve_best_response(game, {Vector::Zero(4), Vector::Zero(4)}, tol, 100);
    ASSERT_TRUE(res.converged);
    const auto [x1, x2] = oracle::coupled_quadratic_ne(b1, b2, 0.1, anti ? -1.0 : 1.0);
    EXPECT_LE((res.solution[0] - x1).lpNorm<Eigen::Infinity>(), 1e-6);
    EXPECT_LE((res.solution[1] - x2).lpNorm<Eigen::Infinity>(), 1e-6);
    EXPECT_LE(projected_gradient_residual(game, res.solution), 10 * tol);
    // Residuals shrink monotonically after the first round, down to the
    // inner-solve floor.
    for (std::size_t k = 2; k < res.residual_history.size(); ++k) {
      EXPECT_LE(res.residual_history[k], std::max(res.residual_history[k - 1], 10 * tol));
    }
  }
}

TEST(BestResponse, DivergentCouplingReportsNonConvergence) {
  const auto game = games::coupled_quadratic(random_vector(3, 1), random_vector(3, 2), 2.0, true, 10.0);
  BestResponseResult res;
  ASSERT_NO_THROW(res = ne_solve_best_response(game, {Vector::Zero(3), Vector::Zero(3)}, 1e-8, 40));
  EXPECT_FALSE(res.converged);
  EXPECT_EQ(res.rounds, 40);
  EXPECT_EQ(res.solution.size(), 2u);
}

TEST(BestResponse, ConcaveCostRaisesWarningOnly) {
  PlayerSpec p;
  p.dim = 2;
  p.cost = [](const JointDecision& x) { return -x[0].squaredNorm(); };
  p.box = Box::uniform(2, -1, 1);
  const SmoothGame g({p});
  const auto res = ne_solve_best_response(g, {Vector::Constant(2, 0.3)}, 1e-8, 20);
  EXPECT_TRUE(res.convexity_warning);
  EXPECT_TRUE(res.converged);
  EXPECT_NEAR(res.solution[0].cwiseAbs().minCoeff(), 1.0, 1e-12);
}

TEST(BestResponse, Errors) {
  const auto game = games::coupled_quadratic(Vector::Zero(2), Vector::Zero(2), 0.5, false, 1.0);
  EXPECT_THROW(ne_solve_best_response(game, {Vector::Zero(2)}, 1e-8, 10), InvalidArgument);
  EXPECT_THROW(ne_solve_best_response(game, {Vector::Zero(2), Vector::Zero(2)}, 0.0, 10), InvalidArgument);
}

TEST(ConvexityProbe, Examples) {
  const auto a = make_map(MapKind::gaussian, 3, 8, 17);
  const auto sq = convexity_probe([](const Vector& x) { return x.squaredNorm(); }, a, 200, 1);
  EXPECT_TRUE(sq.original_convex_evidence);
  EXPECT_TRUE(sq.composed_convex_evidence);
  const auto neg = convexity_probe([](const Vector& x) { return -x.squaredNorm(); }, a, 200, 1);
  EXPECT_FALSE(neg.original_convex_evidence);
  const auto lse = convexity_probe([](const Vector& x) { return logsumexp(x); }, a, 1000, 2);
  EXPECT_TRUE(lse.original_convex_evidence);
  EXPECT_TRUE(lse.composed_convex_evidence);
}

TEST(ConvexityProbe, PreservedUnderAnyLinearMap) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (MapKind kind : {MapKind::gaussian, MapKind::sign, MapKind::selection}) {
      const auto a = make_map(kind, 4, 10, seed);
      const auto ev = convexity_probe([](const Vector& x) { return logsumexp(x) + x.cwiseAbs().sum(); }, a, 100, seed);
      EXPECT_TRUE(ev.composed_convex_evidence);
      EXPECT_LE(ev.worst_composed, 1e-9);
    }
  }
}

TEST(LogSumExp, StableAndConsistent) {
  Vector v(3);
  v << 1000, 1000, 1000;
  EXPECT_NEAR(logsumexp(v), 1000 + std::log(3.0), 1e-12);
  EXPECT_NEAR(softmax(v).sum(), 1.0, 1e-15);
  const Vector w = random_vector(5, 3);
  const Vector fd = oracle::fd_gradient([](const Vector& x) { return logsumexp(x); }, w, 1e-6);
  EXPECT_LE((fd - softmax(w)).norm(), 1e-8);
}

}  // namespace
}  // namespace gamered
