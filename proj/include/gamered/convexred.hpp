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

// Convex N-player games and their reductions: gradient/Hessian transport
// through a linear map, local second-order models, a sampled equivalence gap
// between an original and a reduced game, convexity probes and a
// Gauss-Seidel best-response Nash solver over box decision sets.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gamered/linalg.hpp"
#include "gamered/randmaps.hpp"

namespace gamered {

/// One decision vector per player.
using JointDecision = std::vector<Vector>;
using CostFn = std::function<double(const JointDecision&)>;
/// Gradient / Hessian of a player's cost with respect to its own block.
using OwnGradientFn = std::function<Vector(const JointDecision&)>;
using OwnHessianFn = std::function<Matrix(const JointDecision&)>;

struct Box {
  Vector lower;
  Vector upper;

  static Box uniform(Eigen::Index dim, double lo, double hi);
  Vector project(const Vector& x) const { return x.cwiseMax(lower).cwiseMin(upper); }
  /// Smallest distance from x to a face of the box (negative outside).
  double interior_margin(const Vector& x) const;
};

struct PlayerSpec {
  Eigen::Index dim = 0;
  CostFn cost;
  OwnGradientFn gradient;  // optional
  OwnHessianFn hessian;    // optional
  Box box;
};

struct FiniteDifferenceSteps {
  double gradient = 1e-5;
  double hessian = 1e-4;
};

/// Central difference of the player's cost along its own coordinates.
Vector numeric_own_gradient(const CostFn& cost, const JointDecision& x, std::size_t player, double h);
/// Four-point central second differences, symmetrised.
Matrix numeric_own_hessian(const CostFn& cost, const JointDecision& x, std::size_t player, double h);

class SmoothGame {
 public:
  /// Throws InvalidArgument for empty games, missing costs, or boxes with
  /// lower > upper or mismatched lengths.
  explicit SmoothGame(std::vector<PlayerSpec> players);

  std::size_t n_players() const noexcept { return players_.size(); }
  const PlayerSpec& player(std::size_t i) const { return players_.at(i); }
  std::vector<Eigen::Index> dims() const;

  /// Throws InvalidArgument if x has the wrong block count or block sizes.
  void check_joint(const JointDecision& x) const;

  double cost(std::size_t i, const JointDecision& x) const { return players_[i].cost(x); }
  /// Analytic when supplied, central differences otherwise.
  Vector own_gradient(std::size_t i, const JointDecision& x, const FiniteDifferenceSteps& fd = {}) const;
  Matrix own_hessian(std::size_t i, const JointDecision& x, const FiniteDifferenceSteps& fd = {}) const;

  /// Largest relative mismatch between analytic gradients and central
  /// differences over `samples` points drawn uniformly from the boxes.
  /// Zero when no analytic gradients are supplied.
  double gradient_mismatch(int samples, std::uint64_t seed, double h = 1e-5) const;

  JointDecision sample_in_boxes(std::uint64_t seed) const;

 private:
  std::vector<PlayerSpec> players_;
};

/// (A A')^{-1} A g, by a QR-based solve. Throws InvalidArgument for a
/// rank-deficient map or a length mismatch.
Vector transport_gradient(const LinearReductionMap& a, const Vector& g);

/// (A A')^{-1} A H A' (A A')^{-1}, symmetrised. H must be symmetric within
/// 1e-8 (relative to its largest entry, absolute below 1).
Matrix transport_hessian(const LinearReductionMap& a, const Matrix& h);

struct LocalQuadraticModel {
  JointDecision center;
  std::vector<double> values;
  std::vector<Vector> gradients;
  std::vector<Matrix> hessians;
  double radius = 0.0;

  /// value + g'(x - c) + 1/2 (x - c)' H (x - c) for player i moving its own
  /// block to `own` while the others stay at the center.
  double evaluate(std::size_t player, const Vector& own) const;
};

/// Second-order expansion of every player's cost in its own block at
/// `center`. Throws InvalidArgument if the center is not inside every box by
/// at least the larger finite-difference step.
LocalQuadraticModel taylor_model(const SmoothGame& game, const JointDecision& center, double radius,
                                 const FiniteDifferenceSteps& fd = {});

struct EquivalenceGap {
  double delta_max = 0.0;
  double delta_mean = 0.0;
  std::vector<double> per_player_max;
  std::vector<double> per_player_mean;
};

/// Samples joint decisions uniformly from the ball of `radius` around
/// `center` and measures |J_i(x) - J~_i(A_1 x_1, ..., A_N x_N)|.
EquivalenceGap local_equivalence_gap(const SmoothGame& original, const SmoothGame& reduced,
                                     const std::vector<LinearReductionMap>& maps, const JointDecision& center,
                                     double radius, int samples, std::uint64_t seed);

struct BestResponseOptions {
  int max_inner_iterations = 1000;
  double armijo = 1e-4;
  int max_backtracks = 60;
  /// Sampled own-Hessian PSD check; a violation only sets convexity_warning.
  int convexity_samples = 3;
  double convexity_tolerance = -1e-8;
  std::uint64_t seed = 0;
  FiniteDifferenceSteps fd;
};

struct BestResponseResult {
  JointDecision solution;
  /// Sweeps executed, including the final one that confirmed convergence.
  int rounds = 0;
  /// Largest per-player projected-gradient residual ||x - P(x - grad)||_inf.
  double residual = 0.0;
  bool converged = false;
  bool convexity_warning = false;
  /// Max-norm joint move of each sweep.
  std::vector<double> move_history;
  std::vector<double> residual_history;
};

/// Gauss-Seidel best response: each sweep lets players 1..N in turn minimise
/// their own cost over their box by projected gradient with backtracking
/// (step 1, halving, Armijo constant from options) until the projected
/// gradient falls below tol / 10. Converged when a sweep moves the joint
/// decision by less than tol in max-norm; otherwise the last iterate is
/// returned with converged = false.
BestResponseResult ne_solve_best_response(const SmoothGame& game, const JointDecision& init, double tol,
                                          int max_rounds, const BestResponseOptions& options = {});

/// Projected-gradient residual of every player at x, maximised.
double projected_gradient_residual(const SmoothGame& game, const JointDecision& x,
                                   const FiniteDifferenceSteps& fd = {});

struct ConvexityEvidence {
  bool original_convex_evidence = false;
  bool composed_convex_evidence = false;
  /// Largest f((a+b)/2) - (f(a)+f(b))/2 seen; <= 1e-9 counts as convex.
  double worst_original = 0.0;
  double worst_composed = 0.0;
};

/// Midpoint-convexity test on `samples` random pairs (a, b) with their
/// midpoint, for `cost` on R^M and for the reduced cost y -> cost(A'(AA')^{-1} y)
/// on R^K. Points are standard normal.
ConvexityEvidence convexity_probe(const std::function<double(const Vector&)>& cost, const LinearReductionMap& a,
                                  int samples, std::uint64_t seed);

double logsumexp(const Vector& v);
Vector softmax(const Vector& v);

/// Built-in two-player test families.
namespace games {

/// J_i = ||x_i - c_i||^2 on the given boxes.
SmoothGame decoupled_quadratic(const std::vector<Vector>& centers, const std::vector<Box>& boxes);

/// J_1 = 1/2||x_1||^2 + k x_1'x_2 - b_1'x_1,
/// J_2 = 1/2||x_2||^2 + s k x_2'x_1 - b_2'x_2 with s = +1 (symmetric) or -1.
/// The best-response map has Lipschitz constant k.
SmoothGame coupled_quadratic(const Vector& b1, const Vector& b2, double coupling, bool antisymmetric,
                             double box_halfwidth);

/// J_i = logsumexp(x_i - k x_j) + 1/2||x_i - c_i||^2.
SmoothGame logsumexp_game(const Vector& c1, const Vector& c2, double coupling, double box_halfwidth);

}  // namespace games

}  // namespace gamered
