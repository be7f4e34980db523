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

#include "gamered/convexred.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gamered/error.hpp"
#include "gamered/rng.hpp"

namespace gamered {
namespace {

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

double projected_residual(const Box& box, const Vector& x, const Vector& g) {
  return inf_norm(x - box.project(x - g));
}

}  // namespace

Box Box::uniform(Eigen::Index dim, double lo, double hi) {
  return {Vector::Constant(dim, lo), Vector::Constant(dim, hi)};
}

double Box::interior_margin(const Vector& x) const {
  return std::min((x - lower).minCoeff(), (upper - x).minCoeff());
}

Vector numeric_own_gradient(const CostFn& cost, const JointDecision& x, std::size_t player, double h) {
  JointDecision probe = x;
  Vector& xi = probe[player];
  Vector g(xi.size());
  for (Eigen::Index k = 0; k < xi.size(); ++k) {
    const double orig = xi(k);
    xi(k) = orig + h;
    const double fp = cost(probe);
    xi(k) = orig - h;
    const double fm = cost(probe);
    xi(k) = orig;
    g(k) = (fp - fm) / (2.0 * h);
  }
  return g;
}

Matrix numeric_own_hessian(const CostFn& cost, const JointDecision& x, std::size_t player, double h) {
  JointDecision probe = x;
  Vector& xi = probe[player];
  const Eigen::Index m = xi.size();
  Matrix hess(m, m);
  const auto f_at = [&](Eigen::Index a, double da, Eigen::Index b, double db) {
    const double oa = xi(a);
    const double ob = xi(b);
    xi(a) += da;
    xi(b) += db;
    const double v = cost(probe);
    xi(a) = oa;
    xi(b) = ob;
    return v;
  };
  const double f0 = cost(probe);
  for (Eigen::Index a = 0; a < m; ++a) {
    hess(a, a) = (f_at(a, 2 * h, a, 0.0) - 2.0 * f0 + f_at(a, -2 * h, a, 0.0)) / (4.0 * h * h);
    for (Eigen::Index b = a + 1; b < m; ++b) {
      const double v = (f_at(a, h, b, h) - f_at(a, h, b, -h) - f_at(a, -h, b, h) + f_at(a, -h, b, -h)) / (4.0 * h * h);
      hess(a, b) = v;
      hess(b, a) = v;
    }
  }
  return hess;
}

SmoothGame::SmoothGame(std::vector<PlayerSpec> players) : players_(std::move(players)) {
  if (players_.empty()) throw InvalidArgument("a game needs at least one player");
  for (std::size_t i = 0; i < players_.size(); ++i) {
    const auto& p = players_[i];
    const std::string who = "player " + std::to_string(i);
    if (p.dim < 1) throw InvalidArgument(who + ": decision dimension must be positive");
    if (!p.cost) throw InvalidArgument(who + ": missing cost evaluator");
    if (p.box.lower.size() != p.dim || p.box.upper.size() != p.dim) {
      throw InvalidArgument(who + ": box bounds must have length " + std::to_string(p.dim));
    }
    if (!(p.box.lower.array() <= p.box.upper.array()).all()) throw InvalidArgument(who + ": box has lower > upper");
    if (!p.box.lower.allFinite() || !p.box.upper.allFinite()) throw InvalidArgument(who + ": box must be bounded");
  }
}

std::vector<Eigen::Index> SmoothGame::dims() const {
  std::vector<Eigen::Index> d;
  for (const auto& p : players_) d.push_back(p.dim);
  return d;
}

void SmoothGame::check_joint(const JointDecision& x) const {
  if (x.size() != players_.size()) {
    throw InvalidArgument("joint decision has " + std::to_string(x.size()) + " blocks, game has " +
                          std::to_string(players_.size()) + " players");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != players_[i].dim) {
      throw InvalidArgument("block " + std::to_string(i) + " has length " + std::to_string(x[i].size()) +
                            ", expected " + std::to_string(players_[i].dim));
    }
  }
}

Vector SmoothGame::own_gradient(std::size_t i, const JointDecision& x, const FiniteDifferenceSteps& fd) const {
  const auto& p = players_.at(i);
  return p.gradient ? p.gradient(x) : numeric_own_gradient(p.cost, x, i, fd.gradient);
}

Matrix SmoothGame::own_hessian(std::size_t i, const JointDecision& x, const FiniteDifferenceSteps& fd) const {
  const auto& p = players_.at(i);
  return p.hessian ? p.hessian(x) : numeric_own_hessian(p.cost, x, i, fd.hessian);
}

JointDecision SmoothGame::sample_in_boxes(std::uint64_t seed) const {
  Rng rng(seed);
  JointDecision x;
  for (const auto& p : players_) {
    Vector v(p.dim);
    for (Eigen::Index k = 0; k < p.dim; ++k) v(k) = p.box.lower(k) + rng.uniform() * (p.box.upper(k) - p.box.lower(k));
    x.push_back(std::move(v));
  }
  return x;
}

double SmoothGame::gradient_mismatch(int samples, std::uint64_t seed, double h) const {
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const JointDecision x = sample_in_boxes(derive_seed(seed, {static_cast<std::uint64_t>(s)}));
    for (std::size_t i = 0; i < players_.size(); ++i) {
      if (!players_[i].gradient) continue;
      const Vector ga = players_[i].gradient(x);
      const Vector gn = numeric_own_gradient(players_[i].cost, x, i, h);
      worst = std::max(worst, (ga - gn).norm() / std::max(1.0, ga.norm()));
    }
  }
  return worst;
}

Vector transport_gradient(const LinearReductionMap& a, const Vector& g) {
  if (g.size() != a.cols()) {
    throw InvalidArgument("transport_gradient: gradient length " + std::to_string(g.size()) + " != map columns " +
                          std::to_string(a.cols()));
  }
  return RowSpaceSolver(a.effective(), "A").apply(g);
}

Matrix transport_hessian(const LinearReductionMap& a, const Matrix& h) {
  if (h.rows() != a.cols() || h.cols() != a.cols()) {
    throw InvalidArgument("transport_hessian: Hessian must be " + std::to_string(a.cols()) + " x " +
                          std::to_string(a.cols()));
  }
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw InvalidArgument("transport_hessian: Hessian is not symmetric");
  }
  const RowSpaceSolver s(a.effective(), "A");
  // S H S' = S (S H')'
  return symmetric_part(s.apply(Matrix(s.apply(Matrix(h.transpose())).transpose())));
}

double LocalQuadraticModel::evaluate(std::size_t player, const Vector& own) const {
  const Vector d = own - center.at(player);
  return values[player] + gradients[player].dot(d) + 0.5 * d.dot(hessians[player] * d);
}

LocalQuadraticModel taylor_model(const SmoothGame& game, const JointDecision& center, double radius,
                                 const FiniteDifferenceSteps& fd) {
  game.check_joint(center);
  if (!(radius > 0.0)) throw InvalidArgument("taylor_model: radius must be positive");
  const double step = std::max(fd.gradient, 2.0 * fd.hessian);
  for (std::size_t i = 0; i < game.n_players(); ++i) {
    if (game.player(i).box.interior_margin(center[i]) < step) {
      throw InvalidArgument("taylor_model: center of player " + std::to_string(i) +
                            " is on or too close to the box boundary");
    }
  }
  LocalQuadraticModel m;
  m.center = center;
  m.radius = radius;
  for (std::size_t i = 0; i < game.n_players(); ++i) {
    m.values.push_back(game.cost(i, center));
    m.gradients.push_back(game.own_gradient(i, center, fd));
    m.hessians.push_back(symmetric_part(game.own_hessian(i, center, fd)));
  }
  return m;
}

EquivalenceGap local_equivalence_gap(const SmoothGame& original, const SmoothGame& reduced,
                                     const std::vector<LinearReductionMap>& maps, const JointDecision& center,
                                     double radius, int samples, std::uint64_t seed) {
  original.check_joint(center);
  const std::size_t n = original.n_players();
  if (reduced.n_players() != n || maps.size() != n) {
    throw InvalidArgument("local_equivalence_gap: player counts of games and maps differ");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (maps[i].cols() != original.player(i).dim || maps[i].rows() != reduced.player(i).dim) {
      throw InvalidArgument("local_equivalence_gap: map " + std::to_string(i) + " does not match player dimensions");
    }
  }
  if (samples < 1) throw InvalidArgument("local_equivalence_gap: samples must be positive");

  Eigen::Index total = 0;
  for (const auto& c : center) total += c.size();
  EquivalenceGap gap;
  gap.per_player_max.assign(n, 0.0);
  gap.per_player_mean.assign(n, 0.0);
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    Vector dir(total);
    for (Eigen::Index k = 0; k < total; ++k) dir(k) = rng.normal();
    const double len = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(total)) / dir.norm();
    JointDecision x = center;
    JointDecision y(n);
    Eigen::Index off = 0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += len * dir.segment(off, x[i].size());
      off += x[i].size();
      y[i] = apply_map(maps[i], x[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double d = std::abs(original.cost(i, x) - reduced.cost(i, y));
      gap.per_player_max[i] = std::max(gap.per_player_max[i], d);
      gap.per_player_mean[i] += d / samples;
    }
  }
  gap.delta_max = *std::max_element(gap.per_player_max.begin(), gap.per_player_max.end());
  double sum = 0.0;
  for (double v : gap.per_player_mean) sum += v;
  gap.delta_mean = sum / static_cast<double>(n);
  return gap;
}

double projected_gradient_residual(const SmoothGame& game, const JointDecision& x, const FiniteDifferenceSteps& fd) {
  double worst = 0.0;
  for (std::size_t i = 0; i < game.n_players(); ++i) {
    worst = std::max(worst, projected_residual(game.player(i).box, x[i], game.own_gradient(i, x, fd)));
  }
  return worst;
}

BestResponseResult ne_solve_best_response(const SmoothGame& game, const JointDecision& init, double tol,
                                          int max_rounds, const BestResponseOptions& opt) {
  game.check_joint(init);
  if (!(tol > 0.0)) throw InvalidArgument("ne_solve_best_response: tol must be positive");
  if (max_rounds < 1) throw InvalidArgument("ne_solve_best_response: max_rounds must be positive");

  BestResponseResult res;
  JointDecision x = init;
  for (std::size_t i = 0; i < game.n_players(); ++i) x[i] = game.player(i).box.project(x[i]);

  for (int s = 0; s < opt.convexity_samples; ++s) {
    const JointDecision probe = s == 0 ? x : game.sample_in_boxes(derive_seed(opt.seed, {static_cast<std::uint64_t>(s)}));
    for (std::size_t i = 0; i < game.n_players(); ++i) {
      const Matrix h = symmetric_part(game.own_hessian(i, probe, opt.fd));
      if (Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues()(0) < opt.convexity_tolerance) {
        res.convexity_warning = true;
      }
    }
  }

  const double inner_tol = tol / 10.0;
  for (int round = 0; round < max_rounds; ++round) {
    const JointDecision before = x;
    for (std::size_t i = 0; i < game.n_players(); ++i) {
      const Box& box = game.player(i).box;
      for (int it = 0; it < opt.max_inner_iterations; ++it) {
        const Vector g = game.own_gradient(i, x, opt.fd);
        if (projected_residual(box, x[i], g) <= inner_tol) break;
        const Vector xi = x[i];
        const double f0 = game.cost(i, x);
        double t = 1.0;
        bool accepted = false;
        for (int b = 0; b < opt.max_backtracks; ++b, t *= 0.5) {
          x[i] = box.project(xi - t * g);
          if (game.cost(i, x) <= f0 + opt.armijo * g.dot(x[i] - xi)) {
            accepted = true;
            break;
          }
        }
        if (!accepted) {
          x[i] = xi;
          break;
        }
      }
    }
    double move = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) move = std::max(move, inf_norm(x[i] - before[i]));
    res.move_history.push_back(move);
    res.residual_history.push_back(projected_gradient_residual(game, x, opt.fd));
    res.rounds = round + 1;
    if (move < tol) {
      res.converged = true;
      break;
    }
  }
  res.residual = res.residual_history.back();
  res.solution = std::move(x);
  return res;
}

ConvexityEvidence convexity_probe(const std::function<double(const Vector&)>& cost, const LinearReductionMap& a,
                                  int samples, std::uint64_t seed) {
  const RowSpaceSolver solver(a.effective(), "A");
  const auto composed = [&](const Vector& y) { return cost(solver.lift(y)); };
  const auto worst_gap = [&](const auto& f, Eigen::Index dim, Rng& rng) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
      Vector p(dim), q(dim);
      for (Eigen::Index k = 0; k < dim; ++k) p(k) = rng.normal();
      for (Eigen::Index k = 0; k < dim; ++k) q(k) = rng.normal();
      worst = std::max(worst, f(Vector(0.5 * (p + q))) - 0.5 * (f(p) + f(q)));
    }
    return worst;
  };
  Rng rng_orig(derive_seed(seed, {0}));
  Rng rng_comp(derive_seed(seed, {1}));
  ConvexityEvidence ev;
  ev.worst_original = worst_gap(cost, a.cols(), rng_orig);
  ev.worst_composed = worst_gap(composed, a.rows(), rng_comp);
  ev.original_convex_evidence = ev.worst_original <= 1e-9;
  ev.composed_convex_evidence = ev.worst_composed <= 1e-9;
  return ev;
}

double logsumexp(const Vector& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

Vector softmax(const Vector& v) {
  const Vector e = (v.array() - v.maxCoeff()).exp();
  return e / e.sum();
}

namespace games {

SmoothGame decoupled_quadratic(const std::vector<Vector>& centers, const std::vector<Box>& boxes) {
  if (centers.size() != boxes.size()) throw InvalidArgument("decoupled_quadratic: centers and boxes differ in count");
  std::vector<PlayerSpec> players;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const Vector c = centers[i];
    PlayerSpec p;
    p.dim = c.size();
    p.cost = [i, c](const JointDecision& x) { return (x[i] - c).squaredNorm(); };
    p.gradient = [i, c](const JointDecision& x) -> Vector { return 2.0 * (x[i] - c); };
    p.hessian = [dim = c.size()](const JointDecision&) -> Matrix { return 2.0 * Matrix::Identity(dim, dim); };
    p.box = boxes[i];
    players.push_back(std::move(p));
  }
  return SmoothGame(std::move(players));
}

SmoothGame coupled_quadratic(const Vector& b1, const Vector& b2, double coupling, bool antisymmetric,
                             double box_halfwidth) {
  if (b1.size() != b2.size()) throw InvalidArgument("coupled_quadratic: b1 and b2 differ in length");
  const Eigen::Index m = b1.size();
  const double k1 = coupling;
  const double k2 = antisymmetric ? -coupling : coupling;
  std::vector<PlayerSpec> players(2);
  const Vector b[2] = {b1, b2};
  const double k[2] = {k1, k2};
  for (std::size_t i = 0; i < 2; ++i) {
    const std::size_t j = 1 - i;
    const Vector bi = b[i];
    const double ki = k[i];
    players[i].dim = m;
    players[i].cost = [i, j, bi, ki](const JointDecision& x) {
      return 0.5 * x[i].squaredNorm() + ki * x[i].dot(x[j]) - bi.dot(x[i]);
    };
    players[i].gradient = [i, j, bi, ki](const JointDecision& x) -> Vector { return x[i] + ki * x[j] - bi; };
    players[i].hessian = [m](const JointDecision&) -> Matrix { return Matrix::Identity(m, m); };
    players[i].box = Box::uniform(m, -box_halfwidth, box_halfwidth);
  }
  return SmoothGame(std::move(players));
}

SmoothGame logsumexp_game(const Vector& c1, const Vector& c2, double coupling, double box_halfwidth) {
  if (c1.size() != c2.size()) throw InvalidArgument("logsumexp_game: c1 and c2 differ in length");
  const Eigen::Index m = c1.size();
  std::vector<PlayerSpec> players(2);
  const Vector c[2] = {c1, c2};
  for (std::size_t i = 0; i < 2; ++i) {
    const std::size_t j = 1 - i;
    const Vector ci = c[i];
    players[i].dim = m;
    players[i].cost = [i, j, ci, coupling](const JointDecision& x) {
      return logsumexp(x[i] - coupling * x[j]) + 0.5 * (x[i] - ci).squaredNorm();
    };
    players[i].gradient = [i, j, ci, coupling](const JointDecision& x) -> Vector {
      return softmax(x[i] - coupling * x[j]) + (x[i] - ci);
    };
    players[i].hessian = [i, j, m, coupling](const JointDecision& x) -> Matrix {
      const Vector p = softmax(x[i] - coupling * x[j]);
      Matrix h = Matrix(p.asDiagonal()) - p * p.transpose();
      h += Matrix::Identity(m, m);
      return h;
    };
    players[i].box = Box::uniform(m, -box_halfwidth, box_halfwidth);
  }
  return SmoothGame(std::move(players));
}

}  // namespace games

}  // namespace gamered
