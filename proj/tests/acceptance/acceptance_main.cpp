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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "gamered/advgame.hpp"
#include "gamered/config.hpp"
#include "gamered/convexred.hpp"
#include "gamered/experiments.hpp"
#include "gamered/quadgame.hpp"
#include "gamered/randmaps.hpp"
#include "gamered/rng.hpp"
#include "gamered/svmcore.hpp"
#include "oracles.hpp"

namespace {

using namespace gamered;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  std::printf("%s [%d] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c, d);
  return buf;
}

bool kkt_ok(const SvmDualSolution& s, const RowMatrix& m, const Vector& y, double c) {
  const Vector w = m.transpose() * s.alpha.cwiseProduct(y);
  return s.alpha.minCoeff() >= -1e-10 && s.alpha.maxCoeff() <= c + 1e-10 &&
         std::abs(s.alpha.dot(y)) <= 1e-8 * (1 + s.alpha.sum()) && (w - s.w).norm() <= 1e-9 * (1 + w.norm());
}

Outcome jl_bound_criterion() {
  const double bound = jl_bound(0.5, 128);
  int meeting = 0;
  std::size_t seed0_count = 0;
  std::size_t seed0_oracle = 0;
  const auto t0 = Clock::now();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const RowMatrix pts = gaussian_points(1000, 512, derive_seed(seed, {1}));
    const auto map = make_map(MapKind::gaussian, 128, 512, derive_seed(seed, {0}));
    const auto rep = jl_check(pts, map, 0.5);
    if (rep.empirical_fraction >= bound) ++meeting;
    if (seed == 0) seed0_count = rep.pairs_preserved;
  }
  const double elapsed = seconds_since(t0);
  {
    const RowMatrix pts = gaussian_points(1000, 512, derive_seed(0, {1}));
    const auto map = make_map(MapKind::gaussian, 128, 512, derive_seed(0, {0}));
    const oracle::Mat reduced = pts * map.effective().transpose();
    seed0_oracle = oracle::count_preserved_pairs(pts, reduced, 0.5);
  }
  std::ostringstream d;
  d << meeting << "/100 seeds >= " << bound << ", elapsed " << elapsed << " s, seed-0 count " << seed0_count
    << " (oracle " << seed0_oracle << ")";
  return {meeting >= 95 && elapsed < 10.0 && seed0_count == seed0_oracle, d.str()};
}

Outcome quad_algebra_criterion() {
  const auto t0 = Clock::now();
  double worst_roundtrip = 0.0;
  double worst_cost = 0.0;
  for (std::uint64_t p = 0; p < 20; ++p) {
    const ReductionPair maps(make_map(MapKind::gaussian, 20, 500, derive_seed(p, {1})),
                             make_map(MapKind::gaussian, 20, 500, derive_seed(p, {2})));
    const auto reduced = random_quad_game(20, derive_seed(p, {3}));
    const auto lifted = lift_game(reduced, maps);
    const auto back = reduce_game(lifted, maps).reduced;
    worst_roundtrip = std::max({worst_roundtrip, max_abs_diff(back.q1, reduced.q1), max_abs_diff(back.q2, reduced.q2),
                                max_abs_diff(back.r1, reduced.r1), max_abs_diff(back.r2, reduced.r2)});
    if (p == 0) {
      for (std::uint64_t s = 0; s < 100; ++s) {
        const RowMatrix x = gaussian_points(2, 500, derive_seed(p, {4, s}));
        const Vector x1 = x.row(0).transpose(), x2 = x.row(1).transpose();
        const Vector y1 = apply_map(maps.a1(), x1), y2 = apply_map(maps.a2(), x2);
        worst_cost = std::max({worst_cost, std::abs(lifted.cost1(x1, x2) - reduced.cost1(y1, y2)),
                               std::abs(lifted.cost2(x1, x2) - reduced.cost2(y1, y2))});
      }
    }
  }
  const double elapsed = seconds_since(t0);
  return {worst_roundtrip <= 1e-10 && worst_cost <= 1e-10 && elapsed < 5.0,
          fmt("reduce(lift) max error %.3g, cost identity max error %.3g, %.2f s", worst_roundtrip, worst_cost,
              elapsed)};
}

Outcome closed_form_criterion() {
  double worst = 0.0;
  bool invariant = true;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Eigen::Index m = 5 + static_cast<Eigen::Index>((seed * 37) % 196);
    auto game = random_quad_game(m, derive_seed(seed, {1}));
    const auto ne = closed_form_ne(game);
    worst = std::max({worst, ne.residual1 / game.r1.norm(), ne.residual2 / game.r2.norm()});
    game.q1 = random_pd_matrix(m, derive_seed(seed, {2}));
    game.r1 = -2.0 * game.r1;
    const auto ne2 = closed_form_ne(game);
    invariant = invariant && ne2.x1.size() == ne.x1.size() &&
                std::memcmp(ne2.x1.data(), ne.x1.data(), sizeof(double) * static_cast<std::size_t>(m)) == 0;
  }
  return {worst <= 1e-8 && invariant,
          fmt("max relative residual %.3g, x1 bit-identical: ", worst) + (invariant ? "yes" : "no")};
}

Outcome transport_criterion() {
  double worst_g = 0.0, worst_h = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::Index k = 3 + static_cast<Eigen::Index>(seed % 5);
    const Eigen::Index m = 10 + static_cast<Eigen::Index>(seed % 4) * 5;
    const auto a = make_map(MapKind::gaussian, k, m, derive_seed(seed, {1}));
    const Matrix p = random_pd_matrix(k, derive_seed(seed, {2}), 0.5) / static_cast<double>(k);
    const Vector q = gaussian_points(1, k, derive_seed(seed, {3})).row(0).transpose();
    const auto g = [&](const Vector& y) {
      return logsumexp(y) + 0.5 * y.dot(p * y) + q.dot(y.array().sin().matrix());
    };
    const Matrix am = a.effective();
    const auto j = [&](const Vector& x) { return g(am * x); };
    const Vector x = 0.5 * gaussian_points(1, m, derive_seed(seed, {4})).row(0).transpose();
    const Vector y = am * x;
    const Vector grad_g = oracle::fd_gradient(g, y, 1e-5);
    const Matrix hess_g = oracle::fd_hessian(g, y, 1e-4);
    const Vector tg = transport_gradient(a, oracle::fd_gradient(j, x, 1e-5));
    const Matrix th = transport_hessian(a, symmetric_part(oracle::fd_hessian(j, x, 1e-4)));
    worst_g = std::max(worst_g, (tg - grad_g).norm() / std::max(1.0, grad_g.norm()));
    worst_h = std::max(worst_h, (th - hess_g).norm() / std::max(1.0, hess_g.norm()));
  }
  return {worst_g <= 1e-4 && worst_h <= 1e-4, fmt("gradient rel error %.3g, Hessian rel error %.3g", worst_g, worst_h)};
}

Outcome best_response_criterion() {
  double worst = 0.0;
  int max_rounds = 0;
  bool all_converged = true;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const bool anti = seed % 2 == 1;
    const RowMatrix b = gaussian_points(2, 5, derive_seed(seed, {1}));
    const Vector b1 = b.row(0).transpose(), b2 = b.row(1).transpose();
    const auto game = games::coupled_quadratic(b1, b2, 0.5, anti, 10.0);
    const auto res = ne_solve_best_response(game, {Vector::Zero(5), Vector::Zero(5)}, 1e-9, 50);
    const auto [o1, o2] = oracle::coupled_quadratic_ne(b1, b2, 0.5, anti ? -1.0 : 1.0);
    worst = std::max({worst, (res.solution[0] - o1).lpNorm<Eigen::Infinity>(),
                      (res.solution[1] - o2).lpNorm<Eigen::Infinity>()});
    max_rounds = std::max(max_rounds, res.rounds);
    all_converged = all_converged && res.converged;
  }
  return {all_converged && worst <= 1e-6 && max_rounds <= 50,
          fmt("max error %.3g, max rounds %.0f, all converged: ", worst, max_rounds) + (all_converged ? "yes" : "no")};
}

Outcome svm_criterion() {
  double worst = 0.0;
  bool kkt = true;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.below(7));
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.below(4));
    const double c = 0.1 + 5.0 * rng.uniform();
    LabeledDataset ds;
    ds.x = gaussian_points(n, d, derive_seed(seed, {1}));
    ds.y = Vector(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      ds.y(i) = i % 2 == 0 ? 1.0 : -1.0;
      ds.x(i, 0) += (seed % 2 == 0 ? 1.0 : 0.2) * ds.y(i);
    }
    const auto s = solve_dual(ds, c);
    worst = std::max(worst, std::abs(s.objective - oracle::brute_force_svm(ds.x, ds.y, c).objective));
    kkt = kkt && kkt_ok(s, ds.x, ds.y, c);
  }
  const auto synth = gen_synth(200, 50, 4.0, 1);
  const auto s = solve_dual(synth, 1.0);
  kkt = kkt && kkt_ok(s, synth.x, synth.y, 1.0);
  const double acc = training_accuracy(synth, s);
  return {worst <= 1e-6 && acc >= 0.95 && kkt,
          fmt("max objective gap %.3g, synthetic accuracy %.4f, KKT invariants: ", worst, acc) + (kkt ? "ok" : "violated")};
}

Outcome bound_chain_criterion() {
  const auto data = gen_synth(200, 50, 4.0, 7);
  const auto base = solve_dual(data, 1.0);
  const double mean_row = data.x.rowwise().norm().mean();
  const Eigen::Index rho = numerical_rank(data.x);
  double min_beta = 1e300, worst_homog = 0.0;
  int sandwich_violations = 0, holds = 0, vacuous = 0, informative_holds = 0, scenarios = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(derive_seed(seed, {1}));
    const DefenderCell cell{25 + static_cast<Eigen::Index>(rng.below(26)), 100 + static_cast<Eigen::Index>(rng.below(101))};
    const Eigen::Index k = static_cast<Eigen::Index>(rng.below(21));
    const double budget = 0.1 * mean_row * rng.uniform();
    const auto draw = draw_defender(data, cell, 0, derive_seed(seed, {2}));
    if (!draw) continue;
    ++scenarios;
    const AdvScenario sc{draw->projection, draw->keep, make_distortion(data, base.w, base.bias, k, budget), 1.0, {}};
    const auto rep = margin_report(sc, data, rho, &base);
    min_beta = std::min(min_beta, rep.beta);
    holds += rep.bound_holds ? 1 : 0;
    vacuous += rep.vacuous ? 1 : 0;
    informative_holds += (!rep.vacuous && rep.bound_holds) ? 1 : 0;

    const auto beta = compute_beta(data, 1.0, sc.projection, sc.keep, sc.distortion);
    auto tripled = sc.distortion;
    tripled.d *= 3.0;
    const double d1 = compute_delta(beta.pd.alpha, data, sc.distortion, sc.projection).value;
    const double d3 = compute_delta(beta.pd.alpha, data, tripled, sc.projection).value;
    worst_homog = std::max(worst_homog, std::abs(d3 - 9.0 * d1) / std::max(1.0, d3));
    if (!sandwich_check(beta.pd.alpha, data, sc.distortion, sc.projection).exact_form_holds) ++sandwich_violations;
    if (!sandwich_check(beta.pd.alpha, data, tripled, sc.projection).exact_form_holds) ++sandwich_violations;
  }
  const double rate = scenarios ? static_cast<double>(holds) / scenarios : 0.0;
  std::ostringstream d;
  d << "scenarios " << scenarios << ", min beta " << min_beta << ", delta homogeneity error " << worst_homog
    << ", sandwich violations " << sandwich_violations << ", hold rate " << rate << " (vacuous "
    << static_cast<double>(vacuous) / std::max(1, scenarios) << ", non-vacuous holds " << informative_holds << "/"
    << scenarios - vacuous << ")";
  return {scenarios == 100 && min_beta >= 1.0 - 1e-9 && worst_homog <= 1e-10 && sandwich_violations == 0 && rate >= 0.9,
          d.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome grid_game_criterion() {
  const std::uint64_t seed = 2026;
  const std::vector<std::string> over = {"c_D_R=0.01", "c_D_S=0.01", "c_A=0.1"};
  const fs::path root = fs::temp_directory_path() / "gamered_acceptance_grid";
  fs::remove_all(root);
  const auto t0 = Clock::now();
  run(RunConfig::make(Command::adv_game, {}, over, seed, root / "a"));
  const double elapsed = seconds_since(t0);
  run(RunConfig::make(Command::adv_game, {}, over, seed, root / "b"));
  bool identical = true;
  for (const char* f : {"report.csv", "equilibrium.csv", "margins.csv"})
    identical = identical && slurp(root / "a" / f) == slurp(root / "b" / f) && !slurp(root / "a" / f).empty();
  fs::remove_all(root);

  const auto data = gen_synth(200, 50, 4.0, seed);
  GridGameSpec spec;
  for (Eigen::Index r : {25, 38, 50})
    for (Eigen::Index s : {100, 150, 200}) spec.defender_cells.push_back({r, s});
  for (double b : {0.0, 0.1, 0.3})
    for (Eigen::Index k : {0, 10, 20}) spec.attacker_cells.push_back({b, k});
  spec.weights = {0.01, 0.01, 0.1};
  spec.replicates = 5;
  spec.seed = seed;
  const auto game = build_grid_game(data, spec);
  const auto eq = solve_grid_game(game);
  const bool ne_match = eq.pure_ne == oracle::exhaustive_pure_ne(game.payoff_d, game.payoff_a, 1e-9) &&
                        eq.security_strategies == oracle::minimax_cells(game.payoff_d, game.payoff_a);

  const auto base = solve_dual(data, spec.c);
  double worst_sum = 0.0;
  for (std::size_t i = 0; i < game.defender_cells.size(); ++i) {
    for (std::size_t j = 0; j < game.attacker_cells.size(); ++j) {
      const auto& ac = game.attacker_cells[j];
      const double attack = spec.weights.attacker * make_distortion(data, base.w, base.bias, ac.k, ac.budget).d.norm();
      double expected = 0.0;
      for (int rep = 0; rep < spec.replicates; ++rep) {
        const auto dr = draw_defender(data, game.defender_cells[i], rep, seed);
        std::vector<Eigen::Index> keep = dr->keep;
        std::sort(keep.begin(), keep.end());
        keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
        expected += spec.weights.defender_projection * dr->projection.entries().norm() +
                    spec.weights.defender_selection * std::sqrt(static_cast<double>(keep.size())) + attack;
      }
      expected /= spec.replicates;
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      worst_sum = std::max(worst_sum, std::abs(game.payoff_d(ii, jj) + game.payoff_a(ii, jj) - expected));
    }
  }
  std::ostringstream d;
  d << "pure NE " << eq.pure_ne.size() << ", oracle match " << (ne_match ? "yes" : "no") << ", J_D+J_A error "
    << worst_sum << ", run time " << elapsed << " s, reruns identical " << (identical ? "yes" : "no");
  return {ne_match && worst_sum <= 1e-12 && elapsed < 120.0 && identical, d.str()};
}

}  // namespace

int main() {
  criterion(1, "JL preservation bound", jl_bound_criterion);
  criterion(2, "quadratic reduce/lift algebra", quad_algebra_criterion);
  criterion(3, "closed-form Nash equilibrium", closed_form_criterion);
  criterion(4, "gradient and Hessian transport", transport_criterion);
  criterion(5, "best-response solver", best_response_criterion);
  criterion(6, "SVM dual solver", svm_criterion);
  criterion(7, "margin bound chain", bound_chain_criterion);
  criterion(8, "defender-attacker grid game", grid_game_criterion);
  std::printf("%s: %d failing criteria\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
