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

#include "gamered/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gamered/advgame.hpp"
#include "gamered/convexred.hpp"
#include "gamered/error.hpp"
#include "gamered/io.hpp"
#include "gamered/quadgame.hpp"
#include "gamered/randmaps.hpp"
#include "gamered/rng.hpp"
#include "gamered/svmcore.hpp"

namespace gamered {
namespace {

namespace fs = std::filesystem;
using io::ReportTable;

constexpr long long kMaxDim = 1'000'000;

std::string schema(Command c) { return "gamered." + std::string(to_string(c)) + "/1"; }

fs::path write_table(const ReportTable& t, const fs::path& path, std::vector<fs::path>& written) {
  t.write(path);
  written.push_back(path);
  return path;
}

LabeledDataset dataset_from(const RunConfig& cfg) {
  if (cfg.has("data")) return load_dataset(cfg.text("data"));
  const long long n = cfg.integer_in("n", 2, kMaxDim);
  const long long d = cfg.integer_in("d", 1, kMaxDim);
  const double sep = cfg.real_in("separation", 0.0, 1e300);
  return gen_synth(n, d, sep, cfg.seed());
}

std::vector<fs::path> run_jl_check(const RunConfig& cfg) {
  const double gamma = cfg.real_in("gamma", 0.0, 1.0);
  const MapKind kind = parse_map_kind(cfg.text("map"));
  RowMatrix points;
  if (cfg.has("input")) {
    points = io::read_matrix_csv(cfg.text("input"));
  } else {
    const long long d = cfg.integer_in("d", 1, kMaxDim);
    points = gaussian_points(cfg.integer_in("points", 2, kMaxDim), d, derive_seed(cfg.seed(), {1}));
  }
  const Eigen::Index d = points.cols();
  const long long r = cfg.integer_in("r", 1, d);
  const LinearReductionMap map = make_map(kind, r, d, derive_seed(cfg.seed(), {0}));
  const JlReport rep = jl_check(points, map, gamma);

  double lo = 1.0;
  double hi = 1.0;
  if (!rep.per_pair_distortion.empty()) {
    lo = *std::min_element(rep.per_pair_distortion.begin(), rep.per_pair_distortion.end());
    hi = *std::max_element(rep.per_pair_distortion.begin(), rep.per_pair_distortion.end());
  }
  ReportTable t(schema(Command::jl_check),
                {"d", "r", "map", "gamma", "points", "pairs_tested", "pairs_preserved", "empirical_fraction",
                 "theoretical_bound", "min_ratio", "max_ratio", "seed"});
  t.add_row()
      .set("d", static_cast<long long>(d))
      .set("r", r)
      .set("map", std::string(to_string(kind)))
      .set("gamma", gamma)
      .set("points", static_cast<long long>(points.rows()))
      .set("pairs_tested", rep.pairs_tested)
      .set("pairs_preserved", rep.pairs_preserved)
      .set("empirical_fraction", rep.empirical_fraction)
      .set("theoretical_bound", rep.theoretical_bound)
      .set("min_ratio", lo)
      .set("max_ratio", hi)
      .set("seed", std::to_string(cfg.seed()));
  std::vector<fs::path> out;
  write_table(t, cfg.out_dir() / "report.csv", out);
  return out;
}

QuadGame2P game_from(const RunConfig& cfg) {
  if (cfg.has("game")) return load_game(cfg.text("game"));
  return random_quad_game(cfg.integer_in("dim", 1, 20'000), cfg.seed());
}

std::vector<fs::path> run_quad_demo(const RunConfig& cfg) {
  const QuadGame2P game = game_from(cfg);
  const NashEquilibrium2P ne = closed_form_ne(game);
  ReportTable t(schema(Command::quad_demo), {"dim", "condition_q1", "condition_q2", "residual1", "residual2", "cost1",
                                             "cost2", "x1_norm", "x2_norm"});
  t.add_row()
      .set("dim", static_cast<long long>(game.dim()))
      .set("condition_q1", ne.condition_q1)
      .set("condition_q2", ne.condition_q2)
      .set("residual1", ne.residual1)
      .set("residual2", ne.residual2)
      .set("cost1", game.cost1(ne.x1, ne.x2))
      .set("cost2", game.cost2(ne.x1, ne.x2))
      .set("x1_norm", ne.x1.norm())
      .set("x2_norm", ne.x2.norm());
  std::vector<fs::path> out;
  write_table(t, cfg.out_dir() / "report.csv", out);
  io::write_vector_csv(cfg.out_dir() / "x1.csv", ne.x1);
  io::write_vector_csv(cfg.out_dir() / "x2.csv", ne.x2);
  out.push_back(cfg.out_dir() / "x1.csv");
  out.push_back(cfg.out_dir() / "x2.csv");
  return out;
}

double max_game_diff(const QuadGame2P& a, const QuadGame2P& b) {
  return std::max({max_abs_diff(a.q1, b.q1), max_abs_diff(a.q2, b.q2), max_abs_diff(a.r1, b.r1),
                   max_abs_diff(a.r2, b.r2), std::abs(a.v1 - b.v1), std::abs(a.v2 - b.v2)});
}

std::vector<fs::path> run_reduce_quad(const RunConfig& cfg) {
  const QuadGame2P game = game_from(cfg);
  const Eigen::Index m = game.dim();
  const long long k = cfg.integer_in("k", 1, m);
  const bool same = cfg.flag("same_map");
  const MapKind kind1 = parse_map_kind(cfg.text("map1"));
  const MapKind kind2 = parse_map_kind(cfg.text("map2"));
  LinearReductionMap a1 = make_map(kind1, k, m, derive_seed(cfg.seed(), {1}));
  LinearReductionMap a2 = same ? a1 : make_map(kind2, k, m, derive_seed(cfg.seed(), {2}));
  const ReductionPair maps(a1, a2);
  const ReductionResult red = reduce_game(game, maps);

  // reduce(lift(G~)) must give G~ back.
  const QuadGame2P lifted = lift_game(red.reduced, maps);
  const double round_trip = max_game_diff(reduce_game(lifted, maps).reduced, red.reduced);

  // J_lift(x) = J~(A1 x1, A2 x2) on sampled points.
  const long long samples = cfg.integer_in("samples", 0, kMaxDim);
  double cost_err = 0.0;
  for (long long s = 0; s < samples; ++s) {
    const RowMatrix pts = gaussian_points(2, m, derive_seed(cfg.seed(), {3, static_cast<std::uint64_t>(s)}));
    const Vector x1 = pts.row(0).transpose();
    const Vector x2 = pts.row(1).transpose();
    const Vector y1 = apply_map(maps.a1(), x1);
    const Vector y2 = apply_map(maps.a2(), x2);
    cost_err = std::max({cost_err, std::abs(lifted.cost1(x1, x2) - red.reduced.cost1(y1, y2)),
                         std::abs(lifted.cost2(x1, x2) - red.reduced.cost2(y1, y2))});
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  PdProbeReport p1{false, nan, nan};
  PdProbeReport p2{false, nan, nan};
  if (is_positive_definite(game.q1)) p1 = pd_preservation_probe(game.q1, maps);
  if (is_positive_definite(game.q2)) p2 = pd_preservation_probe(game.q2, maps);

  ReportTable t(schema(Command::reduce_quad),
                {"dim", "k", "map1", "map2", "same_map", "lift_residual1", "lift_residual2", "reduce_lift_error",
                 "lifted_cost_error", "reduced_q1_pd", "reduced_q1_min_eig", "reduced_q2_pd", "reduced_q2_min_eig"});
  t.add_row()
      .set("dim", static_cast<long long>(m))
      .set("k", k)
      .set("map1", std::string(to_string(kind1)))
      .set("map2", std::string(to_string(same ? kind1 : kind2)))
      .set("same_map", maps.same_map())
      .set("lift_residual1", red.lift_residual1)
      .set("lift_residual2", red.lift_residual2)
      .set("reduce_lift_error", round_trip)
      .set("lifted_cost_error", cost_err)
      .set("reduced_q1_pd", p1.reduced_pd)
      .set("reduced_q1_min_eig", p1.min_eig)
      .set("reduced_q2_pd", p2.reduced_pd)
      .set("reduced_q2_min_eig", p2.min_eig);
  std::vector<fs::path> out;
  write_table(t, cfg.out_dir() / "report.csv", out);
  save_game(red.reduced, cfg.out_dir() / "reduced");
  out.push_back(cfg.out_dir() / "reduced");
  return out;
}

std::vector<fs::path> run_convex_demo(const RunConfig& cfg) {
  const std::string name = cfg.text("game");
  const long long dim = cfg.integer_in("dim", 1, 100'000);
  const double coupling = cfg.real_in("coupling", -1e6, 1e6);
  const double half = cfg.real_in("halfwidth", 1e-12, 1e300);
  const double tol = cfg.real_in("tol", 1e-15, 1.0);
  const long long rounds = cfg.integer_in("max_rounds", 1, 1'000'000);
  BestResponseOptions opts;
  opts.seed = derive_seed(cfg.seed(), {2});
  opts.fd.gradient = cfg.real_in("fd_gradient_step", 1e-12, 1.0);
  opts.fd.hessian = cfg.real_in("fd_hessian_step", 1e-12, 1.0);

  Rng rng(derive_seed(cfg.seed(), {1}));
  Vector c1(dim);
  Vector c2(dim);
  for (auto& v : c1) v = rng.normal();
  for (auto& v : c2) v = rng.normal();

  const SmoothGame game = [&] {
    if (name == "decoupled") {
      const Box box = Box::uniform(dim, -half, half);
      return games::decoupled_quadratic({c1, c2}, {box, box});
    }
    if (name == "coupled") return games::coupled_quadratic(c1, c2, coupling, cfg.flag("antisymmetric"), half);
    if (name == "logsumexp") return games::logsumexp_game(c1, c2, coupling, half);
    throw InvalidArgument("parameter 'game': unknown family '" + name + "' (expected decoupled, coupled, logsumexp)");
  }();

  const JointDecision init{Vector::Zero(dim), Vector::Zero(dim)};
  const BestResponseResult res = ne_solve_best_response(game, init, tol, static_cast<int>(rounds), opts);
  double sol_norm = 0.0;
  for (const auto& x : res.solution) sol_norm = std::max(sol_norm, x.lpNorm<Eigen::Infinity>());

  ReportTable t(schema(Command::convex_demo), {"game", "dim", "coupling", "rounds", "converged", "residual",
                                               "convexity_warning", "solution_inf_norm"});
  t.add_row()
      .set("game", name)
      .set("dim", dim)
      .set("coupling", coupling)
      .set("rounds", res.rounds)
      .set("converged", res.converged)
      .set("residual", res.residual)
      .set("convexity_warning", res.convexity_warning)
      .set("solution_inf_norm", sol_norm);
  ReportTable h("gamered.convex-demo.rounds/1", {"round", "move", "residual"});
  for (std::size_t i = 0; i < res.move_history.size(); ++i) {
    h.add_row().set("round", i + 1).set("move", res.move_history[i]).set("residual", res.residual_history[i]);
  }
  std::vector<fs::path> out;
  write_table(t, cfg.out_dir() / "report.csv", out);
  write_table(h, cfg.out_dir() / "rounds.csv", out);
  return out;
}

std::vector<fs::path> run_svm_train(const RunConfig& cfg) {
  const LabeledDataset data = dataset_from(cfg);
  const double c = cfg.real_in("C", 1e-300, 1e300);
  SmoOptions opts;
  opts.tolerance = cfg.real_in("tol", 1e-15, 1.0);
  const SvmDualSolution sol = solve_dual(data, c, opts);
  ReportTable t(schema(Command::svm_train), {"n", "d", "C", "objective", "margin", "bias", "support_vectors",
                                             "iterations", "converged", "kkt_gap", "training_accuracy"});
  t.add_row()
      .set("n", static_cast<long long>(data.n()))
      .set("d", static_cast<long long>(data.d()))
      .set("C", c)
      .set("objective", sol.objective)
      .set("margin", sol.margin)
      .set("bias", sol.bias)
      .set("support_vectors", sol.support_indices.size())
      .set("iterations", static_cast<long long>(sol.solver_iterations))
      .set("converged", sol.converged)
      .set("kkt_gap", sol.kkt_gap)
      .set("training_accuracy", training_accuracy(data, sol));
  std::vector<fs::path> out;
  write_table(t, cfg.out_dir() / "report.csv", out);
  io::write_vector_csv(cfg.out_dir() / "w.csv", sol.w);
  out.push_back(cfg.out_dir() / "w.csv");
  return out;
}

std::vector<fs::path> run_adv_game(const RunConfig& cfg) {
  const LabeledDataset data = dataset_from(cfg);
  GridGameSpec spec;
  spec.c = cfg.real_in("C", 1e-300, 1e300);
  spec.weights.defender_projection = cfg.real_in("c_D_R", 0.0, 1e300);
  spec.weights.defender_selection = cfg.real_in("c_D_S", 0.0, 1e300);
  spec.weights.attacker = cfg.real_in("c_A", 0.0, 1e300);
  spec.replicates = static_cast<int>(cfg.integer_in("replicates", 1, 10'000));
  spec.seed = cfg.seed();
  spec.rho = cfg.integer_in("rho", 0, std::min(data.n(), data.d()));
  for (long long r : cfg.integer_list("defender_r_list")) {
    if (r < 1 || r > data.d()) throw InvalidArgument("parameter 'defender_r_list': r=" + std::to_string(r) + " outside [1, d]");
    for (long long s : cfg.integer_list("defender_s_list")) {
      if (s < 1 || s > data.n()) {
        throw InvalidArgument("parameter 'defender_s_list': s=" + std::to_string(s) + " outside [1, n]");
      }
      spec.defender_cells.push_back({r, s});
    }
  }
  for (double b : cfg.real_list("attacker_budget_list")) {
    if (!(b >= 0.0)) throw InvalidArgument("parameter 'attacker_budget_list': budgets must be >= 0");
    for (long long k : cfg.integer_list("attacker_k_list")) {
      if (k < 0 || k > data.n()) {
        throw InvalidArgument("parameter 'attacker_k_list': k=" + std::to_string(k) + " outside [0, n]");
      }
      spec.attacker_cells.push_back({b, k});
    }
  }

  const GridGame game = build_grid_game(data, spec);
  const EquilibriumReport eq = solve_grid_game(game);

  ReportTable e("gamered.adv-game.equilibrium/1",
                {"defender_index", "attacker_index", "r", "s", "budget", "k", "payoff_d", "payoff_a", "is_ne",
                 "is_security_d", "is_security_a"});
  ReportTable m("gamered.adv-game.margins/1", {"defender_index", "attacker_index", "r", "s", "budget", "k", "beta",
                                               "phi", "delta", "gamma_star", "gamma_tilde", "bound_hold_rate",
                                               "vacuous_rate"});
  for (std::size_t i = 0; i < game.defender_cells.size(); ++i) {
    for (std::size_t j = 0; j < game.attacker_cells.size(); ++j) {
      const auto& dc = game.defender_cells[i];
      const auto& ac = game.attacker_cells[j];
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      const bool ne = std::find(eq.pure_ne.begin(), eq.pure_ne.end(), std::make_pair(i, j)) != eq.pure_ne.end();
      e.add_row()
          .set("defender_index", i)
          .set("attacker_index", j)
          .set("r", static_cast<long long>(dc.r))
          .set("s", static_cast<long long>(dc.s))
          .set("budget", ac.budget)
          .set("k", static_cast<long long>(ac.k))
          .set("payoff_d", game.payoff_d(ii, jj))
          .set("payoff_a", game.payoff_a(ii, jj))
          .set("is_ne", ne)
          .set("is_security_d", eq.security_strategies.first == i)
          .set("is_security_a", eq.security_strategies.second == j);
      const CellStats& st = game.stats[i][j];
      m.add_row()
          .set("defender_index", i)
          .set("attacker_index", j)
          .set("r", static_cast<long long>(dc.r))
          .set("s", static_cast<long long>(dc.s))
          .set("budget", ac.budget)
          .set("k", static_cast<long long>(ac.k))
          .set("beta", st.beta)
          .set("phi", st.phi)
          .set("delta", st.delta)
          .set("gamma_star", st.gamma_star)
          .set("gamma_tilde", st.gamma_tilde)
          .set("bound_hold_rate", st.bound_hold_rate)
          .set("vacuous_rate", st.vacuous_rate);
    }
  }
  ReportTable t(schema(Command::adv_game),
                {"defender_cells", "attacker_cells", "excluded_defender_cells", "replicates", "pure_ne_count",
                 "security_defender_index", "security_attacker_index", "defender_security_value",
                 "attacker_security_value"});
  t.add_row()
      .set("defender_cells", game.defender_cells.size())
      .set("attacker_cells", game.attacker_cells.size())
      .set("excluded_defender_cells", game.excluded_defender_cells.size())
      .set("replicates", game.replicates)
      .set("pure_ne_count", eq.pure_ne.size())
      .set("security_defender_index", eq.security_strategies.first)
      .set("security_attacker_index", eq.security_strategies.second)
      .set("defender_security_value", eq.defender_security_value)
      .set("attacker_security_value", eq.attacker_security_value);
  std::vector<fs::path> out;
  write_table(t, cfg.out_dir() / "report.csv", out);
  write_table(e, cfg.out_dir() / "equilibrium.csv", out);
  write_table(m, cfg.out_dir() / "margins.csv", out);
  return out;
}

std::vector<fs::path> run_gen_synth(const RunConfig& cfg) {
  const long long n = cfg.integer_in("n", 2, kMaxDim);
  const long long d = cfg.integer_in("d", 1, kMaxDim);
  const double sep = cfg.real_in("separation", 0.0, 1e300);
  const LabeledDataset data = gen_synth(n, d, sep, cfg.seed());
  std::vector<fs::path> out;
  fs::create_directories(cfg.out_dir());
  save_dataset(data, cfg.out_dir() / "dataset.csv");
  out.push_back(cfg.out_dir() / "dataset.csv");
  ReportTable t(schema(Command::gen_synth), {"n", "d", "separation", "seed"});
  t.add_row().set("n", n).set("d", d).set("separation", sep).set("seed", std::to_string(cfg.seed()));
  write_table(t, cfg.out_dir() / "report.csv", out);
  return out;
}

}  // namespace

RowMatrix gaussian_points(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  RowMatrix p(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
    for (Eigen::Index j = 0; j < d; ++j) p(i, j) = rng.normal();
  }
  return p;
}

std::vector<fs::path> run(const RunConfig& config) {
  fs::create_directories(config.out_dir());
  switch (config.command()) {
    case Command::jl_check: return run_jl_check(config);
    case Command::quad_demo: return run_quad_demo(config);
    case Command::reduce_quad: return run_reduce_quad(config);
    case Command::convex_demo: return run_convex_demo(config);
    case Command::svm_train: return run_svm_train(config);
    case Command::adv_game: return run_adv_game(config);
    case Command::gen_synth: return run_gen_synth(config);
  }
  throw InvalidArgument("unknown command");
}

}  // namespace gamered
