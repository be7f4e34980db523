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

#include "gamered/advgame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gamered/error.hpp"
#include "gamered/rng.hpp"

namespace gamered {
namespace {

// u = sum_i alpha_i y_i M_i for the rows of M.
Vector weighted_row_sum(const Vector& alpha, const Vector& y, const RowMatrix& m) {
  return m.transpose() * alpha.cwiseProduct(y);
}

void check_alpha(const Vector& alpha, const LabeledDataset& data, const DistortionMatrix& dist,
                 const LinearReductionMap& projection) {
  data.validate();
  if (alpha.size() != data.n()) throw InvalidArgument("alpha length does not match the dataset");
  if (dist.d.rows() != data.n() || dist.d.cols() != data.d()) {
    throw InvalidArgument("distortion matrix shape does not match the data");
  }
  if (projection.cols() != data.d()) throw InvalidArgument("projection columns do not match the feature count");
}

struct ProjectedFunctionals {
  Vector clean;      // S u_X
  Vector distorted;  // S u_D
};

ProjectedFunctionals projected_functionals(const Vector& alpha, const LabeledDataset& data,
                                           const DistortionMatrix& dist, const LinearReductionMap& projection) {
  check_alpha(alpha, data, dist, projection);
  return {apply_map(projection, weighted_row_sum(alpha, data.y, data.x)),
          apply_map(projection, weighted_row_sum(alpha, data.y, dist.d))};
}

}  // namespace

void AdvScenario::validate(const LabeledDataset& data) const {
  data.validate();
  if (keep.empty()) throw InvalidArgument("scenario keep set is empty");
  for (Eigen::Index i : keep)
    if (i < 0 || i >= data.n()) throw InvalidArgument("scenario keep index out of range");
  if (weights.defender_projection < 0 || weights.defender_selection < 0 || weights.attacker < 0) {
    throw InvalidArgument("cost weights must be nonnegative");
  }
  if (projection.cols() != data.d()) throw InvalidArgument("projection columns do not match the feature count");
  if (distortion.d.rows() != data.n() || distortion.d.cols() != data.d()) {
    throw InvalidArgument("distortion matrix shape does not match the data");
  }
  if (!(c > 0.0)) throw InvalidArgument("SVM constant C must be positive");
}

DeltaResult compute_delta(const Vector& alpha, const LabeledDataset& data, const DistortionMatrix& distortion,
                          const LinearReductionMap& projection) {
  const auto f = projected_functionals(alpha, data, distortion, projection);
  const double den = f.clean.squaredNorm();
  if (!(den > 1e-12)) throw DegenerateError("delta undefined: ||alpha'YXA_R||^2 vanishes");
  DeltaResult out;
  out.value = f.distorted.squaredNorm() / den;
  out.bound_chain_invalid = out.value >= 1.0;
  return out;
}

BetaResult compute_beta(const LabeledDataset& data, double c, const LinearReductionMap& projection,
                        const std::vector<Eigen::Index>& keep, const DistortionMatrix& distortion) {
  BetaResult out;
  out.pds = solve_reduced_adversarial(data, c, projection, keep, distortion);
  SmoOptions warm;
  warm.warm_start = out.pds.alpha;
  out.pd = solve_reduced_adversarial(data, c, projection, all_rows(data.n()), distortion, warm);
  out.z_pds = out.pds.objective;
  out.z_pd = out.pd.objective;
  if (!(out.z_pds > 0.0)) throw DegenerateError("beta undefined: selection-constrained dual value is not positive");
  out.beta = out.z_pd / out.z_pds;
  return out;
}

Eigen::Index numerical_rank(const RowMatrix& x) {
  const Vector s = singular_values(x);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > kRankTolerance * s(0)) ++rank;
  return rank;
}

Matrix top_right_singular_vectors(const RowMatrix& x, Eigen::Index rho) {
  if (rho < 1 || rho > std::min(x.rows(), x.cols())) {
    throw InvalidArgument("rho must lie in [1, min(n, d)] = [1, " + std::to_string(std::min(x.rows(), x.cols())) +
                          "], got " + std::to_string(rho));
  }
  const Eigen::BDCSVD<Matrix> svd(Matrix(x), Eigen::ComputeThinV);
  return svd.matrixV().leftCols(rho);
}

double compute_phi(const Matrix& v, const LinearReductionMap& projection) {
  if (v.rows() != projection.cols()) throw InvalidArgument("compute_phi: V rows do not match projection columns");
  const Matrix sv = projection.effective() * v;
  const Matrix e = v.transpose() * v - sv.transpose() * sv;
  const Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric_part(e), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double compute_phi(const LabeledDataset& data, const LinearReductionMap& projection, Eigen::Index rho) {
  if (projection.cols() != data.d()) throw InvalidArgument("projection columns do not match the feature count");
  return compute_phi(top_right_singular_vectors(data.x, rho), projection);
}

MarginDistortionReport margin_report(const AdvScenario& scenario, const LabeledDataset& data, const Matrix& v,
                                     const SvmDualSolution& baseline) {
  scenario.validate(data);
  MarginDistortionReport rep;
  rep.gamma_star = margin_of(baseline);
  const BetaResult b = compute_beta(data, scenario.c, scenario.projection, scenario.keep, scenario.distortion);
  rep.beta = b.beta;
  rep.gamma_tilde = margin_of(b.pds);
  rep.phi = compute_phi(v, scenario.projection);
  const DeltaResult d = compute_delta(b.pd.alpha, data, scenario.distortion, scenario.projection);
  rep.delta = d.value;
  rep.delta_warning = d.bound_chain_invalid;
  try {
    rep.delta_pds = compute_delta(b.pds.alpha, data, scenario.distortion, scenario.projection).value;
  } catch (const DegenerateError&) {
    rep.delta_pds = std::numeric_limits<double>::quiet_NaN();
  }
  rep.factor = rep.beta * (1.0 - rep.phi - 2.0 * rep.delta);
  rep.bound_rhs = rep.factor * rep.gamma_star * rep.gamma_star;
  rep.bound_holds = rep.gamma_tilde * rep.gamma_tilde >= rep.bound_rhs - 1e-9;
  rep.gap_bound = 1.0 - rep.factor;
  rep.vacuous = rep.bound_rhs < 0.0;
  rep.margin_increased = rep.gamma_tilde > rep.gamma_star;
  return rep;
}

MarginDistortionReport margin_report(const AdvScenario& scenario, const LabeledDataset& data, Eigen::Index rho,
                                     const SvmDualSolution* baseline) {
  scenario.validate(data);
  const SvmDualSolution base = baseline ? *baseline : solve_dual(data, scenario.c);
  if (rho == 0) rho = numerical_rank(data.x);
  return margin_report(scenario, data, top_right_singular_vectors(data.x, rho), base);
}

SandwichResult sandwich_check(const Vector& alpha, const LabeledDataset& data, const DistortionMatrix& distortion,
                              const LinearReductionMap& projection) {
  const auto f = projected_functionals(alpha, data, distortion, projection);
  const double den = f.clean.squaredNorm();
  if (!(den > 1e-12)) throw DegenerateError("sandwich undefined: ||alpha'YXA_R||^2 vanishes");
  const double delta = f.distorted.squaredNorm() / den;
  const double sd = std::sqrt(delta);
  SandwichResult out;
  out.ratio = (f.clean + f.distorted).squaredNorm() / den;
  out.lower = (1.0 - sd) * (1.0 - sd);
  out.upper = (1.0 + sd) * (1.0 + sd);
  const double slack = 1e-10 * std::max(1.0, out.upper);
  out.exact_form_holds = out.lower - slack <= out.ratio && out.ratio <= out.upper + slack;
  out.linear_form_holds = 1.0 - delta <= out.ratio && out.ratio <= 1.0 + delta;
  return out;
}

double defender_cost(const MarginDistortionReport& report, const AdvScenario& scenario) {
  std::vector<Eigen::Index> keep = scenario.keep;
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  return -report.factor + scenario.weights.defender_projection * scenario.projection.entries().norm() +
         scenario.weights.defender_selection * std::sqrt(static_cast<double>(keep.size()));
}

double attacker_cost(const MarginDistortionReport& report, const AdvScenario& scenario) {
  return report.factor + scenario.weights.attacker * scenario.distortion.frobenius_norm();
}

std::optional<DefenderDraw> draw_defender(const LabeledDataset& data, const DefenderCell& cell, int replicate,
                                          std::uint64_t seed) {
  if (cell.r < 1 || cell.r > data.d()) {
    throw InvalidArgument("defender projection dimension r=" + std::to_string(cell.r) + " must lie in [1, d]");
  }
  if (cell.s < 1 || cell.s > data.n()) {
    throw InvalidArgument("defender sample count s=" + std::to_string(cell.s) + " must lie in [1, n]");
  }
  const std::uint64_t base = derive_seed(seed, {static_cast<std::uint64_t>(cell.r), static_cast<std::uint64_t>(cell.s),
                                                static_cast<std::uint64_t>(replicate)});
  LinearReductionMap projection = cell.r == data.d() ? identity_map(data.d())
                                                     : make_map(MapKind::gaussian, cell.r, data.d(), derive_seed(base, {0}));
  for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
    Rng rng(derive_seed(base, {1, attempt}));
    const auto picked = rng.sample_without_replacement(static_cast<std::size_t>(data.n()), static_cast<std::size_t>(cell.s));
    std::vector<Eigen::Index> keep(picked.begin(), picked.end());
    std::sort(keep.begin(), keep.end());
    bool pos = false;
    bool neg = false;
    for (Eigen::Index i : keep) (data.y(i) > 0 ? pos : neg) = true;
    if (pos && neg) return DefenderDraw{std::move(projection), std::move(keep)};
  }
  return std::nullopt;
}

std::optional<AdvScenario> build_scenario(const LabeledDataset& data, const GridGameSpec& spec,
                                          const DefenderCell& dcell, const AttackerCell& acell, int replicate,
                                          const SvmDualSolution& baseline) {
  auto draw = draw_defender(data, dcell, replicate, spec.seed);
  if (!draw) return std::nullopt;
  return AdvScenario{std::move(draw->projection), std::move(draw->keep),
                     make_distortion(data, baseline.w, baseline.bias, acell.k, acell.budget), spec.c, spec.weights};
}

GridGame build_grid_game(const LabeledDataset& data, const GridGameSpec& spec) {
  data.validate();
  if (spec.defender_cells.empty() || spec.attacker_cells.empty()) throw InvalidArgument("grid cells must be nonempty");
  if (spec.replicates < 1) throw InvalidArgument("replicates must be at least 1");
  for (const auto& a : spec.attacker_cells) {
    if (!(a.budget >= 0.0) || a.k < 0 || a.k > data.n()) {
      throw InvalidArgument("attacker cell needs budget >= 0 and 0 <= k <= n");
    }
  }

  const SvmDualSolution baseline = solve_dual(data, spec.c);
  const Eigen::Index rho = spec.rho == 0 ? numerical_rank(data.x) : spec.rho;
  const Matrix v = top_right_singular_vectors(data.x, rho);

  std::vector<DistortionMatrix> distortions;
  for (const auto& a : spec.attacker_cells) {
    distortions.push_back(make_distortion(data, baseline.w, baseline.bias, a.k, a.budget));
  }

  GridGame game;
  game.attacker_cells = spec.attacker_cells;
  game.replicates = spec.replicates;
  game.seed = spec.seed;
  std::vector<std::vector<DefenderDraw>> draws;
  for (const auto& cell : spec.defender_cells) {
    std::vector<DefenderDraw> reps;
    for (int rep = 0; rep < spec.replicates; ++rep) {
      auto d = draw_defender(data, cell, rep, spec.seed);
      if (!d) break;
      reps.push_back(std::move(*d));
    }
    if (static_cast<int>(reps.size()) == spec.replicates) {
      game.defender_cells.push_back(cell);
      draws.push_back(std::move(reps));
    } else {
      game.excluded_defender_cells.push_back(cell);
    }
  }
  if (game.defender_cells.empty()) throw InvalidArgument("no defender cell admits a keep set with both classes");

  const auto nd = static_cast<Eigen::Index>(game.defender_cells.size());
  const auto na = static_cast<Eigen::Index>(game.attacker_cells.size());
  game.payoff_d = Matrix::Zero(nd, na);
  game.payoff_a = Matrix::Zero(nd, na);
  game.stats.assign(static_cast<std::size_t>(nd), std::vector<CellStats>(static_cast<std::size_t>(na)));
  const double inv = 1.0 / static_cast<double>(spec.replicates);
  for (Eigen::Index i = 0; i < nd; ++i) {
    for (Eigen::Index j = 0; j < na; ++j) {
      double sum_d = 0.0;
      double sum_a = 0.0;
      CellStats& st = game.stats[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      for (int rep = 0; rep < spec.replicates; ++rep) {
        const DefenderDraw& dr = draws[static_cast<std::size_t>(i)][static_cast<std::size_t>(rep)];
        const AdvScenario sc{dr.projection, dr.keep, distortions[static_cast<std::size_t>(j)], spec.c, spec.weights};
        const MarginDistortionReport rep_m = margin_report(sc, data, v, baseline);
        sum_d += defender_cost(rep_m, sc);
        sum_a += attacker_cost(rep_m, sc);
        st.beta += rep_m.beta * inv;
        st.phi += rep_m.phi * inv;
        st.delta += rep_m.delta * inv;
        st.gamma_star += rep_m.gamma_star * inv;
        st.gamma_tilde += rep_m.gamma_tilde * inv;
        st.bound_hold_rate += (rep_m.bound_holds ? 1.0 : 0.0) * inv;
        st.vacuous_rate += (rep_m.vacuous ? 1.0 : 0.0) * inv;
      }
      game.payoff_d(i, j) = sum_d * inv;
      game.payoff_a(i, j) = sum_a * inv;
    }
  }
  return game;
}

EquilibriumReport solve_bimatrix(const Matrix& payoff_d, const Matrix& payoff_a, double tol) {
  if (payoff_d.rows() != payoff_a.rows() || payoff_d.cols() != payoff_a.cols() || payoff_d.size() == 0) {
    throw InvalidArgument("payoff matrices must be nonempty and of equal shape");
  }
  EquilibriumReport rep;
  const Eigen::Index m = payoff_d.rows();
  const Eigen::Index n = payoff_d.cols();
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const bool defender_best = payoff_d(i, j) <= payoff_d.col(j).minCoeff() + tol;
      const bool attacker_best = payoff_a(i, j) <= payoff_a.row(i).minCoeff() + tol;
      if (defender_best && attacker_best) rep.pure_ne.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
  }
  rep.is_ne_empty = rep.pure_ne.empty();

  rep.defender_security_value = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < m; ++i) {
    const double worst = payoff_d.row(i).maxCoeff();
    if (worst < rep.defender_security_value) {
      rep.defender_security_value = worst;
      rep.security_strategies.first = static_cast<std::size_t>(i);
    }
  }
  rep.attacker_security_value = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double worst = payoff_a.col(j).maxCoeff();
    if (worst < rep.attacker_security_value) {
      rep.attacker_security_value = worst;
      rep.security_strategies.second = static_cast<std::size_t>(j);
    }
  }
  return rep;
}

EquilibriumReport solve_grid_game(const GridGame& game) { return solve_bimatrix(game.payoff_d, game.payoff_a); }

}  // namespace gamered
