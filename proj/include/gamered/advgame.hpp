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

// Defender-attacker game around a linear SVM. The defender reduces the
// training problem (random projection A_R of the features, selection of a
// subset of rows); the attacker distorts rows of the data. Both are scored
// through the margin-distortion factor beta * (1 - phi - 2 delta).

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "gamered/linalg.hpp"
#include "gamered/randmaps.hpp"
#include "gamered/svmcore.hpp"

namespace gamered {

struct CostWeights {
  double defender_projection = 0.0;  // c_D_R
  double defender_selection = 0.0;   // c_D_S
  double attacker = 0.0;             // c_A
};

struct AdvScenario {
  LinearReductionMap projection;  // r x d
  std::vector<Eigen::Index> keep;
  DistortionMatrix distortion;
  double c = 1.0;
  CostWeights weights;

  /// keep nonempty and in range, weights nonnegative, shapes agree.
  void validate(const LabeledDataset& data) const;
};

struct DeltaResult {
  double value = 0.0;
  /// delta >= 1: the lower sandwich bound and the margin bound are void.
  bool bound_chain_invalid = false;
};

/// ||S u_D||^2 / ||S u_X||^2 with u_M = sum_i alpha_i y_i M_i and S the
/// effective (scaled) projection. Throws DegenerateError when the
/// denominator is below 1e-12.
DeltaResult compute_delta(const Vector& alpha, const LabeledDataset& data, const DistortionMatrix& distortion,
                          const LinearReductionMap& projection);

struct BetaResult {
  double beta = 1.0;
  double z_pd = 0.0;   // all rows retained
  double z_pds = 0.0;  // only `keep` retained
  SvmDualSolution pd;
  SvmDualSolution pds;
};

/// Z_pd / Z_pds for the projected, distorted problem with and without the
/// row-selection constraints. The unconstrained problem is warm-started from
/// the constrained optimum, so Z_pd >= Z_pds up to rounding.
/// Throws DegenerateError if Z_pds <= 0.
BetaResult compute_beta(const LabeledDataset& data, double c, const LinearReductionMap& projection,
                        const std::vector<Eigen::Index>& keep, const DistortionMatrix& distortion);

/// Default rho: number of singular values of X above 1e-10 * sigma_max.
Eigen::Index numerical_rank(const RowMatrix& x);

/// Top-rho right singular vectors of X (d x rho, orthonormal columns).
Matrix top_right_singular_vectors(const RowMatrix& x, Eigen::Index rho);

/// ||V'V - V' S' S V||_2 with V the top-rho right singular vectors of X and S
/// the effective projection. Throws InvalidArgument unless 1 <= rho <= min(n, d).
double compute_phi(const LabeledDataset& data, const LinearReductionMap& projection, Eigen::Index rho);
/// Same with a precomputed V.
double compute_phi(const Matrix& v, const LinearReductionMap& projection);

struct MarginDistortionReport {
  double beta = 1.0;
  double phi = 0.0;
  double delta = 0.0;      // at alpha_pd
  double delta_pds = 0.0;  // at alpha_pds, diagnostic
  double gamma_star = 0.0;
  double gamma_tilde = 0.0;
  double factor = 1.0;  // beta * (1 - phi - 2 delta)
  double bound_rhs = 0.0;
  bool bound_holds = false;
  double gap_bound = 0.0;
  /// bound_rhs < 0, i.e. gap_bound > 1: the bound says nothing.
  bool vacuous = false;
  bool delta_warning = false;
  /// gamma_tilde > gamma_star: the reductions helped the defender.
  bool margin_increased = false;
};

/// Assembles beta, phi, delta and both margins for a scenario. gamma_star
/// comes from the clean full problem; pass `baseline` to reuse it.
MarginDistortionReport margin_report(const AdvScenario& scenario, const LabeledDataset& data, Eigen::Index rho,
                                     const SvmDualSolution* baseline = nullptr);
/// Variant with precomputed right singular vectors V (d x rho).
MarginDistortionReport margin_report(const AdvScenario& scenario, const LabeledDataset& data, const Matrix& v,
                                     const SvmDualSolution& baseline);

struct SandwichResult {
  double ratio = 1.0;
  double lower = 1.0;  // (1 - sqrt(delta))^2
  double upper = 1.0;  // (1 + sqrt(delta))^2
  bool exact_form_holds = true;
  /// Whether 1 - delta <= ratio <= 1 + delta happened to hold as well.
  bool linear_form_holds = true;
};

/// ratio = ||S u_{X+D}||^2 / ||S u_X||^2 checked against the exact triangle
/// inequality bounds, with 1e-10 relative slack.
SandwichResult sandwich_check(const Vector& alpha, const LabeledDataset& data, const DistortionMatrix& distortion,
                              const LinearReductionMap& projection);

/// -beta(1 - phi - 2 delta) + c_D_R ||A_R||_F + c_D_S sqrt(|keep|), with the
/// Frobenius norm of the unscaled projection entries.
double defender_cost(const MarginDistortionReport& report, const AdvScenario& scenario);
/// beta(1 - phi - 2 delta) + c_A ||D||_F.
double attacker_cost(const MarginDistortionReport& report, const AdvScenario& scenario);

struct DefenderCell {
  Eigen::Index r = 0;  // projection dimension
  Eigen::Index s = 0;  // retained rows
  friend bool operator==(const DefenderCell&, const DefenderCell&) = default;
};

struct AttackerCell {
  double budget = 0.0;
  Eigen::Index k = 0;  // attacked rows
  friend bool operator==(const AttackerCell&, const AttackerCell&) = default;
};

struct CellStats {
  double beta = 0.0;
  double phi = 0.0;
  double delta = 0.0;
  double gamma_star = 0.0;
  double gamma_tilde = 0.0;
  double bound_hold_rate = 0.0;
  double vacuous_rate = 0.0;
};

struct GridGame {
  std::vector<DefenderCell> defender_cells;
  std::vector<AttackerCell> attacker_cells;
  /// Defender cells dropped because no keep set with both classes was found.
  std::vector<DefenderCell> excluded_defender_cells;
  Matrix payoff_d;  // |defender| x |attacker|, replicate means
  Matrix payoff_a;
  std::vector<std::vector<CellStats>> stats;
  int replicates = 0;
  std::uint64_t seed = 0;
};

struct GridGameSpec {
  double c = 1.0;
  std::vector<DefenderCell> defender_cells;
  std::vector<AttackerCell> attacker_cells;
  CostWeights weights;
  int replicates = 1;
  std::uint64_t seed = 0;
  /// 0 selects numerical_rank(X).
  Eigen::Index rho = 0;
};

/// The defender's random draws for one replicate of a defender cell: the
/// projection (identity when r == d, Gaussian otherwise) and a keep set of
/// size s containing both classes. Seeded by derive_seed(seed, {r, s,
/// replicate}), so they depend on the cell's values rather than its position
/// in the grid. Returns nullopt after 100 single-class draws.
struct DefenderDraw {
  LinearReductionMap projection;
  std::vector<Eigen::Index> keep;
};
std::optional<DefenderDraw> draw_defender(const LabeledDataset& data, const DefenderCell& cell, int replicate,
                                          std::uint64_t seed);

/// Full scenario for one (defender cell, attacker cell, replicate), with the
/// distortion aimed at the clean full-data hyperplane `baseline`.
std::optional<AdvScenario> build_scenario(const LabeledDataset& data, const GridGameSpec& spec,
                                          const DefenderCell& dcell, const AttackerCell& acell, int replicate,
                                          const SvmDualSolution& baseline);

GridGame build_grid_game(const LabeledDataset& data, const GridGameSpec& spec);

struct EquilibriumReport {
  std::vector<std::pair<std::size_t, std::size_t>> pure_ne;
  /// Minimax cells: defender row minimising its worst payoff_d, attacker
  /// column minimising its worst payoff_a (lowest index on ties).
  std::pair<std::size_t, std::size_t> security_strategies{0, 0};
  double defender_security_value = 0.0;
  double attacker_security_value = 0.0;
  bool is_ne_empty = true;
};

/// Pure equilibria of the bimatrix cost game (both players minimise), with
/// a 1e-9 tolerance on unilateral improvements.
EquilibriumReport solve_grid_game(const GridGame& game);
EquilibriumReport solve_bimatrix(const Matrix& payoff_d, const Matrix& payoff_a, double tol = 1e-9);

}  // namespace gamered
