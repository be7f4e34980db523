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

// Linear SVM dual
//
//   max_a 1'a - 1/2 a' Y M M' Y a   s.t.  y'a = 0,  0 <= a <= C,
//
// solved by pairwise (SMO) coordinate ascent with most-violating-pair
// selection. M is the data matrix, or for the adversarial reduced variant
// the retained rows of (X + D) mapped through a reduction map.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "gamered/linalg.hpp"
#include "gamered/randmaps.hpp"

namespace gamered {

struct LabeledDataset {
  RowMatrix x;  // n x d, one data vector per row
  Vector y;     // entries in {-1, +1}

  Eigen::Index n() const noexcept { return x.rows(); }
  Eigen::Index d() const noexcept { return x.cols(); }

  /// Shapes agree and every label is exactly -1 or +1.
  void validate() const;
  bool has_both_classes() const;
};

struct SvmDualSolution {
  Vector alpha;  // length n of the full dataset; zero outside the retained rows
  Vector w;      // length d, or r for reduced problems
  double bias = 0.0;
  double objective = 0.0;  // 1'a - 1/2 ||w||^2
  double margin = 0.0;     // 1 / ||w||
  std::vector<Eigen::Index> support_indices;
  long long solver_iterations = 0;
  bool converged = false;
  /// Final maximal KKT violation m(a) - M(a).
  double kkt_gap = 0.0;
  /// Dual objective after every accepted pair update (when recorded).
  std::vector<double> objective_trace;
};

struct SmoOptions {
  double tolerance = 1e-6;
  long long max_iterations = 1'000'000;
  /// Kernel rows are cached for problems up to this many retained rows and
  /// recomputed on the fly above it.
  Eigen::Index cache_limit = 4096;
  bool record_trace = false;
  /// Feasible starting multipliers for the retained rows (same indexing as
  /// the full dataset). Defaults to zero.
  std::optional<Vector> warm_start;
};

/// Throws InvalidArgument for C <= 0 or single-class data.
SvmDualSolution solve_dual(const LabeledDataset& data, double c, const SmoOptions& options = {});

struct DistortionMatrix {
  RowMatrix d;  // n x d
  std::vector<Eigen::Index> attacked_rows;
  double budget = 0.0;

  static DistortionMatrix zero(Eigen::Index n, Eigen::Index dim);
  double frobenius_norm() const { return d.norm(); }
};

/// Effective matrix ((X + D) restricted to `keep`) with every row mapped by
/// `projection`; the multipliers of rows outside `keep` are fixed at zero.
/// `keep` is sorted and deduplicated internally; it must contain both classes.
SvmDualSolution solve_reduced_adversarial(const LabeledDataset& data, double c, const LinearReductionMap& projection,
                                          const std::vector<Eigen::Index>& keep, const DistortionMatrix& distortion,
                                          const SmoOptions& options = {});

/// 1 / ||w||_2. Throws DegenerateError for w = 0.
double margin_of(const SvmDualSolution& solution);
double margin_of(const Vector& w);

/// Poisoning heuristic: the k rows with the smallest positive functional
/// margin y_i (w'x_i + bias) (ties by index) are moved by
/// -budget * y_i * w / ||w||, i.e. pushed towards the wrong side. Rows with
/// non-positive margin are never picked, so fewer than k rows may be hit.
DistortionMatrix make_distortion(const LabeledDataset& data, const Vector& w, double bias, Eigen::Index k,
                                 double budget);

/// w'x + bias for every row of x.
Vector decision_values(const RowMatrix& x, const Vector& w, double bias);
double training_accuracy(const LabeledDataset& data, const SvmDualSolution& solution);

/// All row indices 0..n-1.
std::vector<Eigen::Index> all_rows(Eigen::Index n);

/// n/2 points per class from N(+-(separation/2) e_1, I_d); the first half
/// are labelled +1. Throws InvalidArgument for odd n.
LabeledDataset gen_synth(Eigen::Index n, Eigen::Index d, double separation, std::uint64_t seed);

/// CSV with header f1,...,fd,label.
LabeledDataset load_dataset(const std::filesystem::path& path);
void save_dataset(const LabeledDataset& data, const std::filesystem::path& path);

}  // namespace gamered
