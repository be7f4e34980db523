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

// Linear reduction maps y = A x: Gaussian and random-sign projections and
// coordinate-selection matrices, plus an empirical Johnson-Lindenstrauss
// distance-preservation check.
//
// All maps are stored as K x M matrices acting by left multiplication on
// column vectors. Data matrices whose rows are points are reduced by
// right-multiplying with the transpose of the effective matrix.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gamered/linalg.hpp"

namespace gamered {

enum class MapKind { gaussian, sign, selection };

std::string_view to_string(MapKind kind) noexcept;
/// Throws InvalidArgument for unknown names.
MapKind parse_map_kind(std::string_view name);

class LinearReductionMap {
 public:
  /// Wraps an explicit matrix. Selection maps are validated (one unit entry
  /// per row, distinct columns); sign maps must have +-1 entries.
  static LinearReductionMap from_matrix(MapKind kind, RowMatrix entries, double scale, std::uint64_t seed = 0);

  MapKind kind() const noexcept { return kind_; }
  Eigen::Index rows() const noexcept { return entries_.rows(); }
  Eigen::Index cols() const noexcept { return entries_.cols(); }
  /// Raw entries: N(0,1) draws, +-1 signs, or 0/1 selection pattern.
  const RowMatrix& entries() const noexcept { return entries_; }
  double scale() const noexcept { return scale_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// The matrix actually applied: scale * entries.
  Matrix effective() const { return scale_ * entries_; }
  /// For selection maps, the selected column of each row.
  const std::vector<std::size_t>& selected() const noexcept { return selected_; }

  friend bool operator==(const LinearReductionMap& a, const LinearReductionMap& b) {
    return a.kind_ == b.kind_ && a.scale_ == b.scale_ && a.entries_.rows() == b.entries_.rows() &&
           a.entries_.cols() == b.entries_.cols() && a.entries_ == b.entries_;
  }

 private:
  friend LinearReductionMap make_map(MapKind, Eigen::Index, Eigen::Index, std::uint64_t,
                                     std::optional<std::vector<std::size_t>>);
  LinearReductionMap(MapKind kind, RowMatrix entries, double scale, std::uint64_t seed,
                     std::vector<std::size_t> selected)
      : kind_(kind), entries_(std::move(entries)), scale_(scale), seed_(seed), selected_(std::move(selected)) {}

  MapKind kind_;
  RowMatrix entries_;
  double scale_;
  std::uint64_t seed_;
  std::vector<std::size_t> selected_;
};

/// Builds a reduced_dim x ambient_dim map.
///
/// Random entries are drawn row by row: row k is filled left to right from
/// Rng(derive_seed(seed, {k})), so any row can be regenerated on its own and
/// the matrix is bit-identical across runs and platforms. Gaussian and sign
/// maps carry scale 1/sqrt(reduced_dim); selection maps carry scale 1.
///
/// For selection maps without explicit indices, reduced_dim distinct columns
/// are sampled from Rng(seed) and sorted ascending.
LinearReductionMap make_map(MapKind kind, Eigen::Index reduced_dim, Eigen::Index ambient_dim, std::uint64_t seed,
                            std::optional<std::vector<std::size_t>> selected_indices = std::nullopt);

/// The K = M selection map (identity), a diagnostic no-op reduction.
LinearReductionMap identity_map(Eigen::Index dim);

/// scale * entries * x. Selection maps copy the selected coordinates.
Vector apply_map(const LinearReductionMap& map, const Vector& x);

/// Reduces every row of `points` (n x cols) to an n x rows matrix.
RowMatrix apply_map_rows(const LinearReductionMap& map, const RowMatrix& points);

struct JlReport {
  double gamma = 0.0;
  std::size_t pairs_tested = 0;
  std::size_t pairs_preserved = 0;
  double empirical_fraction = 0.0;
  double theoretical_bound = 0.0;
  /// ||y_i - y_j||^2 / ||x_i - x_j||^2 for i < j in row-major pair order;
  /// 1 for coincident points.
  std::vector<double> per_pair_distortion;
};

/// 1 - 2 exp(-(gamma^2 - gamma^3) r / 4).
double jl_bound(double gamma, Eigen::Index reduced_dim);

/// Counts unordered pairs whose squared reduced distance lies within
/// [(1-gamma), (1+gamma)] times the squared original distance.
JlReport jl_check(const RowMatrix& points, const LinearReductionMap& map, double gamma);

void save_map(const LinearReductionMap& map, const std::filesystem::path& csv_path);
/// Reads `<stem>.csv` and its `<stem>.meta` sidecar.
LinearReductionMap load_map(const std::filesystem::path& csv_path);
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

}  // namespace gamered
