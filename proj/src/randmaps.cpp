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

#include "gamered/randmaps.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gamered/error.hpp"
#include "gamered/io.hpp"
#include "gamered/rng.hpp"
#include "gamered/simd/kernels.hpp"

namespace gamered {
namespace {

std::vector<std::size_t> validate_selection(const RowMatrix& e) {
  std::vector<std::size_t> selected;
  std::vector<bool> used(static_cast<std::size_t>(e.cols()), false);
  for (Eigen::Index r = 0; r < e.rows(); ++r) {
    Eigen::Index unit = -1;
    for (Eigen::Index c = 0; c < e.cols(); ++c) {
      const double v = e(r, c);
      if (v == 1.0) {
        if (unit >= 0) throw InvalidArgument("selection map row " + std::to_string(r) + " has more than one unit entry");
        unit = c;
      } else if (v != 0.0) {
        throw InvalidArgument("selection map entries must be 0 or 1");
      }
    }
    if (unit < 0) throw InvalidArgument("selection map row " + std::to_string(r) + " has no unit entry");
    if (used[static_cast<std::size_t>(unit)]) {
      throw InvalidArgument("selection map selects column " + std::to_string(unit) + " twice");
    }
    used[static_cast<std::size_t>(unit)] = true;
    selected.push_back(static_cast<std::size_t>(unit));
  }
  return selected;
}

}  // namespace

std::string_view to_string(MapKind kind) noexcept {
  switch (kind) {
    case MapKind::gaussian:
      return "gaussian";
    case MapKind::sign:
      return "sign";
    case MapKind::selection:
      return "selection";
  }
  return "unknown";
}

MapKind parse_map_kind(std::string_view name) {
  if (name == "gaussian") return MapKind::gaussian;
  if (name == "sign") return MapKind::sign;
  if (name == "selection") return MapKind::selection;
  throw InvalidArgument("unknown map kind '" + std::string(name) + "' (expected gaussian, sign or selection)");
}

LinearReductionMap LinearReductionMap::from_matrix(MapKind kind, RowMatrix entries, double scale,
                                                   std::uint64_t seed) {
  if (entries.rows() < 1 || entries.rows() > entries.cols()) {
    throw InvalidArgument("reduction map must be K x M with 1 <= K <= M, got " + std::to_string(entries.rows()) +
                          " x " + std::to_string(entries.cols()));
  }
  if (!std::isfinite(scale) || scale <= 0.0) throw InvalidArgument("reduction map scale must be positive");
  std::vector<std::size_t> selected;
  if (kind == MapKind::selection) {
    selected = validate_selection(entries);
  } else if (kind == MapKind::sign) {
    if (!((entries.array() == 1.0) || (entries.array() == -1.0)).all()) {
      throw InvalidArgument("sign map entries must be +1 or -1");
    }
  }
  if (!entries.allFinite()) throw InvalidArgument("reduction map entries must be finite");
  return LinearReductionMap(kind, std::move(entries), scale, seed, std::move(selected));
}

LinearReductionMap make_map(MapKind kind, Eigen::Index reduced_dim, Eigen::Index ambient_dim, std::uint64_t seed,
                            std::optional<std::vector<std::size_t>> selected_indices) {
  if (reduced_dim < 1 || ambient_dim < 1) throw InvalidArgument("map dimensions must be positive");
  if (reduced_dim > ambient_dim) {
    throw InvalidArgument("reduced dimension " + std::to_string(reduced_dim) + " exceeds ambient dimension " +
                          std::to_string(ambient_dim));
  }
  RowMatrix entries = RowMatrix::Zero(reduced_dim, ambient_dim);

  if (kind == MapKind::selection) {
    std::vector<std::size_t> idx;
    if (selected_indices) {
      idx = *selected_indices;
      if (static_cast<Eigen::Index>(idx.size()) != reduced_dim) {
        throw InvalidArgument("selection needs exactly " + std::to_string(reduced_dim) + " indices, got " +
                              std::to_string(idx.size()));
      }
      std::vector<bool> seen(static_cast<std::size_t>(ambient_dim), false);
      for (std::size_t i : idx) {
        if (i >= static_cast<std::size_t>(ambient_dim)) {
          throw InvalidArgument("selection index " + std::to_string(i) + " out of range");
        }
        if (seen[i]) throw InvalidArgument("duplicate selection index " + std::to_string(i));
        seen[i] = true;
      }
    } else {
      Rng rng(seed);
      idx = rng.sample_without_replacement(static_cast<std::size_t>(ambient_dim), static_cast<std::size_t>(reduced_dim));
      std::sort(idx.begin(), idx.end());
    }
    for (std::size_t r = 0; r < idx.size(); ++r) entries(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(idx[r])) = 1.0;
    return LinearReductionMap(kind, std::move(entries), 1.0, seed, std::move(idx));
  }

  if (selected_indices) throw InvalidArgument("selected_indices only apply to selection maps");
  for (Eigen::Index r = 0; r < reduced_dim; ++r) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(r)}));
    for (Eigen::Index c = 0; c < ambient_dim; ++c) {
      entries(r, c) = kind == MapKind::gaussian ? rng.normal() : rng.sign();
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(reduced_dim));
  return LinearReductionMap(kind, std::move(entries), scale, seed, {});
}

LinearReductionMap identity_map(Eigen::Index dim) {
  std::vector<std::size_t> all(static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return make_map(MapKind::selection, dim, dim, 0, all);
}

Vector apply_map(const LinearReductionMap& map, const Vector& x) {
  if (x.size() != map.cols()) {
    throw InvalidArgument("apply_map: vector length " + std::to_string(x.size()) + " does not match map columns " +
                          std::to_string(map.cols()));
  }
  Vector y(map.rows());
  if (map.kind() == MapKind::selection) {
    const auto& sel = map.selected();
    for (std::size_t r = 0; r < sel.size(); ++r) y(static_cast<Eigen::Index>(r)) = x(static_cast<Eigen::Index>(sel[r]));
    return y;
  }
  simd::gemv(map.entries().data(), static_cast<std::size_t>(map.rows()), static_cast<std::size_t>(map.cols()),
             x.data(), y.data());
  y *= map.scale();
  return y;
}

RowMatrix apply_map_rows(const LinearReductionMap& map, const RowMatrix& points) {
  if (points.cols() != map.cols()) {
    throw InvalidArgument("apply_map_rows: points have " + std::to_string(points.cols()) +
                          " columns, map expects " + std::to_string(map.cols()));
  }
  RowMatrix out(points.rows(), map.rows());
  const auto rows = static_cast<std::size_t>(map.rows());
  const auto cols = static_cast<std::size_t>(map.cols());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    if (map.kind() == MapKind::selection) {
      const auto& sel = map.selected();
      for (std::size_t r = 0; r < sel.size(); ++r) out(i, static_cast<Eigen::Index>(r)) = points(i, static_cast<Eigen::Index>(sel[r]));
      continue;
    }
    simd::gemv(map.entries().data(), rows, cols, points.row(i).data(), out.row(i).data());
    out.row(i) *= map.scale();
  }
  return out;
}

double jl_bound(double gamma, Eigen::Index reduced_dim) {
  const double g2 = gamma * gamma;
  return 1.0 - 2.0 * std::exp(-(g2 - g2 * gamma) * static_cast<double>(reduced_dim) / 4.0);
}

JlReport jl_check(const RowMatrix& points, const LinearReductionMap& map, double gamma) {
  if (points.rows() < 2) throw InvalidArgument("jl_check needs at least 2 points");
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("jl_check: gamma must lie in (0, 1)");
  const RowMatrix reduced = apply_map_rows(map, points);

  JlReport rep;
  rep.gamma = gamma;
  rep.theoretical_bound = jl_bound(gamma, map.rows());
  const Eigen::Index n = points.rows();
  const auto d = static_cast<std::size_t>(points.cols());
  const auto r = static_cast<std::size_t>(reduced.cols());
  const auto& k = simd::active_table();
  const auto nn = static_cast<std::size_t>(n);
  rep.pairs_tested = nn * (nn - 1) / 2;
  rep.per_pair_distortion.assign(rep.pairs_tested, 1.0);
  // Tiled so both row blocks stay in cache; results land at their row-major
  // pair index, so the order does not depend on the tiling.
  constexpr Eigen::Index kTile = 64;
  const auto record = [&](Eigen::Index i, Eigen::Index j, double orig, double red) {
    // A linear map sends coincident points to coincident points.
    if (orig == 0.0 || ((1.0 - gamma) * orig <= red && red <= (1.0 + gamma) * orig)) ++rep.pairs_preserved;
    if (orig == 0.0) return;
    const auto ui = static_cast<std::size_t>(i);
    rep.per_pair_distortion[ui * (2 * nn - ui - 1) / 2 + static_cast<std::size_t>(j - i - 1)] = red / orig;
  };
  const auto quad = [&](Eigen::Index i, Eigen::Index j) {
    const double* pb[4] = {points.row(j).data(), points.row(j + 1).data(), points.row(j + 2).data(),
                           points.row(j + 3).data()};
    const double* rb[4] = {reduced.row(j).data(), reduced.row(j + 1).data(), reduced.row(j + 2).data(),
                           reduced.row(j + 3).data()};
    double orig[4], red[4];
    k.squared_distance4(points.row(i).data(), pb, d, orig);
    k.squared_distance4(reduced.row(i).data(), rb, r, red);
    for (int t = 0; t < 4; ++t) record(i, j + t, orig[t], red[t]);
  };
  const auto single = [&](Eigen::Index i, Eigen::Index j) {
    record(i, j, k.squared_distance(points.row(i).data(), points.row(j).data(), d),
           k.squared_distance(reduced.row(i).data(), reduced.row(j).data(), r));
  };
  for (Eigen::Index i0 = 0; i0 < n; i0 += kTile) {
    const Eigen::Index i1 = std::min(n, i0 + kTile);
    // Diagonal tile: upper triangle only.
    for (Eigen::Index i = i0; i < i1; ++i) {
      Eigen::Index j = i + 1;
      for (; j + 4 <= i1; j += 4) quad(i, j);
      for (; j < i1; ++j) single(i, j);
    }
    // Off-diagonal tiles: each group of four partners stays hot in L1 while
    // the rows of the i tile stream past it.
    for (Eigen::Index j0 = i1; j0 < n; j0 += kTile) {
      const Eigen::Index j1 = std::min(n, j0 + kTile);
      Eigen::Index j = j0;
      for (; j + 4 <= j1; j += 4)
        for (Eigen::Index i = i0; i < i1; ++i) quad(i, j);
      for (; j < j1; ++j)
        for (Eigen::Index i = i0; i < i1; ++i) single(i, j);
    }
  }
  rep.empirical_fraction = static_cast<double>(rep.pairs_preserved) / static_cast<double>(rep.pairs_tested);
  return rep;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".meta");
  return p;
}

void save_map(const LinearReductionMap& map, const std::filesystem::path& csv_path) {
  io::write_matrix_csv(csv_path, map.entries());
  io::write_key_values(sidecar_path(csv_path), {{"kind", std::string(to_string(map.kind()))},
                                                {"rows", std::to_string(map.rows())},
                                                {"cols", std::to_string(map.cols())},
                                                {"scale", io::format_real(map.scale())},
                                                {"seed", std::to_string(map.seed())}});
}

LinearReductionMap load_map(const std::filesystem::path& csv_path) {
  const auto meta_path = sidecar_path(csv_path);
  const auto meta = io::read_key_values(meta_path);
  const auto get = [&](const char* key) -> const std::string& {
    const auto it = meta.find(key);
    if (it == meta.end()) throw ParseError(meta_path.string(), 0, std::string("missing key '") + key + "'");
    return it->second;
  };
  for (const auto& [key, value] : meta) {
    if (key != "kind" && key != "rows" && key != "cols" && key != "scale" && key != "seed") {
      throw ParseError(meta_path.string(), 0, "unknown key '" + key + "'");
    }
  }
  RowMatrix entries = io::read_matrix_csv(csv_path);
  const long long rows = std::stoll(get("rows"));
  const long long cols = std::stoll(get("cols"));
  if (rows != entries.rows() || cols != entries.cols()) {
    throw ParseError(csv_path.string(), 0, "matrix shape does not match sidecar rows/cols");
  }
  return LinearReductionMap::from_matrix(parse_map_kind(get("kind")), std::move(entries),
                                         io::parse_real(get("scale"), meta_path.string(), 0),
                                         std::stoull(get("seed")));
}

}  // namespace gamered
