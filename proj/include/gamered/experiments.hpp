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

// Experiment runner behind the `gamered` command-line tool. Every command
// writes `report.csv` into the output directory; some write extra files:
//
//   quad-demo    x1.csv, x2.csv
//   reduce-quad  reduced/ (game directory)
//   convex-demo  rounds.csv
//   svm-train    w.csv
//   adv-game     equilibrium.csv, margins.csv
//   gen-synth    dataset.csv
//
// Outputs depend only on the configuration, the input files and the seed.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "gamered/config.hpp"
#include "gamered/linalg.hpp"

namespace gamered {

/// n x d standard normal points, row i drawn from derive_seed(seed, {i}).
RowMatrix gaussian_points(Eigen::Index n, Eigen::Index d, std::uint64_t seed);

/// Runs the configured command and returns the files it wrote, in order.
std::vector<std::filesystem::path> run(const RunConfig& config);

}  // namespace gamered
