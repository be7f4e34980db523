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

// Run configuration for the experiment harness. A configuration is a flat
// key=value file plus `--set key=value` overrides; every command has a fixed
// key set with defaults, and unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gamered/io.hpp"

namespace gamered {

enum class Command { jl_check, quad_demo, reduce_quad, convex_demo, svm_train, adv_game, gen_synth };

std::string_view to_string(Command command);
/// Throws InvalidArgument listing the valid names.
Command parse_command(std::string_view name);
const std::vector<Command>& all_commands();

/// Keys accepted by `command`, with their default values in declaration
/// order. An empty default means "unset".
const std::vector<std::pair<std::string, std::string>>& command_keys(Command command);

class RunConfig {
 public:
  /// Builds a configuration from file values and overrides (later wins).
  /// `seed` and `out` may come from either source; explicit arguments take
  /// precedence over both.
  static RunConfig make(Command command, const io::KeyValues& file_values,
                        const std::vector<std::string>& overrides = {}, std::optional<std::uint64_t> seed = {},
                        std::optional<std::filesystem::path> out = {});
  static RunConfig load(Command command, const std::optional<std::filesystem::path>& file,
                        const std::vector<std::string>& overrides = {}, std::optional<std::uint64_t> seed = {},
                        std::optional<std::filesystem::path> out = {});

  Command command() const noexcept { return command_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::filesystem::path& out_dir() const noexcept { return out_; }
  const io::KeyValues& values() const noexcept { return values_; }

  bool has(const std::string& key) const;
  std::string text(const std::string& key) const;
  double real(const std::string& key) const;
  long long integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> real_list(const std::string& key) const;
  std::vector<long long> integer_list(const std::string& key) const;

  /// Range checks; the message names the parameter.
  double real_in(const std::string& key, double lo, double hi) const;
  long long integer_in(const std::string& key, long long lo, long long hi) const;

 private:
  const std::string& raw(const std::string& key) const;

  Command command_ = Command::jl_check;
  std::uint64_t seed_ = 0;
  std::filesystem::path out_ = "out";
  io::KeyValues values_;
};

}  // namespace gamered
