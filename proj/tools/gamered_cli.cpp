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

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gamered/config.hpp"
#include "gamered/experiments.hpp"
#include "gamered/simd/kernels.hpp"

namespace {

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced strategic games: random maps, quadratic and convex games, adversarial SVM grid games."};
  std::string command;
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool list_keys = false;

  std::string names;
  for (auto c : gamered::all_commands()) names += (names.empty() ? "" : ", ") + std::string(gamered::to_string(c));
  app.add_option("command", command, "One of: " + names)->required();
  app.add_option("--config", config_path, "key=value configuration file")->check(CLI::ExistingFile);
  app.add_option("--set", overrides, "Override a key (repeatable), e.g. --set r=64");
  app.add_option("--seed", seed, "Random seed (overrides the config)");
  app.add_option("--out", out, "Output directory (overrides the config)");
  app.add_flag("--list-keys", list_keys, "Print the command's keys with defaults and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    const gamered::Command cmd = gamered::parse_command(command);
    if (list_keys) {
      for (const auto& [k, v] : gamered::command_keys(cmd)) std::cout << k << '=' << v << '\n';
      return 0;
    }
    std::optional<std::filesystem::path> file;
    if (!config_path.empty()) file = config_path;
    std::optional<std::filesystem::path> out_dir;
    if (out) out_dir = *out;
    const auto cfg = gamered::RunConfig::load(cmd, file, overrides, seed, out_dir);
    for (const auto& p : gamered::run(cfg)) std::cout << p.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 0;
}
