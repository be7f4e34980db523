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

#include "gamered/config.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

#include "gamered/error.hpp"

namespace gamered {
namespace {

using KeyList = std::vector<std::pair<std::string, std::string>>;

struct CommandInfo {
  Command command;
  std::string_view name;
  KeyList keys;
};

const std::vector<CommandInfo>& registry() {
  static const std::vector<CommandInfo> table = {
      {Command::jl_check, "jl-check",
       {{"d", "512"}, {"r", "128"}, {"gamma", "0.5"}, {"points", "1000"}, {"map", "gaussian"}, {"input", ""}}},
      {Command::quad_demo, "quad-demo", {{"dim", "50"}, {"game", ""}}},
      {Command::reduce_quad, "reduce-quad",
       {{"dim", "500"},
        {"k", "20"},
        {"map1", "gaussian"},
        {"map2", "gaussian"},
        {"same_map", "false"},
        {"game", ""},
        {"samples", "100"}}},
      {Command::convex_demo, "convex-demo",
       {{"game", "coupled"},
        {"dim", "5"},
        {"coupling", "0.5"},
        {"antisymmetric", "false"},
        {"halfwidth", "10"},
        {"tol", "1e-8"},
        {"max_rounds", "200"},
        {"fd_gradient_step", "1e-5"},
        {"fd_hessian_step", "1e-4"}}},
      {Command::svm_train, "svm-train",
       {{"data", ""}, {"n", "200"}, {"d", "50"}, {"separation", "4"}, {"C", "1"}, {"tol", "1e-6"}}},
      {Command::adv_game, "adv-game",
       {{"data", ""},
        {"n", "200"},
        {"d", "50"},
        {"separation", "4"},
        {"C", "1"},
        {"defender_r_list", "25,38,50"},
        {"defender_s_list", "100,150,200"},
        {"attacker_budget_list", "0,0.1,0.3"},
        {"attacker_k_list", "0,10,20"},
        {"c_D_R", "0"},
        {"c_D_S", "0"},
        {"c_A", "0"},
        {"replicates", "5"},
        {"rho", "0"}}},
      {Command::gen_synth, "gen-synth", {{"n", "200"}, {"d", "50"}, {"separation", "4"}}},
  };
  return table;
}

const CommandInfo& info(Command command) {
  for (const auto& c : registry())
    if (c.command == command) return c;
  throw InvalidArgument("unknown command");
}

std::uint64_t parse_seed(const std::string& text) {
  std::uint64_t v = 0;
  const auto t = io::trim(text);
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) {
    throw InvalidArgument("parameter 'seed': expected an unsigned integer, got '" + text + "'");
  }
  return v;
}

}  // namespace

std::string_view to_string(Command command) { return info(command).name; }

Command parse_command(std::string_view name) {
  std::string valid;
  for (const auto& c : registry()) {
    if (c.name == name) return c.command;
    valid += (valid.empty() ? "" : ", ") + std::string(c.name);
  }
  throw InvalidArgument("unknown command '" + std::string(name) + "' (expected one of: " + valid + ")");
}

const std::vector<Command>& all_commands() {
  static const std::vector<Command> out = [] {
    std::vector<Command> v;
    for (const auto& c : registry()) v.push_back(c.command);
    return v;
  }();
  return out;
}

const std::vector<std::pair<std::string, std::string>>& command_keys(Command command) { return info(command).keys; }

RunConfig RunConfig::make(Command command, const io::KeyValues& file_values, const std::vector<std::string>& overrides,
                          std::optional<std::uint64_t> seed, std::optional<std::filesystem::path> out) {
  RunConfig cfg;
  cfg.command_ = command;
  io::KeyValues merged = file_values;
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw InvalidArgument("override '" + o + "' is not of the form key=value");
    const std::string key(io::trim(std::string_view(o).substr(0, eq)));
    if (key.empty()) throw InvalidArgument("override '" + o + "' has an empty key");
    merged[key] = std::string(io::trim(std::string_view(o).substr(eq + 1)));
  }

  const auto& keys = command_keys(command);
  for (const auto& [k, v] : keys) cfg.values_[k] = v;
  for (const auto& [k, v] : merged) {
    if (k == "seed") {
      cfg.seed_ = parse_seed(v);
    } else if (k == "out") {
      cfg.out_ = v;
    } else if (cfg.values_.count(k) == 0) {
      throw InvalidArgument("unknown key '" + k + "' for command " + std::string(to_string(command)));
    } else {
      cfg.values_[k] = v;
    }
  }
  if (seed) cfg.seed_ = *seed;
  if (out) cfg.out_ = *out;
  return cfg;
}

RunConfig RunConfig::load(Command command, const std::optional<std::filesystem::path>& file,
                          const std::vector<std::string>& overrides, std::optional<std::uint64_t> seed,
                          std::optional<std::filesystem::path> out) {
  return make(command, file ? io::read_key_values(*file) : io::KeyValues{}, overrides, seed, std::move(out));
}

const std::string& RunConfig::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw InvalidArgument("parameter '" + key + "' is not defined for this command");
  return it->second;
}

bool RunConfig::has(const std::string& key) const {
  const auto it = values_.find(key);
  return it != values_.end() && !it->second.empty();
}

std::string RunConfig::text(const std::string& key) const { return raw(key); }

double RunConfig::real(const std::string& key) const {
  const std::string& v = raw(key);
  try {
    return io::parse_real(v, "parameter '" + key + "'", 0);
  } catch (const ParseError&) {
    throw InvalidArgument("parameter '" + key + "': expected a real number, got '" + v + "'");
  }
}

long long RunConfig::integer(const std::string& key) const {
  const std::string& v = raw(key);
  const auto t = io::trim(v);
  long long out = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size()) {
    throw InvalidArgument("parameter '" + key + "': expected an integer, got '" + v + "'");
  }
  return out;
}

bool RunConfig::flag(const std::string& key) const {
  const std::string v(io::trim(raw(key)));
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidArgument("parameter '" + key + "': expected true or false, got '" + v + "'");
}

std::vector<double> RunConfig::real_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : io::split(raw(key), ',')) {
    try {
      out.push_back(io::parse_real(io::trim(item), "parameter '" + key + "'", 0));
    } catch (const ParseError&) {
      throw InvalidArgument("parameter '" + key + "': bad list entry '" + item + "'");
    }
  }
  if (out.empty()) throw InvalidArgument("parameter '" + key + "': empty list");
  return out;
}

std::vector<long long> RunConfig::integer_list(const std::string& key) const {
  std::vector<long long> out;
  for (const auto& item : io::split(raw(key), ',')) {
    const auto t = io::trim(item);
    long long v = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || p != t.data() + t.size()) {
      throw InvalidArgument("parameter '" + key + "': bad list entry '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw InvalidArgument("parameter '" + key + "': empty list");
  return out;
}

double RunConfig::real_in(const std::string& key, double lo, double hi) const {
  const double v = real(key);
  if (!(v >= lo && v <= hi)) {
    throw InvalidArgument("parameter '" + key + "' = " + io::format_real(v) + " is outside [" + io::format_real(lo) +
                          ", " + io::format_real(hi) + "]");
  }
  return v;
}

long long RunConfig::integer_in(const std::string& key, long long lo, long long hi) const {
  const long long v = integer(key);
  if (v < lo || v > hi) {
    throw InvalidArgument("parameter '" + key + "' = " + std::to_string(v) + " is outside [" + std::to_string(lo) +
                          ", " + std::to_string(hi) + "]");
  }
  return v;
}

}  // namespace gamered
