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

#include <algorithm>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "gamered/config.hpp"
#include "gamered/error.hpp"
#include "gamered/experiments.hpp"
#include "gamered/io.hpp"
#include "test_util.hpp"

namespace gamered {
namespace {

namespace fs = std::filesystem;
using gamered::testing::TempDir;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Second line is the header, third the single data row.
std::map<std::string, std::string> single_row(const fs::path& csv) {
  std::istringstream in(slurp(csv));
  std::string schema, header, row;
  std::getline(in, schema);
  std::getline(in, header);
  std::getline(in, row);
  const auto h = io::split(header, ',');
  const auto r = io::split(row, ',');
  std::map<std::string, std::string> m;
  for (std::size_t i = 0; i < h.size() && i < r.size(); ++i) m[h[i]] = r[i];
  return m;
}

TEST(Commands, NamesRoundTrip) {
  for (Command c : all_commands()) EXPECT_EQ(parse_command(to_string(c)), c);
  try {
    parse_command("nope");
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("svm-train"), std::string::npos);
  }
}

TEST(RunConfig, DefaultsOverridesAndUnknownKeys) {
  const auto cfg = RunConfig::make(Command::svm_train, {{"C", "2"}}, {"C=3", "tol = 1e-7"});
  EXPECT_EQ(cfg.real("C"), 3.0);
  EXPECT_EQ(cfg.real("tol"), 1e-7);
  EXPECT_EQ(cfg.integer("n"), 200);
  EXPECT_FALSE(cfg.has("data"));
  try {
    RunConfig::make(Command::svm_train, {{"gamma", "1"}});
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("unknown key 'gamma'"), std::string::npos);
  }
  EXPECT_THROW(RunConfig::make(Command::svm_train, {}, {"C"}), InvalidArgument);
}

TEST(RunConfig, SeedAndOutPrecedence) {
  const auto a = RunConfig::make(Command::gen_synth, {{"seed", "5"}, {"out", "x"}}, {"seed=6"});
  EXPECT_EQ(a.seed(), 6u);
  EXPECT_EQ(a.out_dir(), fs::path("x"));
  const auto b = RunConfig::make(Command::gen_synth, {{"seed", "5"}}, {"seed=6"}, 7, fs::path("y"));
  EXPECT_EQ(b.seed(), 7u);
  EXPECT_EQ(b.out_dir(), fs::path("y"));
  EXPECT_THROW(RunConfig::make(Command::gen_synth, {{"seed", "-1"}}), InvalidArgument);
}

TEST(RunConfig, TypedGetters) {
  const auto cfg = RunConfig::make(Command::adv_game, {},
                                   {"defender_r_list=5, 6", "c_A=0.5", "replicates=x", "attacker_budget_list=0.1,,"});
  EXPECT_EQ(cfg.integer_list("defender_r_list"), (std::vector<long long>{5, 6}));
  EXPECT_EQ(cfg.real_in("c_A", 0, 1), 0.5);
  EXPECT_THROW(cfg.real_in("c_A", 0.6, 1), InvalidArgument);
  EXPECT_THROW(cfg.integer("replicates"), InvalidArgument);
  EXPECT_THROW(cfg.real_list("attacker_budget_list"), InvalidArgument);
  EXPECT_THROW(cfg.text("nope"), InvalidArgument);
  const auto q = RunConfig::make(Command::reduce_quad, {}, {"same_map=yes"});
  EXPECT_TRUE(q.flag("same_map"));
  const auto bad = RunConfig::make(Command::reduce_quad, {}, {"same_map=maybe"});
  EXPECT_THROW(bad.flag("same_map"), InvalidArgument);
  try {
    cfg.integer_in("replicates", 1, 10);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("replicates"), std::string::npos);
  }
}

TEST(RunConfig, LoadsFile) {
  TempDir dir;
  std::ofstream(dir / "c.cfg") << "# comment\nd = 8\nr=4\n";
  const auto cfg = RunConfig::load(Command::jl_check, dir / "c.cfg", {"r=3"});
  EXPECT_EQ(cfg.integer("d"), 8);
  EXPECT_EQ(cfg.integer("r"), 3);
  EXPECT_EQ(RunConfig::load(Command::jl_check, std::nullopt).integer("d"), 512);
}

TEST(Run, EveryCommandWritesReport) {
  TempDir dir;
  const std::vector<std::pair<Command, std::vector<std::string>>> cases = {
      {Command::jl_check, {"d=20", "r=10", "points=30"}},
      {Command::quad_demo, {"dim=6"}},
      {Command::reduce_quad, {"dim=12", "k=4", "samples=10"}},
      {Command::convex_demo, {"dim=3"}},
      {Command::svm_train, {"n=20", "d=3"}},
      {Command::adv_game, {"n=40", "d=6", "defender_r_list=3,6", "defender_s_list=30,40", "attacker_budget_list=0,0.1",
                           "attacker_k_list=0,2", "replicates=2"}},
      {Command::gen_synth, {"n=10", "d=2"}},
  };
  for (const auto& [cmd, over] : cases) {
    const fs::path out = dir / std::string(to_string(cmd));
    const auto cfg = RunConfig::make(cmd, {}, over, 3, out);
    const auto files = run(cfg);
    ASSERT_FALSE(files.empty()) << to_string(cmd);
    EXPECT_NE(std::find(files.begin(), files.end(), out / "report.csv"), files.end());
    for (const auto& f : files) EXPECT_TRUE(fs::exists(f)) << f;
    EXPECT_EQ(slurp(out / "report.csv").rfind("# gamered." + std::string(to_string(cmd)) + "/1\n", 0), 0u);
  }
}

TEST(Run, ConvexDemoConverges) {
  TempDir dir;
  const auto row = (run(RunConfig::make(Command::convex_demo, {}, {}, 1, dir.path())), single_row(dir / "report.csv"));
  EXPECT_EQ(row.at("converged"), "1");
  EXPECT_EQ(row.at("convexity_warning"), "0");
}

TEST(Run, SvmTrainOnTwoPointFile) {
  TempDir dir;
  const std::string data = std::string(GAMERED_SOURCE_DIR) + "/data/two_point.csv";
  run(RunConfig::make(Command::svm_train, {}, {"data=" + data, "C=10"}, 0, dir.path()));
  const auto row = single_row(dir / "report.csv");
  EXPECT_NEAR(std::stod(row.at("margin")), 1.0, 1e-9);
  EXPECT_NEAR(std::stod(row.at("bias")), 0.0, 1e-9);
  EXPECT_EQ(row.at("training_accuracy"), "1");
  const Vector w = io::read_vector_csv(dir / "w.csv");
  EXPECT_NEAR(w(0), 1.0, 1e-9);
}

TEST(Run, TrivialAdvGame) {
  TempDir dir;
  run(RunConfig::make(Command::adv_game, {},
                      {"n=20", "d=4", "defender_r_list=4", "defender_s_list=20", "attacker_budget_list=0",
                       "attacker_k_list=0", "replicates=1"},
                      0, dir.path()));
  const auto row = single_row(dir / "equilibrium.csv");
  EXPECT_NEAR(std::stod(row.at("payoff_d")), -1.0, 1e-9);
  EXPECT_NEAR(std::stod(row.at("payoff_a")), 1.0, 1e-9);
  EXPECT_EQ(row.at("is_ne"), "1");
}

TEST(Run, RerunsAreByteIdentical) {
  TempDir dir;
  const std::vector<std::string> over = {"n=40", "d=6", "defender_r_list=3,6", "defender_s_list=30,40",
                                         "attacker_budget_list=0,0.2", "attacker_k_list=0,3", "replicates=2",
                                         "c_A=0.1"};
  run(RunConfig::make(Command::adv_game, {}, over, 9, dir / "a"));
  run(RunConfig::make(Command::adv_game, {}, over, 9, dir / "b"));
  for (const char* f : {"report.csv", "equilibrium.csv", "margins.csv"}) {
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
}

TEST(Run, RangeErrorsNameTheParameter) {
  TempDir dir;
  try {
    run(RunConfig::make(Command::jl_check, {}, {"gamma=1.5"}, 0, dir.path()));
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("gamma"), std::string::npos);
  }
}

}  // namespace
}  // namespace gamered
