// Copyright 2026 The pnrtomo Authors
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

// Runs the pnrtomo binary on small configurations and inspects the files it
// writes.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gtest/gtest.h"

#include "pnrtomo/commands.h"
#include "pnrtomo/shot_io.h"

namespace fs = std::filesystem;
using namespace pnrtomo;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("pnrtomo_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string &args) const {
    const std::string cmd = std::string(PNRTOMO_CLI) + " " + args + " > " + (dir_ / "stdout.txt").string() +
                            " 2> " + (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string out(const std::string &name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

std::string slurp(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Small but complete: every outcome class appears at the brightest probe.
const std::string kSmall = "--probes 0.5,2,5.7 --shots 1500 --truncation 25 --reference-method supervised";

}  // namespace

TEST_F(CliTest, one_probe_ten_shots) {
  ASSERT_EQ(run("simulate -o " + out("run") + " --probes 4.5 --shots 10"), 0);
  const ShotBatch batch = read_shots_file(out("run/shots-00.bin"));
  EXPECT_EQ(batch.shots.size(), 10u);
  EXPECT_EQ(batch.header.mean_photon_number, 4.5);
  const Json manifest = read_json_file(out("run/manifest.json"));
  EXPECT_EQ(manifest["shot_files"].size(), 1u);
  EXPECT_EQ(manifest["config_digest"], digest_hex(batch.header.config_digest));
  EXPECT_EQ(manifest["config"]["shots_per_probe"], 10);
}

TEST_F(CliTest, reruns_are_byte_identical) {
  ASSERT_EQ(run("simulate -o " + out("a") + " --probes 1,4.5 --shots 50 --seed 5"), 0);
  ASSERT_EQ(run("simulate -o " + out("b") + " --probes 1,4.5 --shots 50 --seed 5 --threads 2"), 0);
  EXPECT_EQ(slurp(out("a/shots-00.bin")), slurp(out("b/shots-00.bin")));
  EXPECT_EQ(slurp(out("a/shots-01.bin")), slurp(out("b/shots-01.bin")));
  ASSERT_EQ(run("simulate -o " + out("c") + " --probes 1,4.5 --shots 50 --seed 6"), 0);
  EXPECT_NE(slurp(out("a/shots-01.bin")), slurp(out("c/shots-01.bin")));
}

TEST_F(CliTest, full_run_writes_every_artifact_and_is_reproducible) {
  ASSERT_EQ(run("full -o " + out("run") + " " + kSmall), 0) << slurp(out("stderr.txt"));
  for (const char *name : {"manifest.json", "shots-00.bin", "shots-02.bin", "references.json", "stats.json",
                           "stats.csv", "stats-single-point.json", "stats-single-point.csv", "labels-01.csv",
                           "labels-single-point-01.csv", "povm.json", "povm.csv", "report.json", "statistics.svg",
                           "povm.svg", "errors.svg"}) {
    EXPECT_TRUE(fs::exists(out("run/") + name)) << name;
  }
  const std::string digest = read_json_file(out("run/manifest.json"))["config_digest"];
  for (const char *name : {"references.json", "stats.json", "povm.json", "report.json"}) {
    EXPECT_EQ(read_json_file(out("run/") + name)["config_digest"], digest) << name;
  }
  EXPECT_EQ(slurp(out("run/stats.csv")).rfind("# config_digest: " + digest + "\n", 0), 0u);
  const Json povm = read_json_file(out("run/povm.json"));
  EXPECT_EQ(povm["solver_report"]["gamma"], 0.01);
  EXPECT_EQ(povm.at("entries").size(), 25u);

  // Report again from the same inputs.
  const std::string svg = slurp(out("run/povm.svg"));
  ASSERT_EQ(run("report -o " + out("run")), 0) << slurp(out("stderr.txt"));
  EXPECT_EQ(svg, slurp(out("run/povm.svg")));

  // A fresh directory with the same configuration gives the same bytes.
  ASSERT_EQ(run("full -o " + out("again") + " " + kSmall + " --threads 2"), 0);
  for (const char *name : {"stats.json", "povm.json", "report.json", "statistics.svg", "labels-02.csv"}) {
    EXPECT_EQ(slurp(out("run/") + name), slurp(out("again/") + name)) << name;
  }
}

TEST_F(CliTest, label_files_share_row_order) {
  ASSERT_EQ(run("full -o " + out("run") + " " + kSmall), 0);
  std::istringstream pattern(slurp(out("run/labels-02.csv")));
  std::istringstream single(slurp(out("run/labels-single-point-02.csv")));
  std::string a, b;
  std::size_t rows = 0;
  std::getline(pattern, a);
  std::getline(single, b);
  std::getline(pattern, a);
  std::getline(single, b);
  EXPECT_EQ(a.rfind("shot,label,sse0", 0), 0u);
  EXPECT_EQ(b, "shot,label");
  while (std::getline(pattern, a) && std::getline(single, b)) {
    EXPECT_EQ(a.substr(0, a.find(',')), b.substr(0, b.find(',')));
    ++rows;
  }
  EXPECT_EQ(rows, 1500u);
}

TEST_F(CliTest, report_refuses_mixed_configurations) {
  ASSERT_EQ(run("full -o " + out("run") + " " + kSmall), 0);
  ASSERT_EQ(run("tomography -o " + out("run") + " --gamma 0.1"), 0);
  EXPECT_EQ(run("report -o " + out("run")), 2);
  EXPECT_NE(slurp(out("stderr.txt")).find("config_digest"), std::string::npos);
}

TEST_F(CliTest, classify_refuses_shots_from_another_configuration) {
  ASSERT_EQ(run("simulate -o " + out("run") + " " + kSmall), 0);
  ASSERT_EQ(run("simulate -o " + out("other") + " " + kSmall + " --seed 99"), 0);
  fs::copy_file(out("other/shots-01.bin"), out("run/shots-01.bin"), fs::copy_options::overwrite_existing);
  EXPECT_EQ(run("classify -o " + out("run")), 2);
}

TEST_F(CliTest, exit_codes) {
  {
    std::ofstream bad(out("bad.json"));
    bad << R"({"shots_per_probe": 10, "bogus": 1})";
  }
  EXPECT_EQ(run("simulate -c " + out("bad.json") + " -o " + out("x")), 2);
  EXPECT_NE(slurp(out("stderr.txt")).find("bogus"), std::string::npos);
  {
    std::ofstream broken(out("broken.json"));
    broken << "{ not json";
  }
  EXPECT_EQ(run("simulate -c " + out("broken.json")), 2);
  EXPECT_EQ(run("simulate -o " + out("x") + " --probes 1,2"), 2);
  EXPECT_EQ(run("simulate --no-such-flag"), 2);
  EXPECT_EQ(run("classify -o " + out("missing")), 4);
  EXPECT_EQ(run("simulate -c " + out("nowhere.json")), 4);

  ASSERT_EQ(run("full -o " + out("run") + " " + kSmall), 0);
  {
    std::ofstream cfg(out("slow.json"));
    cfg << R"({"solver": {"max_iterations": 2}})";
  }
  EXPECT_EQ(run("tomography -o " + out("run") + " -c " + out("slow.json") + " " + kSmall), 3);
  EXPECT_TRUE(fs::exists(out("run/povm.json")));
}

TEST_F(CliTest, help_exits_cleanly) { EXPECT_EQ(run("--help"), 0); }
