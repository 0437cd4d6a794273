/* Copyright 2026 The segloss Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(SEGLOSS_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("segloss_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& loss) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << R"({"loss": )" << loss << R"(,
    "scene": {"height": 16, "width": 16, "classes": 3},
    "trainer": {"iterations": 12, "eval_interval": 6, "log_interval": 3, "hidden_channels": 4},
    "eval": {"count": 2, "mask_count": 1}})";
  return p;
}

TEST(Cli, GradcheckPassesAndReportsSchema) {
  const Result r = run("gradcheck adaptive --size 5x5x3 --seed 7");
  EXPECT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.contains("max_rel_error"));
  EXPECT_TRUE(j["passed"].get<bool>());
  for (const char* loss : {"softmax_ce", "focal", "center"})
    EXPECT_EQ(run(std::string("gradcheck ") + loss + " --size 4x4x3").code, 0) << loss;
}

TEST(Cli, GradcheckOverrides) {
  EXPECT_EQ(run("gradcheck adaptive --set loss.k 1 --set loss.window 7").code, 0);
  EXPECT_EQ(run("gradcheck adaptive --set loss.window 4").code, 2);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("gradcheck dice").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("gradcheck adaptive --size 5x5").code, 2);
}

TEST(Cli, InvalidConfigNamesField) {
  const fs::path dir = scratch("badcfg");
  const Result r = run("train " + write_config(dir, R"({"name": "adaptive", "window": 4})").string() +
                       " --out " + (dir / "run").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("loss.window"), std::string::npos) << r.out;
  EXPECT_EQ(run("train " + (dir / "missing.json").string()).code, 2);
  fs::remove_all(dir);
}

TEST(Cli, TrainRerunEvalRoundTrip) {
  const fs::path dir = scratch("train");
  const fs::path cfg = write_config(dir, R"({"name": "adaptive", "k": 3})");
  const std::string out = (dir / "run").string();
  ASSERT_EQ(run("train " + cfg.string() + " --out " + out).code, 0);
  EXPECT_TRUE(fs::exists(dir / "run" / "summary.json"));
  const std::string metrics = slurp(dir / "run" / "metrics.jsonl");
  const std::string summary = slurp(dir / "run" / "summary.json");

  EXPECT_EQ(run("train " + cfg.string() + " --out " + out).code, 1);
  ASSERT_EQ(run("train " + cfg.string() + " --out " + out + " --force").code, 0);
  EXPECT_EQ(slurp(dir / "run" / "metrics.jsonl"), metrics);
  EXPECT_EQ(slurp(dir / "run" / "summary.json"), summary);

  const Result e1 = run("eval " + out + "/checkpoint");
  const Result e2 = run("eval " + out + "/checkpoint");
  ASSERT_EQ(e1.code, 0) << e1.out;
  EXPECT_EQ(e1.out, e2.out);
  const auto report = nlohmann::json::parse(e1.out);
  std::string last_line, line;
  std::istringstream lines(metrics);
  while (std::getline(lines, line))
    if (!line.empty()) last_line = line;
  const auto last = nlohmann::json::parse(last_line);
  EXPECT_EQ(report["mean_iou"].get<double>(), last["mean_iou"].get<double>());

  const Result overridden = run("eval " + out + "/checkpoint --config " + cfg.string());
  EXPECT_EQ(overridden.code, 0);
  fs::remove_all(dir);
}

TEST(Cli, EvalCorruptCheckpointNamesBlob) {
  const fs::path dir = scratch("corrupt");
  const fs::path cfg = write_config(dir, R"({"name": "softmax_ce"})");
  const std::string out = (dir / "run").string();
  ASSERT_EQ(run("train " + cfg.string() + " --out " + out).code, 0);
  const fs::path blob = dir / "run" / "checkpoint" / "conv2.bias.slg";
  std::string bytes = slurp(blob);
  bytes[bytes.size() - 1] ^= 0x01;
  std::ofstream(blob, std::ios::binary | std::ios::trunc) << bytes;
  const Result r = run("eval " + out + "/checkpoint");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("conv2.bias"), std::string::npos) << r.out;
  fs::remove_all(dir);
}

TEST(Cli, GenDataAndSweep) {
  const fs::path dir = scratch("gen");
  const fs::path cfg = write_config(dir, R"({"name": "adaptive"})");
  ASSERT_EQ(run("gen-data --config " + cfg.string() + " --count 2 --out " +
                (dir / "data").string()).code, 0);
  EXPECT_TRUE(fs::exists(dir / "data" / "sample_0001.slg"));
  EXPECT_TRUE(fs::exists(dir / "data" / "sample_0001_labels.png"));

  const Result s = run("k-sweep " + cfg.string() + " --ks 1,3 --out " + (dir / "sweep").string());
  ASSERT_EQ(s.code, 0) << s.out;
  const std::string csv = slurp(dir / "sweep" / "sweep.csv");
  EXPECT_EQ(csv.rfind("k,final_mean_iou,final_loss\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  fs::remove_all(dir);
}

TEST(Cli, ReferenceConfigParsesBack) {
  const Result r = run("reference-config");
  ASSERT_EQ(r.code, 0);
  const fs::path dir = scratch("ref");
  std::ofstream(dir / "ref.json") << r.out;
  EXPECT_EQ(run("gradcheck adaptive --config " + (dir / "ref.json").string()).code, 0);
  fs::remove_all(dir);
}

}  // namespace
