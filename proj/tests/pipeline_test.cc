// Copyright 2026 The Corpus Forge Authors
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

#include "forge/pipeline.h"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>

#include "forge/corpus.h"
#include "forge/error.h"
#include "forge/hash.h"
#include "forge/parallel.h"
#include "nlohmann/json.hpp"
#include "testing.h"

namespace forge {
namespace {

using nlohmann::json;
using testing::TempDir;

std::filesystem::path FixtureDir() { return testing::DataDir() / "pipeline"; }

json FixtureManifest() {
  return json::parse(ReadFileBytes(FixtureDir() / "manifest.json"));
}

bool HasError(const ValidationResult& r, const std::string& needle) {
  for (const std::string& e : r.errors) {
    if (e.find(needle) != std::string::npos) return true;
  }
  return false;
}

std::string Joined(const ValidationResult& r) {
  std::string out;
  for (const std::string& e : r.errors) out += e + "\n";
  return out;
}

struct CliResult {
  int exit_code;
  std::string output;
};

// Runs the forge binary with stderr folded into stdout.
CliResult RunCli(const std::string& args) {
  const std::string command = std::string(FORGE_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return {-1, ""};
  std::string output;
  char buffer[4096];
  std::size_t n;
  while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) output.append(buffer, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, output};
}

TEST(ValidateConfigTest, FixtureIsValid) {
  const ValidationResult r = ValidateConfig(FixtureManifest(), FixtureDir());
  ASSERT_TRUE(r.ok()) << Joined(r);
  EXPECT_EQ(r.manifest->stages.size(), kStageOrder.size());
  EXPECT_EQ(r.manifest->seed.value, 2026u);
}

TEST(ValidateConfigTest, DefaultsAreFilledIn) {
  const json config = {{"stages", {"dedup", "split"}},
                       {"inputs", {{"src", "noisy.en"}, {"tgt", "noisy.sw"},
                                   {"src_lang", "en"}, {"tgt_lang", "sw"}}}};
  const ValidationResult r = ValidateConfig(config, FixtureDir());
  ASSERT_TRUE(r.ok()) << Joined(r);
  const PipelineManifest& m = *r.manifest;
  EXPECT_EQ(m.dedup.threshold, 60.0);
  EXPECT_EQ(m.dedup.window, 50u);
  EXPECT_EQ(m.dedup.top_ngrams, 100000u);
  EXPECT_DOUBLE_EQ(m.augment.replacement_rate, 0.30);
  EXPECT_DOUBLE_EQ(m.sample.alpha, 0.25);
  EXPECT_EQ(m.min_count, 20u);
  EXPECT_EQ(m.config["dedup"]["window"], 50);
  EXPECT_EQ(m.config["sample"]["alpha"], 0.25);
  EXPECT_EQ(m.config["augment"]["rate"], 0.3);
  EXPECT_EQ(m.config["extract-dict"]["min_count"], 20);
}

TEST(ValidateConfigTest, ReportsEveryProblemAtOnce) {
  json config = FixtureManifest();
  config["dedup"]["threshold"] = 101;
  config["sample"]["alpha"] = 0;
  config["dedup"]["foo"] = 1;
  config["bogus"] = true;
  config["evaluate"]["hyp"] = "missing.sw";
  const ValidationResult r = ValidateConfig(config, FixtureDir());
  EXPECT_FALSE(r.manifest.has_value());
  EXPECT_TRUE(HasError(r, "threshold must be in (0,100]")) << Joined(r);
  EXPECT_TRUE(HasError(r, "alpha must be > 0")) << Joined(r);
  EXPECT_TRUE(HasError(r, "unknown key 'dedup.foo'")) << Joined(r);
  EXPECT_TRUE(HasError(r, "unknown key 'bogus'")) << Joined(r);
  EXPECT_TRUE(HasError(r, "missing.sw")) << Joined(r);
  EXPECT_EQ(r.errors.size(), 5u) << Joined(r);
}

TEST(ValidateConfigTest, StageOrderIsEnforced) {
  json config = FixtureManifest();
  config["stages"] = {"split", "filter"};
  EXPECT_TRUE(HasError(ValidateConfig(config, FixtureDir()), "stage order"));
  config["stages"] = {"filter", "split"};
  EXPECT_TRUE(HasError(ValidateConfig(config, FixtureDir()), "contiguous"));
  config["stages"] = {"filter", "translate"};
  EXPECT_FALSE(ValidateConfig(config, FixtureDir()).ok());
}

TEST(ValidateConfigTest, FilesForSkippedStagesAreNotRequired) {
  json config = FixtureManifest();
  config["stages"] = {"filter", "dedup"};
  config["evaluate"]["hyp"] = "missing.sw";
  const ValidationResult r = ValidateConfig(config, FixtureDir());
  EXPECT_TRUE(r.ok()) << Joined(r);
}

TEST(ValidateConfigTest, LaterStagesNeedTheirInputs) {
  json config = FixtureManifest();
  config["stages"] = {"augment", "sample"};
  EXPECT_FALSE(ValidateConfig(config, FixtureDir()).ok());
}

TEST(ApplyOverrideTest, ParsesJsonOrString) {
  json config = {{"dedup", {{"threshold", 60}}}};
  ApplyOverride(config, "dedup.threshold=70.5");
  ApplyOverride(config, "split.assignment=contiguous");
  ApplyOverride(config, "stages=[\"filter\"]");
  EXPECT_EQ(config["dedup"]["threshold"], 70.5);
  EXPECT_EQ(config["split"]["assignment"], "contiguous");
  EXPECT_EQ(config["stages"], json({"filter"}));
  EXPECT_THROW(ApplyOverride(config, "novalue"), Error);
}

class RunPipelineTest : public ::testing::Test {
 protected:
  PipelineManifest Manifest(const std::filesystem::path& out, json config = FixtureManifest()) {
    config["output_dir"] = out.string();
    const ValidationResult r = ValidateConfig(config, FixtureDir());
    EXPECT_TRUE(r.ok()) << Joined(r);
    return *r.manifest;
  }

  TempDir dir_;
};

TEST_F(RunPipelineTest, ReproducesGoldenOutputs) {
  SetThreadCount(3);
  const RunReport report = RunPipeline(Manifest(dir_ / "out"));
  SetThreadCount(1);
  ASSERT_TRUE(report.ok) << report.error;
  EXPECT_EQ(report.stages.size(), kStageOrder.size());
  EXPECT_EQ(testing::DiffTrees(FixtureDir() / "golden", dir_ / "out", {"run_report.json"}),
            std::vector<std::string>{});
  EXPECT_TRUE(std::filesystem::exists(dir_ / "out/run_report.json"));
}

TEST_F(RunPipelineTest, ReportRecordsHashes) {
  json config = FixtureManifest();
  config["stages"] = {"filter", "dedup"};
  const RunReport report = RunPipeline(Manifest(dir_ / "out", config));
  ASSERT_TRUE(report.ok);
  ASSERT_EQ(report.stages.size(), 2u);
  EXPECT_EQ(report.stages[1].outputs.at("dedup.en"), Sha256File(dir_ / "out/dedup.en"));
  EXPECT_EQ(report.inputs.size(), 2u);
  const json saved = json::parse(ReadFileBytes(dir_ / "out/run_report.json"));
  EXPECT_EQ(saved["stages"].size(), 2u);
}

TEST_F(RunPipelineTest, InputHashMismatchStopsBeforeAnyStage) {
  json config = FixtureManifest();
  config["input_hashes"] = {{"noisy.en", std::string(64, 'a')}};
  EXPECT_THROW(RunPipeline(Manifest(dir_ / "out", config)), Error);
  EXPECT_FALSE(std::filesystem::exists(dir_ / "out/filtered.en"));
  config["input_hashes"] = {{"noisy.en", Sha256File(FixtureDir() / "noisy.en")}};
  config["stages"] = {"filter"};
  EXPECT_TRUE(RunPipeline(Manifest(dir_ / "out", config)).ok);
}

TEST_F(RunPipelineTest, FailingStageIsNamedInReport) {
  WriteLines({"only one line"}, dir_ / "short.sw");
  json config = FixtureManifest();
  config["evaluate"]["hyp"] = (dir_ / "short.sw").string();
  const RunReport report = RunPipeline(Manifest(dir_ / "out", config));
  EXPECT_FALSE(report.ok);
  EXPECT_EQ(report.failed_stage, "evaluate");
  EXPECT_NE(report.error.find("length mismatch"), std::string::npos);
  const json saved = json::parse(ReadFileBytes(dir_ / "out/run_report.json"));
  EXPECT_EQ(saved["failed_stage"], "evaluate");
}

TEST_F(RunPipelineTest, DeterministicReportIsStable) {
  json config = FixtureManifest();
  config["stages"] = {"filter", "dedup", "split"};
  const RunReport a = RunPipeline(Manifest(dir_ / "a", config));
  const RunReport b = RunPipeline(Manifest(dir_ / "b", config));
  json da = a.Deterministic();
  json db = b.Deterministic();
  da.erase("config");
  db.erase("config");
  EXPECT_EQ(da, db);
}

TEST(CliTest, VersionAndUsage) {
  const CliResult version = RunCli("--version");
  EXPECT_EQ(version.exit_code, 0);
  EXPECT_NE(version.output.find("1.0.0"), std::string::npos);
  EXPECT_EQ(RunCli("").exit_code, 1);
  EXPECT_EQ(RunCli("no-such-command").exit_code, 1);
}

TEST(CliTest, EvaluatePrintsScoresWithSignature) {
  const auto dir = testing::DataDir() / "metrics";
  const CliResult r = RunCli("evaluate --hyp " + (dir / "hyp.txt").string() +
                             " --ref " + (dir / "ref.txt").string() + " --json");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const json j = json::parse(r.output);
  EXPECT_NEAR(j["bleu"]["score"].get<double>(), 45.55896625567924, 1e-9);
  EXPECT_NEAR(j["chrf"]["score"].get<double>(), 67.09199244272102, 1e-9);
}

TEST(CliTest, BadInputExitsWithOne) {
  const auto dir = testing::DataDir() / "metrics";
  const CliResult r = RunCli("evaluate --hyp " + (dir / "hyp.txt").string() +
                             " --ref " + (dir / "random_ref.txt").string());
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.output.find("length mismatch"), std::string::npos);
  EXPECT_EQ(RunCli("evaluate --hyp /nonexistent --ref /nonexistent").exit_code, 1);
}

TEST(CliTest, ValidateOnlyListsAllErrors) {
  const CliResult r = RunCli("pipeline --manifest " +
                             (FixtureDir() / "manifest.json").string() +
                             " --set dedup.threshold=101 --set sample.alpha=0 --validate-only");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.output.find("threshold must be in (0,100]"), std::string::npos);
  EXPECT_NE(r.output.find("alpha must be > 0"), std::string::npos);
}

TEST(CliTest, FilterMatchesLibrary) {
  TempDir dir;
  const auto data = testing::DataDir() / "filter";
  const CliResult r = RunCli(
      "filter --src " + (data / "pairs.en").string() + " --tgt " +
      (data / "pairs.sw").string() + " --src-lang en --tgt-lang sw --out-prefix " +
      (dir / "clean").string() + " --report " + (dir / "report.json").string());
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const json report = json::parse(ReadFileBytes(dir / "report.json"));
  const json expected = json::parse(ReadFileBytes(data / "expected.json"));
  EXPECT_EQ(report["removed_by_rule"], expected["source"]["removed_by_rule"]);
  EXPECT_EQ(ReadLines(dir / "clean.en").size(), expected["source"]["survivors"].size());
}

TEST(CliTest, ThreadsFlagDoesNotChangeOutput) {
  TempDir dir;
  const std::string manifest = (FixtureDir() / "manifest.json").string();
  const std::string common =
      "pipeline --manifest " + manifest + " --set 'stages=[\"filter\",\"dedup\",\"split\"]'";
  ASSERT_EQ(RunCli("--threads 1 " + common + " --output-dir " + (dir / "t1").string()).exit_code, 0);
  ASSERT_EQ(RunCli("--threads 5 " + common + " --output-dir " + (dir / "t5").string()).exit_code, 0);
  EXPECT_EQ(testing::DiffTrees(dir / "t1", dir / "t5", {"run_report.json"}),
            std::vector<std::string>{});
}

}  // namespace
}  // namespace forge
