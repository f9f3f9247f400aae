// Copyright 2026 The spoofshap Authors
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


#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>

#include "gtest/gtest.h"
#include "spoofshap/pipeline/config.hpp"
#include "spoofshap/pipeline/stages.hpp"

namespace spoofshap::pipeline {
namespace {

std::string ConfigErrorOf(const Json& j) {
  try {
    RunConfig::FromJson(j);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
    return e.what();
  }
  ADD_FAILURE() << "config accepted: " << j.dump();
  return "";
}

TEST(ConfigTest, DefaultRoundTripsThroughJson) {
  const RunConfig a = RunConfig::Default();
  const RunConfig b = RunConfig::FromJson(a.ToJson());
  EXPECT_EQ(a.ToJson(), b.ToJson());
  EXPECT_EQ(RunConfig::FromJson(Json::object()).ToJson(), a.ToJson());
}

TEST(ConfigTest, ErrorsNameTheOffendingField) {
  EXPECT_NE(ConfigErrorOf({{"train", {{"lr", -1.0}}}}).find("train.lr"), std::string::npos);
  EXPECT_NE(ConfigErrorOf({{"shap", {{"n_samples", 0}}}}).find("shap.n_samples"), std::string::npos);
  EXPECT_NE(ConfigErrorOf({{"bogus", 1}}).find("bogus"), std::string::npos);
  EXPECT_NE(ConfigErrorOf({{"corpus", {{"train_counts", {{"bonafide", 5}}}}}}).find("corpus.train_counts.bonafide"),
            std::string::npos);
  EXPECT_NE(ConfigErrorOf({{"analysis", {{"band_edges_hz", {6000, 3000}}}}}).find("analysis.band_edges_hz"),
            std::string::npos);
  EXPECT_NE(ConfigErrorOf({{"render", {{"mode", "rainbow"}}}}).find("render.mode"), std::string::npos);
  EXPECT_NE(ConfigErrorOf({{"train", {{"seed", 3}}}}).find("train.seed"), std::string::npos);
  EXPECT_NE(ConfigErrorOf({{"models", {{"spec2d", {{"kind", "raw1d"}}}}}}).find("models.spec2d"), std::string::npos);
}

TEST(ConfigTest, StageSeedsAreDistinctAndDerived) {
  RunConfig c = RunConfig::Default();
  const auto corpus = c.CorpusSeed(), explain = c.ExplainSeed();
  EXPECT_NE(corpus, explain);
  EXPECT_NE(c.TrainSeed(model::ModelKind::kRaw1d), c.TrainSeed(model::ModelKind::kSpec2d));
  c.seed = 2;
  EXPECT_NE(c.CorpusSeed(), corpus);
  EXPECT_EQ(c.TrainConfigFor(model::ModelKind::kRaw1d).seed, c.TrainSeed(model::ModelKind::kRaw1d));
}

TEST(StagesTest, MissingCheckpointIsAPrerequisiteError) {
  RunConfig c = RunConfig::Default();
  c.output_root = fs::temp_directory_path() / "spoofshap_missing_stage";
  fs::remove_all(c.output_root);
  try {
    RunEer(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingPrerequisite);
    EXPECT_NE(std::string(e.what()).find("not found: "), std::string::npos);
  }
  try {
    RequireArtifact(c.output_root / "x.ckpt", "checkpoint");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()), "checkpoint not found: " + (c.output_root / "x.ckpt").string());
  }
}

int RunCli(const std::string& args) {
  const std::string cmd = std::string(SPOOFSHAP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliTest, ExitCodesFollowErrorKinds) {
  const fs::path dir = fs::temp_directory_path() / "spoofshap_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  EXPECT_EQ(RunCli("print-config"), 0);
  EXPECT_EQ(RunCli("no-such-command"), 1);
  EXPECT_EQ(RunCli("eer --checkpoint " + (dir / "missing.ckpt").string() + " --out-dir " + dir.string()), 2);
  WriteJson(dir / "bad.json", {{"train", {{"lr", 0}}}});
  EXPECT_EQ(RunCli("print-config --config " + (dir / "bad.json").string()), 1);
  fs::remove_all(dir);
}

// A pipeline small enough for a unit test: tiny models, short utterances and
// few examples per class.
RunConfig SmallConfig(const fs::path& root) {
  RunConfig c = RunConfig::Default();
  c.output_root = root;
  for (auto* counts : {&c.corpus.train_counts, &c.corpus.eval_counts}) {
    for (auto& [cls, n] : *counts) n = counts == &c.corpus.train_counts ? 6 : 3;
  }
  c.corpus.min_duration_s = 0.5;
  c.corpus.max_duration_s = 0.6;
  c.corpus.attacks[2].placement = corpus::Placement::kWhole;
  model::ModelConfig raw;
  raw.kind = model::ModelKind::kRaw1d;
  raw.stem = {4, 9, 4};
  raw.blocks = {{4, 8, 3, 4}};
  raw.fc = {8, 8, 2};
  model::ModelConfig spec;
  spec.kind = model::ModelKind::kSpec2d;
  spec.stem = {4, 3, 2};
  spec.blocks = {{4, 8, 3, 2}};
  spec.fc = {8, 8, 2};
  c.models = {{model::ModelKind::kRaw1d, raw}, {model::ModelKind::kSpec2d, spec}};
  c.train.epochs = 2;
  c.shap.n_samples = 2;
  c.shap.prune_fraction = 0.01;
  c.analysis.dominance_trials = 3;
  c.render.max_utterances = 2;
  c.render.style.width = 200;
  c.render.style.height = 60;
  return c;
}

std::map<std::string, std::string> ReadTree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = ReadFileBytes(e.path());
  }
  return files;
}

TEST(PipelineTest, SmallRunPopulatesEveryStageAndIsReproducible) {
  const fs::path a = fs::temp_directory_path() / "spoofshap_pipeline_a";
  const fs::path b = fs::temp_directory_path() / "spoofshap_pipeline_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const Json report = RunAll(SmallConfig(a));
  for (const char* stage : {"corpus", "train", "eer", "explain", "analyze", "render"}) {
    EXPECT_TRUE(fs::exists(a / stage / "stage.json")) << stage;
  }
  EXPECT_TRUE(fs::exists(a / "train" / "raw1d" / "model.ckpt"));
  EXPECT_TRUE(fs::exists(a / "train" / "matched" / "spec2d" / "click" / "model.ckpt"));
  EXPECT_TRUE(fs::exists(a / "analyze" / "cohort" / "spec2d.json"));
  const Json eer = ReadJson(a / "eer" / "report.json");
  EXPECT_TRUE(eer.contains("raw1d"));
  EXPECT_TRUE(eer.contains("spec2d"));

  RunAll(SmallConfig(b));
  const auto ta = ReadTree(a), tb = ReadTree(b);
  ASSERT_EQ(ta.size(), tb.size());
  for (const auto& [path, bytes] : ta) {
    ASSERT_TRUE(tb.count(path)) << path;
    EXPECT_TRUE(bytes == tb.at(path)) << path << " differs between runs";
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(PipelineTest, StagesRefuseToRunOutOfOrder) {
  RunConfig c = SmallConfig(fs::temp_directory_path() / "spoofshap_pipeline_order");
  fs::remove_all(c.output_root);
  RunGenCorpus(c);
  for (auto stage : {RunExplain, RunAnalyze, RunRender}) {
    try {
      stage(c, {});
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kMissingPrerequisite) << e.what();
    }
  }
  fs::remove_all(c.output_root);
}

}  // namespace
}  // namespace spoofshap::pipeline
