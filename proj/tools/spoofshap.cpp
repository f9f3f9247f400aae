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


#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "spoofshap/spoofshap.hpp"

namespace {

namespace fs = std::filesystem;
using spoofshap::ErrorCode;
using spoofshap::Json;
using spoofshap::pipeline::RunConfig;

int ExitCode(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingPrerequisite: return 2;
    case ErrorCode::kNumerical: return 3;
    default: return 1;
  }
}

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool quiet = false;
};

void AddCommon(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Run configuration (JSON); defaults apply when omitted")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", flags.seed, "Override the global seed");
  cmd->add_option("--out-dir", flags.out_dir, "Override the output root");
  cmd->add_flag("-q,--quiet", flags.quiet, "Suppress progress messages");
}

RunConfig ResolveConfig(const CommonFlags& flags) {
  RunConfig cfg = flags.config_path.empty() ? RunConfig::Default() : spoofshap::pipeline::LoadRunConfig(flags.config_path);
  if (flags.seed) cfg.seed = *flags.seed;
  if (!flags.out_dir.empty()) cfg.output_root = flags.out_dir;
  return cfg;
}

spoofshap::pipeline::Logger MakeLogger(const CommonFlags& flags) {
  if (flags.quiet) return {};
  return [](const std::string& line) { std::cerr << line << "\n"; };
}

spoofshap::corpus::CorpusManifest LoadManifestFlag(const std::string& path, const std::string& audio_dir,
                                                   spoofshap::corpus::Partition part) {
  const fs::path p(path);
  const fs::path audio = audio_dir.empty() ? p.parent_path() / "wav" : fs::path(audio_dir);
  if (!fs::exists(p)) spoofshap::Fail(ErrorCode::kMissingPrerequisite, "manifest not found: " + path);
  return spoofshap::corpus::ParseManifest(p, part, audio);
}

void Print(const Json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Train miniature spoofing detectors and explain them with SHAP attributions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", spoofshap::pipeline::kVersion);

  CommonFlags flags;

  auto* print_config = app.add_subcommand("print-config", "Print the effective run configuration");
  AddCommon(print_config, flags);

  auto* gen = app.add_subcommand("gen-corpus", "Synthesize the corpus with ground-truth artefact regions");
  AddCommon(gen, flags);

  auto* train = app.add_subcommand("train", "Train the configured models");
  AddCommon(train, flags);
  std::vector<std::string> attacks;
  bool matched_all = false;
  std::string train_manifest, val_manifest, audio_dir;
  train->add_option("--attack", attacks, "Matched-attack training for this attack only (repeatable)");
  train->add_flag("--matched-all", matched_all, "Matched-attack training for every attack");
  train->add_option("--manifest", train_manifest, "Training protocol file instead of the corpus stage");
  train->add_option("--val-manifest", val_manifest, "Validation protocol file instead of the corpus stage");
  train->add_option("--audio-dir", audio_dir, "Audio directory for --manifest files (default: <manifest dir>/wav)");

  auto* eer = app.add_subcommand("eer", "Equal error rates of trained checkpoints");
  AddCommon(eer, flags);
  std::string checkpoint, manifest;
  eer->add_option("--checkpoint", checkpoint, "Evaluate this checkpoint instead of the train stage outputs");
  eer->add_option("--manifest", manifest, "Protocol file for --checkpoint (default: the corpus eval partition)");
  eer->add_option("--audio-dir", audio_dir, "Audio directory for --manifest");

  auto* explain = app.add_subcommand("explain", "SHAP attributions for every eval utterance");
  AddCommon(explain, flags);
  std::string attributions_dir;
  explain->add_option("--checkpoint", checkpoint, "Explain with this checkpoint instead of the train stage outputs");
  explain->add_option("--manifest", manifest, "Protocol file for --checkpoint (default: the corpus eval partition)");
  explain->add_option("--audio-dir", audio_dir, "Audio directory for --manifest");
  explain->add_option("--attributions-dir", attributions_dir, "Output directory for --checkpoint attributions");

  auto* analyze = app.add_subcommand("analyze", "Histogram, dominance, segment, localization and cohort reports");
  AddCommon(analyze, flags);

  auto* render = app.add_subcommand("render", "Waveform, spectrogram and histogram figures");
  AddCommon(render, flags);

  auto* run = app.add_subcommand("run", "Every stage in order, including matched-attack training");
  AddCommon(run, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const RunConfig cfg = ResolveConfig(flags);
    const auto log = MakeLogger(flags);
    using namespace spoofshap::pipeline;
    if (*print_config) {
      Print(cfg.ToJson());
    } else if (*gen) {
      Print(RunGenCorpus(cfg, log));
    } else if (*train) {
      TrainOptions opt;
      opt.attacks = attacks;
      opt.matched_all = matched_all;
      opt.main_models = attacks.empty() && !matched_all;
      if (!train_manifest.empty()) {
        opt.train_manifest = LoadManifestFlag(train_manifest, audio_dir, spoofshap::corpus::Partition::kTrain);
      }
      if (!val_manifest.empty()) {
        opt.val_manifest = LoadManifestFlag(val_manifest, audio_dir, spoofshap::corpus::Partition::kEval);
      }
      Print(RunTrain(cfg, opt, log));
    } else if (*eer) {
      if (checkpoint.empty()) {
        Print(RunEer(cfg, log));
      } else {
        const auto m = manifest.empty() ? LoadPartition(Layout(cfg.output_root), spoofshap::corpus::Partition::kEval)
                                        : LoadManifestFlag(manifest, audio_dir, spoofshap::corpus::Partition::kEval);
        Print(EvaluateCheckpoint(checkpoint, m).ToJson());
      }
    } else if (*explain) {
      if (checkpoint.empty()) {
        Print(RunExplain(cfg, log));
      } else {
        RequireArtifact(checkpoint, "checkpoint");
        if (attributions_dir.empty()) spoofshap::Fail(ErrorCode::kConfig, "--attributions-dir is required with --checkpoint");
        const auto m = manifest.empty() ? LoadPartition(Layout(cfg.output_root), spoofshap::corpus::Partition::kEval)
                                        : LoadManifestFlag(manifest, audio_dir, spoofshap::corpus::Partition::kEval);
        const std::string bytes = spoofshap::ReadFileBytes(checkpoint);
        const auto net = spoofshap::model::ModelFromCheckpoint(spoofshap::model::DecodeCheckpoint(bytes));
        std::vector<const spoofshap::corpus::UtteranceRecord*> records;
        for (const auto& r : m.records) records.push_back(&r);
        ExplainRecords(net, spoofshap::HexDigest(spoofshap::Fnv1a().Update(bytes).digest()), records,
                       {spoofshap::model::kBonafideClass, spoofshap::model::kSpoofClass}, cfg.shap, cfg.ExplainSeed(),
                       attributions_dir);
        Print({{"explained", records.size()}, {"attributions_dir", attributions_dir}});
      }
    } else if (*analyze) {
      Print(RunAnalyze(cfg, log));
    } else if (*render) {
      Print(RunRender(cfg, log));
    } else if (*run) {
      Print(RunAll(cfg, log));
    }
  } catch (const spoofshap::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCode(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
