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

#ifndef SPOOFSHAP_PIPELINE_STAGES_HPP_
#define SPOOFSHAP_PIPELINE_STAGES_HPP_

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spoofshap/analysis/aggregate.hpp"
#include "spoofshap/analysis/cohort.hpp"
#include "spoofshap/analysis/dominance.hpp"
#include "spoofshap/analysis/histogram.hpp"
#include "spoofshap/analysis/prune.hpp"
#include "spoofshap/corpus/synth.hpp"
#include "spoofshap/corpus/wav.hpp"
#include "spoofshap/dsp/spectrogram.hpp"
#include "spoofshap/dsp/vad.hpp"
#include "spoofshap/io.hpp"
#include "spoofshap/model/checkpoint.hpp"
#include "spoofshap/parallel.hpp"
#include "spoofshap/pipeline/config.hpp"
#include "spoofshap/shap/attribution.hpp"
#include "spoofshap/shap/dump.hpp"
#include "spoofshap/shap/explain.hpp"
#include "spoofshap/train/eer.hpp"
#include "spoofshap/train/matched.hpp"
#include "spoofshap/train/trainer.hpp"
#include "spoofshap/viz/image.hpp"
#include "spoofshap/viz/render.hpp"

namespace spoofshap::pipeline {

inline constexpr const char* kVersion = "1.0.0";

using Logger = std::function<void(const std::string&)>;

// Paths of every stage output under the output root.
class Layout {
 public:
  explicit Layout(fs::path root) : root_(std::move(root)) {}

  const fs::path& root() const { return root_; }
  fs::path CorpusDir() const { return root_ / "corpus"; }
  fs::path TrainDir() const { return root_ / "train"; }
  fs::path EerDir() const { return root_ / "eer"; }
  fs::path ExplainDir() const { return root_ / "explain"; }
  fs::path AnalyzeDir() const { return root_ / "analyze"; }
  fs::path RenderDir() const { return root_ / "render"; }

  fs::path Checkpoint(model::ModelKind kind) const { return TrainDir() / model::ToString(kind) / "model.ckpt"; }
  fs::path MatchedDir(model::ModelKind kind) const { return TrainDir() / "matched" / model::ToString(kind); }
  fs::path MatchedCheckpoint(model::ModelKind kind, const std::string& attack) const {
    return MatchedDir(kind) / attack / "model.ckpt";
  }
  fs::path Attributions(model::ModelKind kind) const { return ExplainDir() / model::ToString(kind); }
  fs::path MatchedAttributions(model::ModelKind kind, const std::string& attack) const {
    return ExplainDir() / "matched" / model::ToString(kind) / attack;
  }
  static fs::path AttributionFile(const fs::path& dir, const std::string& utt_id, std::size_t class_index) {
    return dir / (utt_id + (class_index == model::kBonafideClass ? ".bona.phi" : ".spoof.phi"));
  }

 private:
  fs::path root_;
};

inline void RequireArtifact(const fs::path& path, const std::string& what) {
  if (!fs::exists(path)) Fail(ErrorCode::kMissingPrerequisite, what + " not found: " + path.string());
}

// Hash of every regular file below `dir` (relative path and content), in
// path order. Stage manifests are skipped.
inline void HashTree(Fnv1a& h, const fs::path& dir) {
  if (!fs::exists(dir)) return;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename() != "stage.json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    h.Update(fs::relative(f, dir).generic_string());
    h.Update(ReadFileBytes(f));
  }
}

inline std::string HashFile(const fs::path& path) { return HexDigest(Fnv1a().Update(ReadFileBytes(path)).digest()); }

// stage.json: stage name, tool version, seed, hash of the declared inputs and
// a digest of every output file.
inline void WriteStageManifest(const fs::path& dir, const std::string& stage, std::uint64_t seed,
                               std::uint64_t inputs_hash, Json extra = Json::object()) {
  Json outputs = Json::object();
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename() != "stage.json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) outputs[fs::relative(f, dir).generic_string()] = HashFile(f);
  Json j = {{"stage", stage}, {"version", kVersion}, {"seed", seed}, {"inputs_hash", HexDigest(inputs_hash)}};
  for (auto& [k, v] : extra.items()) j[k] = v;
  j["outputs"] = outputs;
  WriteJson(dir / "stage.json", j);
}

inline void WriteJsonLines(const fs::path& path, const std::vector<Json>& rows) {
  std::string text;
  for (const auto& r : rows) text += r.dump() + "\n";
  WriteFileBytes(path, text);
}

inline corpus::CorpusManifest LoadPartition(const Layout& layout, corpus::Partition part) {
  RequireArtifact(layout.CorpusDir() / (std::string(corpus::ToString(part)) + ".protocol.txt"), "corpus manifest");
  return corpus::LoadCorpusPartition(layout.CorpusDir(), part);
}

inline std::vector<model::ModelKind> ModelKinds(const RunConfig& cfg) {
  std::vector<model::ModelKind> kinds;
  for (const auto& [kind, mc] : cfg.models) kinds.push_back(kind);
  return kinds;
}

// ---------------------------------------------------------------- gen-corpus

inline Json RunGenCorpus(const RunConfig& cfg, const Logger& log = {}) {
  const Layout layout(cfg.output_root);
  fs::remove_all(layout.CorpusDir());
  const auto cc = cfg.CorpusConfig();
  const auto corpus = corpus::BuildSyntheticCorpus(cc, layout.CorpusDir());
  if (log) {
    log("corpus: " + std::to_string(corpus.train.records.size()) + " train, " +
        std::to_string(corpus.eval.records.size()) + " eval utterances");
  }
  Fnv1a h;
  h.Update(cfg.ToJson()["corpus"].dump());
  WriteStageManifest(layout.CorpusDir(), "gen-corpus", cc.seed, h.Update(cc.seed).digest());
  return {{"train", corpus.train.records.size()}, {"eval", corpus.eval.records.size()}};
}

// --------------------------------------------------------------------- train

struct TrainOptions {
  bool main_models = true;
  // Matched-attack trainings; an empty list with matched_all trains one model
  // per attack in the corpus.
  std::vector<std::string> attacks;
  bool matched_all = false;
  // Replace the corpus stage's partitions.
  std::optional<corpus::CorpusManifest> train_manifest;
  std::optional<corpus::CorpusManifest> val_manifest;
};

inline void SaveTrainResult(const train::TrainResult& r, const fs::path& dir) {
  fs::create_directories(dir);
  model::SaveCheckpoint(r.best, dir / "model.ckpt");
  std::vector<Json> rows;
  for (const auto& e : r.log) rows.push_back(e.ToJson());
  WriteJsonLines(dir / "log.jsonl", rows);
  WriteJson(dir / "summary.json", {{"best_epoch", r.best.metadata.epoch},
                                   {"val_eer", r.best.metadata.val_eer},
                                   {"class_weights", r.class_weights},
                                   {"train_counts", r.train_counts}});
}

inline std::uint64_t TrainInputsHash(const RunConfig& cfg, const Layout& layout, model::ModelKind kind) {
  Fnv1a h;
  h.Update(cfg.Model(kind).ToJson().dump()).Update(cfg.ToJson()["train"].dump());
  HashTree(h, layout.CorpusDir());
  return h.digest();
}

inline Json RunTrain(const RunConfig& cfg, const TrainOptions& opt = {}, const Logger& log = {}) {
  const Layout layout(cfg.output_root);
  const auto train_manifest = opt.train_manifest ? *opt.train_manifest : LoadPartition(layout, corpus::Partition::kTrain);
  const auto eval_manifest = opt.val_manifest ? *opt.val_manifest : LoadPartition(layout, corpus::Partition::kEval);
  Json report = Json::object();

  auto epoch_logger = [&](const std::string& label) -> std::function<void(const train::EpochLog&)> {
    if (!log) return {};
    return [&log, label](const train::EpochLog& e) {
      log(label + " epoch " + std::to_string(e.epoch) + " loss " + std::to_string(e.train_loss) + " val_eer " +
          std::to_string(e.val_eer));
    };
  };

  if (opt.main_models) {
    Fnv1a all;
    for (auto kind : ModelKinds(cfg)) {
      const auto train_set = train::LoadExamples(train_manifest, kind);
      const auto val_set = train::LoadExamples(eval_manifest, kind);
      const auto start = std::chrono::steady_clock::now();
      const auto r = train::Train(train_set, val_set, cfg.Model(kind), cfg.TrainConfigFor(kind),
                                  epoch_logger(model::ToString(kind)));
      const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      SaveTrainResult(r, layout.Checkpoint(kind).parent_path());
      report[model::ToString(kind)] = {{"best_epoch", r.best.metadata.epoch},
                                       {"val_eer", r.best.metadata.val_eer},
                                       {"seconds", seconds}};
      all.Update(TrainInputsHash(cfg, layout, kind));
    }
    WriteStageManifest(layout.TrainDir(), "train", cfg.seed, all.digest());
  }

  if (opt.matched_all || !opt.attacks.empty()) {
    const std::vector<std::string> attacks = opt.attacks.empty() ? train_manifest.AttackIds() : opt.attacks;
    Json matched = Json::object();
    for (auto kind : cfg.matched_kinds) {
      const auto train_set = train::LoadExamples(train_manifest, kind);
      const auto val_set = train::LoadExamples(eval_manifest, kind);
      Json per_attack = Json::object();
      for (const auto& attack : attacks) {
        const auto results = train::MatchedAttackProtocol(train_set, val_set, cfg.Model(kind),
                                                          cfg.TrainConfigFor(kind), {attack});
        const auto& r = results.at(attack);
        SaveTrainResult(r, layout.MatchedCheckpoint(kind, attack).parent_path());
        per_attack[attack] = {{"best_epoch", r.best.metadata.epoch}, {"val_eer", r.best.metadata.val_eer}};
        if (log) log(std::string("matched ") + model::ToString(kind) + " " + attack + " val_eer " +
                     std::to_string(r.best.metadata.val_eer));
      }
      matched[model::ToString(kind)] = per_attack;
      WriteStageManifest(layout.MatchedDir(kind), "train-matched", cfg.seed, TrainInputsHash(cfg, layout, kind),
                         {{"attacks", attacks}});
    }
    report["matched"] = matched;
  }
  return report;
}

// ----------------------------------------------------------------------- eer

struct EerReport {
  double eer = 0.0;
  std::size_t num_bonafide = 0;
  std::size_t num_spoof = 0;
  std::map<std::string, double> per_attack;  // bona fide vs one attack

  Json ToJson() const {
    return {{"eer", eer}, {"num_bonafide", num_bonafide}, {"num_spoof", num_spoof}, {"per_attack", per_attack}};
  }
};

inline EerReport EvaluateCheckpoint(const fs::path& checkpoint, const corpus::CorpusManifest& manifest) {
  RequireArtifact(checkpoint, "checkpoint");
  const auto net = model::LoadModel(checkpoint);
  const auto examples = train::LoadExamples(manifest, net.kind());
  const auto scores = train::ScoreExamples(net, examples);
  EerReport r;
  std::vector<double> bona;
  std::map<std::string, std::vector<double>> spoof;
  std::vector<double> all_spoof;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (examples[i].label == model::kBonafideClass) {
      bona.push_back(scores[i]);
    } else {
      spoof[examples[i].attack_id].push_back(scores[i]);
      all_spoof.push_back(scores[i]);
    }
  }
  r.num_bonafide = bona.size();
  r.num_spoof = all_spoof.size();
  r.eer = train::ComputeEer(bona, all_spoof);
  for (const auto& [attack, s] : spoof) r.per_attack[attack] = train::ComputeEer(bona, s);
  return r;
}

inline Json RunEer(const RunConfig& cfg, const Logger& log = {}) {
  const Layout layout(cfg.output_root);
  const auto eval_manifest = LoadPartition(layout, corpus::Partition::kEval);
  Json report = Json::object();
  Fnv1a h;
  HashTree(h, layout.CorpusDir());
  for (auto kind : ModelKinds(cfg)) {
    const auto r = EvaluateCheckpoint(layout.Checkpoint(kind), eval_manifest);
    h.Update(ReadFileBytes(layout.Checkpoint(kind)));
    report[model::ToString(kind)] = r.ToJson();
    if (log) log(std::string(model::ToString(kind)) + " eval EER " + std::to_string(r.eer));
  }
  Json matched = Json::object();
  for (auto kind : cfg.matched_kinds) {
    for (const auto& attack : eval_manifest.AttackIds()) {
      const fs::path ckpt = layout.MatchedCheckpoint(kind, attack);
      if (!fs::exists(ckpt)) continue;
      corpus::CorpusManifest subset = eval_manifest;
      std::erase_if(subset.records, [&](const auto& r) { return !r.is_bonafide() && r.attack_id != attack; });
      matched[model::ToString(kind)][attack] = EvaluateCheckpoint(ckpt, subset).eer;
      h.Update(ReadFileBytes(ckpt));
    }
  }
  if (!matched.empty()) report["matched"] = matched;
  fs::create_directories(layout.EerDir());
  WriteJson(layout.EerDir() / "report.json", report);
  WriteStageManifest(layout.EerDir(), "eer", cfg.seed, h.digest());
  return report;
}

// ------------------------------------------------------------------- explain

// Attributions of the given classes for every record, saved under `dir`.
inline void ExplainRecords(const model::Model<float>& net, const std::string& checkpoint_hash,
                           const std::vector<const corpus::UtteranceRecord*>& records,
                           const std::vector<std::size_t>& classes, const shap::ShapConfig& shap_cfg,
                           std::uint64_t seed, const fs::path& dir) {
  fs::create_directories(dir);
  ParallelFor(records.size(), DefaultThreadCount(), [&](std::size_t i) {
    const auto& r = *records[i];
    const auto input = model::PrepareInput<float>(net.kind(), corpus::LoadWav(r.audio_ref));
    for (std::size_t c : classes) {
      shap::AttributionRecord rec;
      rec.utt_id = r.utt_id;
      rec.model_checkpoint_hash = checkpoint_hash;
      rec.map = shap::ExplainInput(net, input, c, shap_cfg, shap::UtteranceSeed(seed, r.utt_id));
      shap::SaveAttribution(rec, Layout::AttributionFile(dir, r.utt_id, c));
    }
  });
}

inline Json RunExplain(const RunConfig& cfg, const Logger& log = {}) {
  const Layout layout(cfg.output_root);
  const auto eval_manifest = LoadPartition(layout, corpus::Partition::kEval);
  for (auto kind : ModelKinds(cfg)) RequireArtifact(layout.Checkpoint(kind), "checkpoint");
  fs::remove_all(layout.ExplainDir());
  Fnv1a h;
  h.Update(cfg.shap.ToJson().dump());
  HashTree(h, layout.CorpusDir());
  Json report = Json::object();
  std::vector<const corpus::UtteranceRecord*> all;
  for (const auto& r : eval_manifest.records) all.push_back(&r);
  for (auto kind : ModelKinds(cfg)) {
    const fs::path ckpt = layout.Checkpoint(kind);
    const std::string bytes = ReadFileBytes(ckpt);
    h.Update(bytes);
    const auto net = model::ModelFromCheckpoint(model::DecodeCheckpoint(bytes));
    ExplainRecords(net, HexDigest(Fnv1a().Update(bytes).digest()), all,
                   {model::kBonafideClass, model::kSpoofClass}, cfg.shap, cfg.ExplainSeed(), layout.Attributions(kind));
    report[model::ToString(kind)] = all.size();
    if (log) log(std::string("explained ") + std::to_string(all.size()) + " utterances with " + model::ToString(kind));
  }
  Json matched = Json::object();
  for (auto kind : cfg.matched_kinds) {
    for (const auto& attack : eval_manifest.AttackIds()) {
      const fs::path ckpt = layout.MatchedCheckpoint(kind, attack);
      if (!fs::exists(ckpt)) continue;
      const std::string bytes = ReadFileBytes(ckpt);
      h.Update(bytes);
      const auto net = model::ModelFromCheckpoint(model::DecodeCheckpoint(bytes));
      std::vector<const corpus::UtteranceRecord*> members;
      for (const auto& r : eval_manifest.records) {
        if (r.attack_id == attack) members.push_back(&r);
      }
      ExplainRecords(net, HexDigest(Fnv1a().Update(bytes).digest()), members, {model::kSpoofClass}, cfg.shap,
                     cfg.ExplainSeed(), layout.MatchedAttributions(kind, attack));
      matched[model::ToString(kind)][attack] = members.size();
    }
  }
  if (!matched.empty()) report["matched"] = matched;
  WriteStageManifest(layout.ExplainDir(), "explain", cfg.ExplainSeed(), h.digest());
  return report;
}

// ------------------------------------------------------------------- analyze

// Everything the analyses need about one eval utterance.
struct UtteranceContext {
  const corpus::UtteranceRecord* record = nullptr;
  corpus::Waveform waveform;
  dsp::Spectrogram spectrogram;
  dsp::VadMask vad;

  analysis::FeatureLayout LayoutFor(model::ModelKind kind) const {
    if (kind == model::ModelKind::kRaw1d) {
      return analysis::FeatureLayout::Waveform(waveform.size(), waveform.sample_rate);
    }
    return analysis::FeatureLayout::Spectral(waveform.size(), spectrogram.num_bins, spectrogram.num_frames,
                                             spectrogram.bin_hz, waveform.sample_rate);
  }
};

inline UtteranceContext LoadContext(const corpus::UtteranceRecord& r, double vad_ratio) {
  UtteranceContext c;
  c.record = &r;
  c.waveform = corpus::LoadWav(r.audio_ref);
  c.spectrogram = dsp::MagnitudeSpectrogram(c.waveform);
  c.vad = dsp::EnergyVad(c.spectrogram, vad_ratio);
  return c;
}

inline std::vector<double> LoadPhi(const fs::path& dir, const std::string& utt_id, std::size_t class_index) {
  const fs::path path = Layout::AttributionFile(dir, utt_id, class_index);
  RequireArtifact(path, "attribution");
  return shap::LoadAttribution(path).map.phi;
}

struct UtteranceAnalysis {
  std::string utt_id;
  std::string attack_id;
  std::size_t label = 0;
  analysis::ShapHistogram histogram;
  std::optional<double> pearson;  // bona fide vs spoof attribution
  double delta_top = 0.0;
  double delta_random_median = 0.0;
  std::optional<double> density_ratio;
  std::optional<double> enrichment;
  std::optional<double> in_band_fraction;

  Json ToJson() const {
    return {{"utt_id", utt_id},
            {"attack_id", attack_id},
            {"label", label},
            {"histogram_counts", histogram.counts},
            {"histogram_non_increasing", histogram.IsNonIncreasing()},
            {"pearson_bona_spoof", analysis::OptionalJson(pearson)},
            {"delta_top", delta_top},
            {"delta_random_median", delta_random_median},
            {"speech_density_ratio", analysis::OptionalJson(density_ratio)},
            {"enrichment", analysis::OptionalJson(enrichment)},
            {"in_band_fraction", analysis::OptionalJson(in_band_fraction)}};
  }
};

inline const corpus::AttackTemplate* FindAttack(const RunConfig& cfg, const std::string& id) {
  for (const auto& a : cfg.corpus.attacks) {
    if (a.attack_id == id) return &a;
  }
  return nullptr;
}

// Histogram, dominance, segment and localization statistics of one
// utterance, using the attribution of its own class.
inline UtteranceAnalysis AnalyzeUtterance(const RunConfig& cfg, const model::Model<float>& net,
                                          const UtteranceContext& ctx, const fs::path& att_dir) {
  const auto& r = *ctx.record;
  UtteranceAnalysis u;
  u.utt_id = r.utt_id;
  u.attack_id = r.attack_id;
  u.label = r.is_bonafide() ? model::kBonafideClass : model::kSpoofClass;
  const auto phi_bona = LoadPhi(att_dir, r.utt_id, model::kBonafideClass);
  const auto phi_spoof = LoadPhi(att_dir, r.utt_id, model::kSpoofClass);
  const auto& own = u.label == model::kBonafideClass ? phi_bona : phi_spoof;
  const auto positive = shap::PositivePart(own);
  const auto layout = ctx.LayoutFor(net.kind());

  u.histogram = analysis::MakeShapHistogram(positive, cfg.analysis.histogram_bins);
  try {
    u.pearson = shap::PearsonCorrelation(phi_bona, phi_spoof);
  } catch (const Error&) {
  }

  const auto mask = analysis::PruneTopFraction(positive, cfg.shap.prune_fraction);
  const auto input = model::PrepareInput<float>(net.kind(), ctx.waveform);
  const shap::ModelTarget<float> f(net, u.label, cfg.shap.target, input.shape);
  const std::vector<double> x(input.data.begin(), input.data.end());
  const auto dom = analysis::DominanceTest(f, x, mask, cfg.analysis.dominance_trials,
                                           DeriveSeed(cfg.AnalyzeSeed(), model::ToString(net.kind()), r.utt_id));
  u.delta_top = dom.delta_top;
  u.delta_random_median = analysis::Median(dom.delta_random);

  u.density_ratio = analysis::AggregateSegments(positive, ctx.vad, layout).density_ratio;
  if (!r.is_bonafide() && !r.artefact_regions.empty()) {
    const auto spoof_mask = analysis::PruneTopFraction(shap::PositivePart(phi_spoof), cfg.shap.prune_fraction);
    u.enrichment = analysis::LocalizationEnrichment(spoof_mask, r.artefact_regions, layout);
    const auto* attack = FindAttack(cfg, r.attack_id);
    if (layout.spectral && attack && attack->band) {
      u.in_band_fraction = analysis::FractionInBand(spoof_mask, layout, attack->band->first, attack->band->second);
    }
  }
  return u;
}

inline Json SummarizeAnalyses(const std::vector<UtteranceAnalysis>& rows) {
  std::size_t monotone = 0, negative = 0, with_pearson = 0;
  std::vector<double> top, random, ratios;
  std::map<std::string, std::vector<double>> enrich, in_band;
  for (const auto& u : rows) {
    monotone += u.histogram.IsNonIncreasing();
    if (u.pearson) {
      ++with_pearson;
      negative += *u.pearson < 0.0;
    }
    top.push_back(u.delta_top);
    random.push_back(u.delta_random_median);
    if (u.density_ratio) ratios.push_back(*u.density_ratio);
    if (u.enrichment) enrich[u.attack_id].push_back(*u.enrichment);
    if (u.in_band_fraction) in_band[u.attack_id].push_back(*u.in_band_fraction);
  }
  const double n = static_cast<double>(rows.size());
  Json per_attack = Json::object();
  for (const auto& [attack, v] : enrich) per_attack[attack]["enrichment_median"] = analysis::Median(v);
  for (const auto& [attack, v] : in_band) per_attack[attack]["in_band_fraction_median"] = analysis::Median(v);
  const double median_top = analysis::Median(top), median_random = analysis::Median(random);
  return {{"n", rows.size()},
          {"histogram_non_increasing_fraction", monotone / n},
          {"pearson_negative_fraction", with_pearson ? static_cast<double>(negative) / with_pearson : 0.0},
          {"dominance",
           {{"median_delta_top", median_top},
            {"median_delta_random", median_random},
            {"ratio", median_random > 0.0 ? Json(median_top / median_random) : Json("inf")}}},
          {"speech_density_ratio_median",
           ratios.empty() ? Json(nullptr) : analysis::OptionalJson(analysis::Median(ratios))},
          {"per_attack", per_attack}};
}

inline Json RunAnalyze(const RunConfig& cfg, const Logger& log = {}) {
  const Layout layout(cfg.output_root);
  const auto eval_manifest = LoadPartition(layout, corpus::Partition::kEval);
  for (auto kind : ModelKinds(cfg)) {
    RequireArtifact(layout.Checkpoint(kind), "checkpoint");
    RequireArtifact(layout.Attributions(kind), "attribution directory");
  }
  fs::remove_all(layout.AnalyzeDir());
  std::vector<UtteranceContext> contexts(eval_manifest.records.size());
  ParallelFor(contexts.size(), DefaultThreadCount(), [&](std::size_t i) {
    contexts[i] = LoadContext(eval_manifest.records[i], cfg.analysis.vad_ratio);
  });

  Fnv1a h;
  h.Update(cfg.ToJson()["analysis"].dump()).Update(cfg.shap.ToJson().dump());
  HashTree(h, layout.CorpusDir());
  HashTree(h, layout.ExplainDir());
  Json report = Json::object();
  for (auto kind : ModelKinds(cfg)) {
    const auto net = model::LoadModel(layout.Checkpoint(kind));
    std::vector<UtteranceAnalysis> rows(contexts.size());
    ParallelFor(contexts.size(), DefaultThreadCount(), [&](std::size_t i) {
      rows[i] = AnalyzeUtterance(cfg, net, contexts[i], layout.Attributions(kind));
    });
    const fs::path dir = layout.AnalyzeDir() / model::ToString(kind);
    Json per_utt = Json::array(), dominance = Json::array();
    for (const auto& u : rows) {
      per_utt.push_back(u.ToJson());
      dominance.push_back({{"utt_id", u.utt_id}, {"delta_top", u.delta_top},
                           {"delta_random_median", u.delta_random_median}});
    }
    const Json summary = SummarizeAnalyses(rows);
    WriteJson(dir / "utterances.json", per_utt);
    WriteJson(dir / "dominance.json", {{"summary", summary["dominance"]}, {"utterances", dominance}});
    WriteJson(dir / "summary.json", summary);
    report[model::ToString(kind)] = summary;
    if (log) log(std::string("analyzed ") + model::ToString(kind) + ": " + summary.dump());
  }

  Json cohorts = Json::object();
  for (auto kind : cfg.matched_kinds) {
    std::vector<analysis::UtteranceStats> stats;
    std::vector<std::string> attacks;
    for (const auto& attack : eval_manifest.AttackIds()) {
      const fs::path dir = layout.MatchedAttributions(kind, attack);
      if (!fs::exists(dir)) continue;
      attacks.push_back(attack);
      for (const auto& ctx : contexts) {
        const auto& r = *ctx.record;
        if (r.attack_id != attack) continue;
        stats.push_back(analysis::ComputeUtteranceStats(r.utt_id, attack, LoadPhi(dir, r.utt_id, model::kSpoofClass),
                                                        ctx.LayoutFor(kind), ctx.vad, r.artefact_regions,
                                                        cfg.CohortConfig()));
      }
    }
    if (attacks.empty()) {
      if (log) log(std::string("no matched-attack attributions for ") + model::ToString(kind) + "; cohort skipped");
      continue;
    }
    const auto summary = analysis::MakeCohortSummary(stats, attacks, cfg.analysis.cohort_n, cfg.AnalyzeSeed());
    const Json j = analysis::CohortToJson(summary, cfg.analysis.band_edges_hz);
    WriteJson(layout.AnalyzeDir() / "cohort" / (std::string(model::ToString(kind)) + ".json"), j);
    cohorts[model::ToString(kind)] = j;
  }
  if (!cohorts.empty()) report["cohort"] = cohorts;
  WriteStageManifest(layout.AnalyzeDir(), "analyze", cfg.AnalyzeSeed(), h.digest());
  return report;
}

// -------------------------------------------------------------------- render

inline Json RunRender(const RunConfig& cfg, const Logger& log = {}) {
  const Layout layout(cfg.output_root);
  const auto eval_manifest = LoadPartition(layout, corpus::Partition::kEval);
  for (auto kind : ModelKinds(cfg)) RequireArtifact(layout.Attributions(kind), "attribution directory");
  fs::remove_all(layout.RenderDir());
  std::vector<const corpus::UtteranceRecord*> records;
  for (const auto& r : eval_manifest.records) {
    if (cfg.render.max_utterances == 0 || records.size() < cfg.render.max_utterances) records.push_back(&r);
  }
  Fnv1a h;
  h.Update(cfg.ToJson()["render"].dump()).Update(cfg.shap.ToJson().dump());
  HashTree(h, layout.CorpusDir());
  HashTree(h, layout.ExplainDir());
  Json report = Json::object();
  for (auto kind : ModelKinds(cfg)) {
    const fs::path att_dir = layout.Attributions(kind);
    const fs::path out = layout.RenderDir() / model::ToString(kind);
    fs::create_directories(out);
    ParallelFor(records.size(), DefaultThreadCount(), [&](std::size_t i) {
      const auto& r = *records[i];
      const auto ctx = LoadContext(r, cfg.analysis.vad_ratio);
      const auto bona = shap::PositivePart(LoadPhi(att_dir, r.utt_id, model::kBonafideClass));
      const auto spoof = shap::PositivePart(LoadPhi(att_dir, r.utt_id, model::kSpoofClass));
      const auto mask_bona = analysis::PruneTopFraction(bona, cfg.shap.prune_fraction);
      const auto mask_spoof = analysis::PruneTopFraction(spoof, cfg.shap.prune_fraction);
      if (kind == model::ModelKind::kRaw1d) {
        auto keep = [](const std::vector<double>& phi, const analysis::PruneMask& m) {
          std::vector<double> out(phi.size(), 0.0);
          for (std::size_t k : m.selected) out[k] = phi[k];
          return out;
        };
        viz::SavePng(viz::RenderWaveformOverlay(ctx.waveform, keep(bona, mask_bona), keep(spoof, mask_spoof),
                                                cfg.render.style),
                     out / (r.utt_id + ".wave.png"));
      } else {
        viz::SavePng(viz::RenderSpectrogramOverlay(ctx.spectrogram, spoof, mask_spoof, cfg.render.style,
                                                   viz::ClassOverlay{&bona, &mask_bona}),
                     out / (r.utt_id + ".spec.png"));
      }
      const auto& own = r.is_bonafide() ? bona : spoof;
      viz::SavePng(viz::RenderHistogram(analysis::MakeShapHistogram(own, cfg.analysis.histogram_bins)),
                   out / (r.utt_id + ".hist.png"));
    });
    report[model::ToString(kind)] = records.size();
    if (log) log(std::string("rendered ") + std::to_string(records.size()) + " utterances for " + model::ToString(kind));
  }
  WriteStageManifest(layout.RenderDir(), "render", cfg.seed, h.digest());
  return report;
}

// All stages in order, with matched-attack training for every attack.
inline Json RunAll(const RunConfig& cfg, const Logger& log = {}) {
  Json report;
  report["gen-corpus"] = RunGenCorpus(cfg, log);
  TrainOptions train_opt;
  train_opt.matched_all = true;
  report["train"] = RunTrain(cfg, train_opt, log);
  report["eer"] = RunEer(cfg, log);
  report["explain"] = RunExplain(cfg, log);
  report["analyze"] = RunAnalyze(cfg, log);
  report["render"] = RunRender(cfg, log);
  return report;
}

}  // namespace spoofshap::pipeline

#endif  // SPOOFSHAP_PIPELINE_STAGES_HPP_
