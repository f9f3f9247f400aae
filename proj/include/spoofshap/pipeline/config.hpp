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

#ifndef SPOOFSHAP_PIPELINE_CONFIG_HPP_
#define SPOOFSHAP_PIPELINE_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "spoofshap/analysis/cohort.hpp"
#include "spoofshap/corpus/synth.hpp"
#include "spoofshap/error.hpp"
#include "spoofshap/io.hpp"
#include "spoofshap/model/model.hpp"
#include "spoofshap/shap/explain.hpp"
#include "spoofshap/train/trainer.hpp"
#include "spoofshap/viz/render.hpp"

namespace spoofshap::pipeline {

struct AnalysisConfig {
  std::vector<double> band_edges_hz = {analysis::kDefaultLowEdgeHz, analysis::kDefaultHighEdgeHz};
  double vad_ratio = dsp::kDefaultVadRatio;
  std::size_t cohort_n = 100;
  std::size_t histogram_bins = 20;
  std::size_t dominance_trials = 50;
  double leading_s = 0.5;
};

struct RenderConfig {
  viz::OverlayStyle style;
  // Figures are drawn for the first `max_utterances` eval utterances in
  // manifest order; 0 draws all.
  std::size_t max_utterances = 0;
};

struct RunConfig {
  std::uint64_t seed = 1;
  fs::path output_root = "spoofshap_out";
  corpus::SyntheticCorpusConfig corpus;
  std::map<model::ModelKind, model::ModelConfig> models;
  train::TrainConfig train;
  std::vector<model::ModelKind> matched_kinds = {model::ModelKind::kSpec2d};
  shap::ShapConfig shap;
  AnalysisConfig analysis;
  RenderConfig render;

  // The default synthetic setup: click, band-noise and hum attacks with 40
  // training and 20 evaluation utterances per class.
  static RunConfig Default() {
    RunConfig c;
    corpus::AttackTemplate click;
    click.attack_id = "click";
    click.kind = corpus::ArtefactKind::kClick;
    click.magnitude = 0.8;
    click.region_s = 0.1;
    click.click_period = 400;
    corpus::AttackTemplate band;
    band.attack_id = "bandnoise";
    band.kind = corpus::ArtefactKind::kBandNoise;
    band.magnitude = 0.08;
    band.band = std::make_pair(6000.0, 7900.0);
    band.region_s = 0.15;
    corpus::AttackTemplate hum;
    hum.attack_id = "hum";
    hum.kind = corpus::ArtefactKind::kHum;
    hum.magnitude = 0.15;
    hum.region_s = 0.3;
    hum.placement = corpus::Placement::kWhole;
    c.corpus.attacks = {click, band, hum};
    for (const char* cls : {"bonafide", "click", "bandnoise", "hum"}) {
      c.corpus.train_counts[cls] = 40;
      c.corpus.eval_counts[cls] = 20;
    }
    c.models[model::ModelKind::kRaw1d] = model::ModelConfig::DefaultRaw1d();
    c.models[model::ModelKind::kSpec2d] = model::ModelConfig::DefaultSpec2d();
    return c;
  }

  // Stage seeds fan out from the global seed.
  std::uint64_t CorpusSeed() const { return DeriveSeed(seed, "corpus"); }
  std::uint64_t TrainSeed(model::ModelKind kind) const { return DeriveSeed(seed, "train", model::ToString(kind)); }
  std::uint64_t ExplainSeed() const { return DeriveSeed(seed, "explain"); }
  std::uint64_t AnalyzeSeed() const { return DeriveSeed(seed, "analyze"); }

  corpus::SyntheticCorpusConfig CorpusConfig() const {
    corpus::SyntheticCorpusConfig c = corpus;
    c.seed = CorpusSeed();
    return c;
  }

  train::TrainConfig TrainConfigFor(model::ModelKind kind) const {
    train::TrainConfig t = train;
    t.seed = TrainSeed(kind);
    return t;
  }

  analysis::CohortConfig CohortConfig() const {
    analysis::CohortConfig c;
    c.fraction = shap.prune_fraction;
    c.band_edges_hz = analysis.band_edges_hz;
    c.leading_s = analysis.leading_s;
    c.n_per_attack = analysis.cohort_n;
    return c;
  }

  const model::ModelConfig& Model(model::ModelKind kind) const {
    const auto it = models.find(kind);
    if (it == models.end()) Fail(ErrorCode::kConfig, std::string("models.") + model::ToString(kind) + ": missing");
    return it->second;
  }

  Json ToJson() const;
  static RunConfig FromJson(const Json& j);
};

namespace internal {

[[noreturn]] inline void ConfigError(const std::string& path, const std::string& what) {
  Fail(ErrorCode::kConfig, path + ": " + what);
}

// Reads j[key] as T when present, reporting failures against `path.key`.
template <typename T>
void Read(const Json& j, const std::string& path, const char* key, T* out) {
  if (!j.contains(key)) return;
  try {
    *out = j.at(key).get<T>();
  } catch (const Json::exception&) {
    ConfigError(path + "." + key, "expected " + std::string(Json(*out).type_name()) + ", got " +
                                      j.at(key).dump());
  }
}

inline void CheckKeys(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) ConfigError(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) ConfigError(path + "." + key, "unknown field");
  }
}

// Runs a nested FromJson; messages that do not already name a field under
// `path` get it as a prefix.
template <typename Fn>
auto Nested(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    const std::string msg = e.what();
    if (msg.rfind(path + ".", 0) == 0 || msg.rfind(path + ":", 0) == 0) Fail(ErrorCode::kConfig, msg);
    Fail(ErrorCode::kConfig, path + ": " + msg);
  }
}

inline Json AttackToJson(const corpus::AttackTemplate& a) {
  Json j = {{"id", a.attack_id},
            {"kind", corpus::ToString(a.kind)},
            {"magnitude", a.magnitude},
            {"region_s", a.region_s},
            {"placement", corpus::ToString(a.placement)},
            {"click_period", a.click_period},
            {"hum_hz", a.hum_hz}};
  if (a.band) j["band"] = {a.band->first, a.band->second};
  return j;
}

inline corpus::AttackTemplate AttackFromJson(const Json& j, const std::string& path) {
  CheckKeys(j, path, {"id", "kind", "magnitude", "band", "region_s", "placement", "click_period", "hum_hz"});
  corpus::AttackTemplate a;
  Read(j, path, "id", &a.attack_id);
  if (a.attack_id.empty()) ConfigError(path + ".id", "required");
  std::string kind = "click", placement = "voiced_random";
  Read(j, path, "kind", &kind);
  Read(j, path, "placement", &placement);
  try {
    a.kind = corpus::ArtefactKindFromString(kind);
  } catch (const Error& e) {
    ConfigError(path + ".kind", e.what());
  }
  try {
    a.placement = corpus::PlacementFromString(placement);
  } catch (const Error& e) {
    ConfigError(path + ".placement", e.what());
  }
  Read(j, path, "magnitude", &a.magnitude);
  Read(j, path, "region_s", &a.region_s);
  Read(j, path, "click_period", &a.click_period);
  Read(j, path, "hum_hz", &a.hum_hz);
  if (j.contains("band")) {
    std::vector<double> band;
    Read(j, path, "band", &band);
    if (band.size() != 2 || !(band[0] < band[1])) ConfigError(path + ".band", "expected [lo_hz, hi_hz] with lo < hi");
    a.band = std::make_pair(band[0], band[1]);
  }
  if (!(a.magnitude > 0.0)) ConfigError(path + ".magnitude", "must be positive");
  if (!(a.region_s > 0.0)) ConfigError(path + ".region_s", "must be positive");
  if (a.click_period < 1) ConfigError(path + ".click_period", "must be >= 1");
  if (a.kind == corpus::ArtefactKind::kBandNoise && !a.band) ConfigError(path + ".band", "required for band_noise");
  return a;
}

}  // namespace internal

inline Json RunConfig::ToJson() const {
  Json j;
  j["seed"] = seed;
  j["output_root"] = output_root.string();
  Json c;
  c["attacks"] = Json::array();
  for (const auto& a : corpus.attacks) c["attacks"].push_back(internal::AttackToJson(a));
  c["train_counts"] = corpus.train_counts;
  c["eval_counts"] = corpus.eval_counts;
  c["min_duration_s"] = corpus.min_duration_s;
  c["max_duration_s"] = corpus.max_duration_s;
  c["num_speakers"] = corpus.num_speakers;
  j["corpus"] = c;
  Json m = Json::object();
  for (const auto& [kind, cfg] : models) m[model::ToString(kind)] = cfg.ToJson();
  j["models"] = m;
  Json t = train.ToJson();
  t.erase("seed");
  j["train"] = t;
  Json kinds = Json::array();
  for (auto k : matched_kinds) kinds.push_back(model::ToString(k));
  j["matched"] = {{"kinds", kinds}};
  j["shap"] = shap.ToJson();
  j["analysis"] = {{"band_edges_hz", analysis.band_edges_hz},   {"vad_ratio", analysis.vad_ratio},
                   {"cohort_n", analysis.cohort_n},             {"histogram_bins", analysis.histogram_bins},
                   {"dominance_trials", analysis.dominance_trials}, {"leading_s", analysis.leading_s}};
  j["render"] = {{"mode", viz::ToString(render.style.mode)},
                 {"dilation_radius", render.style.dilation_radius},
                 {"log_magnitude_display", render.style.log_magnitude_display},
                 {"max_utterances", render.max_utterances}};
  return j;
}

// Missing fields keep their defaults; unknown fields and invalid values fail
// with the offending field path.
inline RunConfig RunConfig::FromJson(const Json& j) {
  using internal::ConfigError;
  using internal::Read;
  RunConfig c = Default();
  internal::CheckKeys(j, "config", {"seed", "output_root", "corpus", "models", "train", "matched", "shap", "analysis", "render"});
  Read(j, "config", "seed", &c.seed);
  std::string root = c.output_root.string();
  Read(j, "config", "output_root", &root);
  if (root.empty()) ConfigError("output_root", "must not be empty");
  c.output_root = root;

  if (j.contains("corpus")) {
    const Json& cj = j["corpus"];
    internal::CheckKeys(cj, "corpus",
                        {"attacks", "train_counts", "eval_counts", "min_duration_s", "max_duration_s", "num_speakers"});
    if (cj.contains("attacks")) {
      if (!cj["attacks"].is_array()) ConfigError("corpus.attacks", "expected an array");
      c.corpus.attacks.clear();
      for (std::size_t i = 0; i < cj["attacks"].size(); ++i) {
        c.corpus.attacks.push_back(internal::AttackFromJson(cj["attacks"][i], "corpus.attacks[" + std::to_string(i) + "]"));
      }
    }
    Read(cj, "corpus", "train_counts", &c.corpus.train_counts);
    Read(cj, "corpus", "eval_counts", &c.corpus.eval_counts);
    Read(cj, "corpus", "min_duration_s", &c.corpus.min_duration_s);
    Read(cj, "corpus", "max_duration_s", &c.corpus.max_duration_s);
    Read(cj, "corpus", "num_speakers", &c.corpus.num_speakers);
  }
  if (c.corpus.attacks.size() < 2) ConfigError("corpus.attacks", "at least 2 attacks required");
  std::vector<std::string> classes = {"bonafide"};
  for (const auto& a : c.corpus.attacks) classes.push_back(a.attack_id);
  for (const auto& [name, counts] : {std::pair{"corpus.train_counts", &c.corpus.train_counts},
                                     std::pair{"corpus.eval_counts", &c.corpus.eval_counts}}) {
    for (const auto& [cls, n] : *counts) {
      if (std::find(classes.begin(), classes.end(), cls) == classes.end()) {
        ConfigError(std::string(name) + "." + cls, "not a class of this corpus");
      }
    }
    for (const auto& cls : classes) {
      const auto it = counts->find(cls);
      if (it == counts->end() || it->second < 20) ConfigError(std::string(name) + "." + cls, "must be >= 20");
    }
  }
  if (!(c.corpus.min_duration_s >= 0.5 && c.corpus.min_duration_s <= c.corpus.max_duration_s &&
        c.corpus.max_duration_s <= 10.0)) {
    ConfigError("corpus.min_duration_s", "durations must satisfy 0.5 <= min <= max <= 10");
  }

  if (j.contains("models")) {
    internal::CheckKeys(j["models"], "models", {"raw1d", "spec2d"});
    for (const auto& [name, mj] : j["models"].items()) {
      const std::string path = "models." + name;
      model::ModelConfig mc = internal::Nested(path, [&] { return model::ModelConfig::FromJson(mj); });
      if (mc.kind != model::ModelKindFromString(name)) ConfigError(path + ".kind", "must be " + name);
      c.models[mc.kind] = mc;
    }
  }
  if (j.contains("train")) {
    if (j["train"].contains("seed")) ConfigError("train.seed", "derived from the global seed; set config.seed");
    c.train = internal::Nested("train", [&] { return train::TrainConfig::FromJson(j["train"]); });
  }
  if (j.contains("matched")) {
    internal::CheckKeys(j["matched"], "matched", {"kinds"});
    std::vector<std::string> kinds;
    Read(j["matched"], "matched", "kinds", &kinds);
    c.matched_kinds.clear();
    for (const auto& k : kinds) {
      try {
        c.matched_kinds.push_back(model::ModelKindFromString(k));
      } catch (const Error& e) {
        ConfigError("matched.kinds", e.what());
      }
    }
  }
  if (j.contains("shap")) {
    internal::CheckKeys(j["shap"], "shap", {"n_samples", "target", "noise_std", "fraction"});
    c.shap = internal::Nested("shap", [&] { return shap::ShapConfig::FromJson(j["shap"]); });
  }
  if (j.contains("analysis")) {
    const Json& aj = j["analysis"];
    internal::CheckKeys(aj, "analysis",
                        {"band_edges_hz", "vad_ratio", "cohort_n", "histogram_bins", "dominance_trials", "leading_s"});
    Read(aj, "analysis", "band_edges_hz", &c.analysis.band_edges_hz);
    Read(aj, "analysis", "vad_ratio", &c.analysis.vad_ratio);
    Read(aj, "analysis", "cohort_n", &c.analysis.cohort_n);
    Read(aj, "analysis", "histogram_bins", &c.analysis.histogram_bins);
    Read(aj, "analysis", "dominance_trials", &c.analysis.dominance_trials);
    Read(aj, "analysis", "leading_s", &c.analysis.leading_s);
  }
  const auto& edges = c.analysis.band_edges_hz;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!(edges[i] > 0.0 && edges[i] <= 8000.0) || (i > 0 && !(edges[i] > edges[i - 1]))) {
      ConfigError("analysis.band_edges_hz", "edges must be ascending within (0, 8000]");
    }
  }
  if (!(c.analysis.vad_ratio > 0.0 && c.analysis.vad_ratio < 1.0)) ConfigError("analysis.vad_ratio", "must lie in (0, 1)");
  if (c.analysis.cohort_n < 1) ConfigError("analysis.cohort_n", "must be >= 1");
  if (c.analysis.histogram_bins < 2) ConfigError("analysis.histogram_bins", "must be >= 2");
  if (c.analysis.dominance_trials < 1) ConfigError("analysis.dominance_trials", "must be >= 1");
  if (!(c.analysis.leading_s > 0.0)) ConfigError("analysis.leading_s", "must be positive");

  if (j.contains("render")) {
    const Json& rj = j["render"];
    internal::CheckKeys(rj, "render", {"mode", "dilation_radius", "log_magnitude_display", "max_utterances"});
    std::string mode = viz::ToString(c.render.style.mode);
    Read(rj, "render", "mode", &mode);
    try {
      c.render.style.mode = viz::OverlayModeFromString(mode);
    } catch (const Error& e) {
      ConfigError("render.mode", e.what());
    }
    Read(rj, "render", "dilation_radius", &c.render.style.dilation_radius);
    Read(rj, "render", "log_magnitude_display", &c.render.style.log_magnitude_display);
    Read(rj, "render", "max_utterances", &c.render.max_utterances);
    if (c.render.style.dilation_radius < 0) ConfigError("render.dilation_radius", "must be >= 0");
  }
  return c;
}

inline RunConfig LoadRunConfig(const fs::path& path) {
  Json j;
  try {
    j = ReadJson(path);
  } catch (const Error& e) {
    Fail(ErrorCode::kConfig, e.what());
  }
  return RunConfig::FromJson(j);
}

}  // namespace spoofshap::pipeline

#endif  // SPOOFSHAP_PIPELINE_CONFIG_HPP_
