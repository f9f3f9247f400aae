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

#ifndef SPOOFSHAP_CORPUS_SYNTH_HPP_
#define SPOOFSHAP_CORPUS_SYNTH_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "spoofshap/corpus/manifest.hpp"
#include "spoofshap/corpus/wav.hpp"
#include "spoofshap/dsp/fft.hpp"
#include "spoofshap/error.hpp"
#include "spoofshap/random.hpp"

namespace spoofshap::corpus {

// A bona fide-like utterance together with where its voiced part lies.
struct SyntheticUtterance {
  Waveform waveform;
  std::size_t voiced_start = 0;
  std::size_t voiced_end = 0;
};

namespace internal {

inline double Resonance(double f, double centre, double bandwidth) {
  const double x = (f - centre) / bandwidth;
  return 1.0 / (1.0 + x * x);
}

}  // namespace internal

// Harmonic series with a drifting f0 (80-250 Hz) shaped by three slowly
// moving formants, framed by 0.2-0.5 s of low-level noise on either side.
inline SyntheticUtterance GenBonafideDetailed(std::uint64_t seed, double duration_s) {
  if (!(duration_s >= 0.5 && duration_s <= 10.0)) {
    Fail(ErrorCode::kInvalidArgument, "duration must lie in [0.5, 10] s");
  }
  constexpr double kFs = kDefaultSampleRate;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  Rng rng(seed);
  const auto length = static_cast<std::size_t>(std::lround(duration_s * kFs));
  const double max_silence = std::min(0.5, (duration_s - 0.1) / 2.0);
  const double lead_s = rng.Uniform(0.2, max_silence);
  const double trail_s = rng.Uniform(0.2, max_silence);

  SyntheticUtterance out;
  out.voiced_start = static_cast<std::size_t>(std::lround(lead_s * kFs));
  out.voiced_end = length - static_cast<std::size_t>(std::lround(trail_s * kFs));

  const double f0_base = rng.Uniform(100.0, 190.0);
  const double f0_rate = rng.Uniform(0.3, 1.2);
  const double f0_phase = rng.Uniform(0.0, kTwoPi);
  const double jitter_rate = rng.Uniform(2.5, 4.5);
  struct Formant {
    double centre, swing, rate, phase, bandwidth, gain;
  };
  const Formant formants[3] = {
      {rng.Uniform(450, 750), rng.Uniform(50, 150), rng.Uniform(1.5, 4.0), rng.Uniform(0, kTwoPi), 90, 1.0},
      {rng.Uniform(1100, 1900), rng.Uniform(100, 300), rng.Uniform(1.0, 3.5), rng.Uniform(0, kTwoPi), 130, 0.6},
      {rng.Uniform(2400, 3000), rng.Uniform(50, 200), rng.Uniform(0.5, 2.0), rng.Uniform(0, kTwoPi), 180, 0.35},
  };
  const double syllable_rate = rng.Uniform(3.0, 5.0);
  const double peak = rng.Uniform(0.3, 0.6);
  const double noise_std = rng.Uniform(0.001, 0.003);

  std::vector<double> voiced(length, 0.0);
  constexpr int kMaxHarmonics = 64;
  double phases[kMaxHarmonics] = {};
  const double ramp = 0.03 * kFs;
  for (std::size_t i = out.voiced_start; i < out.voiced_end; ++i) {
    const double t = static_cast<double>(i) / kFs;
    const double tv = static_cast<double>(i - out.voiced_start) / kFs;
    double f0 = f0_base * (1.0 + 0.15 * std::sin(kTwoPi * f0_rate * t + f0_phase) +
                           0.04 * std::sin(kTwoPi * jitter_rate * t));
    f0 = std::clamp(f0, 80.0, 250.0);
    double centres[3];
    for (int j = 0; j < 3; ++j) {
      centres[j] = formants[j].centre +
                   formants[j].swing * std::sin(kTwoPi * formants[j].rate * t + formants[j].phase);
    }
    double value = 0.0;
    for (int k = 1; k <= kMaxHarmonics; ++k) {
      const double f = k * f0;
      if (f >= 7000.0) break;
      phases[k - 1] += kTwoPi * f / kFs;
      if (phases[k - 1] > kTwoPi) phases[k - 1] -= kTwoPi;
      double gain = 0.02;
      for (int j = 0; j < 3; ++j) {
        gain += formants[j].gain * internal::Resonance(f, centres[j], formants[j].bandwidth);
      }
      value += gain * std::sin(phases[k - 1]) / std::sqrt(static_cast<double>(k));
    }
    const double syllable = 0.25 + 0.75 * (0.5 - 0.5 * std::cos(kTwoPi * syllable_rate * tv));
    const double from_start = static_cast<double>(i - out.voiced_start);
    const double to_end = static_cast<double>(out.voiced_end - 1 - i);
    const double edge = std::min({1.0, from_start / ramp, to_end / ramp});
    voiced[i] = value * syllable * edge;
  }
  double max_abs = 0.0;
  for (double v : voiced) max_abs = std::max(max_abs, std::abs(v));
  const double scale = max_abs > 0.0 ? peak / max_abs : 0.0;

  out.waveform.sample_rate = kDefaultSampleRate;
  out.waveform.samples.resize(length);
  for (std::size_t i = 0; i < length; ++i) {
    const double s = voiced[i] * scale + rng.Normal(0.0, noise_std);
    out.waveform.samples[i] = static_cast<float>(std::clamp(s, -1.0, 1.0));
  }
  return out;
}

inline Waveform GenBonafide(std::uint64_t seed, double duration_s) {
  return GenBonafideDetailed(seed, duration_s).waveform;
}

enum class ArtefactKind { kClick, kBandNoise, kHum, kNotch, kOnsetDistortion };

inline const char* ToString(ArtefactKind k) {
  switch (k) {
    case ArtefactKind::kClick: return "click";
    case ArtefactKind::kBandNoise: return "band_noise";
    case ArtefactKind::kHum: return "hum";
    case ArtefactKind::kNotch: return "notch";
    case ArtefactKind::kOnsetDistortion: return "onset_distortion";
  }
  return "?";
}

inline ArtefactKind ArtefactKindFromString(const std::string& s) {
  for (auto k : {ArtefactKind::kClick, ArtefactKind::kBandNoise, ArtefactKind::kHum,
                 ArtefactKind::kNotch, ArtefactKind::kOnsetDistortion}) {
    if (s == ToString(k)) return k;
  }
  Fail(ErrorCode::kInvalidArgument, "unknown artefact kind: " + s);
}

inline bool IsAdditive(ArtefactKind k) {
  return k == ArtefactKind::kClick || k == ArtefactKind::kBandNoise || k == ArtefactKind::kHum;
}

struct ArtefactSpec {
  ArtefactKind kind = ArtefactKind::kClick;
  std::size_t start = 0;
  std::size_t length = 0;
  double magnitude = 0.1;
  std::optional<std::pair<double, double>> band;  // Hz
  std::uint64_t seed = 0;                          // for noise-based kinds
  std::size_t click_period = 200;                  // samples between clicks
  double hum_hz = 50.0;                            // used when band is unset
};

namespace internal {

// Raised-cosine fade over the first and last `fade` samples of a region.
inline double Taper(std::size_t i, std::size_t length, std::size_t fade) {
  if (fade == 0 || length < 2 * fade) return 1.0;
  const std::size_t d = std::min(i, length - 1 - i);
  if (d >= fade) return 1.0;
  return 0.5 - 0.5 * std::cos(std::numbers::pi * (static_cast<double>(d) + 0.5) / fade);
}

}  // namespace internal

// Applies one artefact inside spec's region. Additive kinds never touch
// samples outside [start, start + length); results are clamped to [-1, 1].
inline std::pair<Waveform, ArtefactRegion> InjectArtefact(const Waveform& w,
                                                          const ArtefactSpec& spec) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  Require(spec.length > 0, "artefact region must be non-empty");
  if (spec.start >= w.samples.size() || spec.length > w.samples.size() - spec.start) {
    Fail(ErrorCode::kInvalidArgument, "artefact region out of bounds");
  }
  Require(spec.magnitude > 0.0, "artefact magnitude must be positive");
  const double nyquist = w.sample_rate / 2.0;
  if (spec.band) {
    const auto [lo, hi] = *spec.band;
    if (!(lo > 0.0 && hi < nyquist && lo <= hi)) {
      Fail(ErrorCode::kInvalidArgument, "band outside (0, Nyquist)");
    }
  }
  const bool needs_band = spec.kind == ArtefactKind::kBandNoise || spec.kind == ArtefactKind::kNotch;
  Require(!needs_band || spec.band.has_value(), std::string(ToString(spec.kind)) + " needs a band");

  Waveform out = w;
  std::vector<double> region(spec.length);
  for (std::size_t i = 0; i < spec.length; ++i) region[i] = w.samples[spec.start + i];
  const double fs = w.sample_rate;
  const std::size_t fade = std::min<std::size_t>(spec.length / 4, static_cast<std::size_t>(0.005 * fs));

  switch (spec.kind) {
    case ArtefactKind::kClick: {
      double sign = 1.0;
      for (std::size_t i = 0; i < spec.length; i += std::max<std::size_t>(1, spec.click_period)) {
        region[i] += sign * spec.magnitude;
        sign = -sign;
      }
      break;
    }
    case ArtefactKind::kBandNoise: {
      Rng rng(spec.seed);
      constexpr int kComponents = 96;
      const auto [lo, hi] = *spec.band;
      std::vector<double> noise(spec.length, 0.0);
      for (int c = 0; c < kComponents; ++c) {
        const double f = rng.Uniform(lo, hi);
        const double phase = rng.Uniform(0.0, kTwoPi);
        for (std::size_t i = 0; i < spec.length; ++i) {
          noise[i] += std::cos(kTwoPi * f * static_cast<double>(i) / fs + phase);
        }
      }
      double energy = 0.0;
      for (double v : noise) energy += v * v;
      const double rms = std::sqrt(energy / static_cast<double>(spec.length));
      for (std::size_t i = 0; i < spec.length; ++i) {
        region[i] += spec.magnitude * noise[i] / rms * internal::Taper(i, spec.length, fade);
      }
      break;
    }
    case ArtefactKind::kHum: {
      const double f = spec.band ? 0.5 * (spec.band->first + spec.band->second) : spec.hum_hz;
      const double phase = Rng(spec.seed).Uniform(0.0, kTwoPi);
      for (std::size_t i = 0; i < spec.length; ++i) {
        region[i] += spec.magnitude * std::sin(kTwoPi * f * static_cast<double>(i) / fs + phase) *
                     internal::Taper(i, spec.length, fade);
      }
      break;
    }
    case ArtefactKind::kNotch: {
      const dsp::Fft fft(spec.length);
      auto spectrum = fft.Forward(std::span<const double>(region));
      const auto [lo, hi] = *spec.band;
      const double bin_hz = fs / static_cast<double>(spec.length);
      for (std::size_t k = 0; k <= spec.length / 2; ++k) {
        const double f = static_cast<double>(k) * bin_hz;
        if (f >= lo && f <= hi) {
          spectrum[k] = 0.0;
          if (k != 0) spectrum[(spec.length - k) % spec.length] = 0.0;
        }
      }
      const auto filtered = fft.Inverse(spectrum);
      for (std::size_t i = 0; i < spec.length; ++i) region[i] = filtered[i].real();
      break;
    }
    case ArtefactKind::kOnsetDistortion: {
      double peak = 0.0;
      for (double v : region) peak = std::max(peak, std::abs(v));
      if (peak > 0.0) {
        const double drive = 1.0 + 9.0 * spec.magnitude;
        const double norm = std::tanh(drive);
        for (double& v : region) v = peak * std::tanh(drive * v / peak) / norm;
      }
      break;
    }
  }
  for (std::size_t i = 0; i < spec.length; ++i) {
    out.samples[spec.start + i] = static_cast<float>(std::clamp(region[i], -1.0, 1.0));
  }
  return {std::move(out), ArtefactRegion{spec.start, spec.start + spec.length, ToString(spec.kind)}};
}

// Where an attack template places its region within an utterance.
enum class Placement { kVoicedRandom, kWhole, kOnset };

inline const char* ToString(Placement p) {
  switch (p) {
    case Placement::kVoicedRandom: return "voiced_random";
    case Placement::kWhole: return "whole";
    case Placement::kOnset: return "onset";
  }
  return "?";
}

inline Placement PlacementFromString(const std::string& s) {
  for (auto p : {Placement::kVoicedRandom, Placement::kWhole, Placement::kOnset}) {
    if (s == ToString(p)) return p;
  }
  Fail(ErrorCode::kInvalidArgument, "unknown placement: " + s);
}

struct AttackTemplate {
  std::string attack_id;
  ArtefactKind kind = ArtefactKind::kClick;
  double magnitude = 0.1;
  std::optional<std::pair<double, double>> band;
  double region_s = 0.1;
  Placement placement = Placement::kVoicedRandom;
  std::size_t click_period = 200;
  double hum_hz = 50.0;
};

struct SyntheticCorpusConfig {
  std::uint64_t seed = 0;
  std::vector<AttackTemplate> attacks;
  // Utterance counts per class ("bonafide" or an attack id) per partition.
  std::map<std::string, std::size_t> train_counts;
  std::map<std::string, std::size_t> eval_counts;
  double min_duration_s = 1.0;
  double max_duration_s = 1.4;
  std::size_t num_speakers = 20;
};

struct SyntheticCorpus {
  CorpusManifest train;
  CorpusManifest eval;
};

// One utterance of class `class_id`; deterministic in (seed, utt_id).
inline std::pair<Waveform, std::vector<ArtefactRegion>> SynthesizeUtterance(
    const SyntheticCorpusConfig& config, const AttackTemplate* attack,
    const std::string& utt_id, double duration_s) {
  const std::uint64_t utt_seed = DeriveSeed(config.seed, "utterance", utt_id);
  SyntheticUtterance base = GenBonafideDetailed(utt_seed, duration_s);
  if (attack == nullptr) return {std::move(base.waveform), {}};

  Rng rng(DeriveSeed(config.seed, "artefact", utt_id));
  const std::size_t total = base.waveform.size();
  ArtefactSpec spec;
  spec.kind = attack->kind;
  spec.magnitude = attack->magnitude;
  spec.band = attack->band;
  spec.seed = rng.NextU64();
  spec.click_period = attack->click_period;
  spec.hum_hz = attack->hum_hz;
  const std::size_t want = static_cast<std::size_t>(std::lround(attack->region_s * base.waveform.sample_rate));
  switch (attack->placement) {
    case Placement::kWhole:
      spec.start = 0;
      spec.length = total;
      break;
    case Placement::kOnset:
      spec.start = base.voiced_start;
      spec.length = std::min(want, base.voiced_end - base.voiced_start);
      break;
    case Placement::kVoicedRandom: {
      const std::size_t voiced = base.voiced_end - base.voiced_start;
      spec.length = std::min(want, voiced);
      spec.start = base.voiced_start + rng.Below(voiced - spec.length + 1);
      break;
    }
  }
  auto [spoofed, region] = InjectArtefact(base.waveform, spec);
  return {std::move(spoofed), {std::move(region)}};
}

// Writes wav/<utt_id>.wav, {train,eval}.protocol.txt and
// {train,eval}.regions.json under out_dir. Pure function of (config, seed).
inline SyntheticCorpus BuildSyntheticCorpus(const SyntheticCorpusConfig& config,
                                            const fs::path& out_dir) {
  if (config.attacks.size() < 2) {
    Fail(ErrorCode::kInvalidArgument, "synthetic corpus needs at least 2 attack kinds");
  }
  std::set<std::string> ids;
  for (const auto& a : config.attacks) {
    if (a.attack_id.empty() || a.attack_id == kBonafideAttack || a.attack_id == "bonafide" ||
        a.attack_id.find_first_of(" \t\n/") != std::string::npos) {
      Fail(ErrorCode::kInvalidArgument, "invalid attack id '" + a.attack_id + "'");
    }
    if (!ids.insert(a.attack_id).second) {
      Fail(ErrorCode::kInvalidArgument, "colliding output paths: duplicate attack id " + a.attack_id);
    }
  }
  Require(config.min_duration_s >= 0.5 && config.max_duration_s <= 10.0 &&
              config.min_duration_s <= config.max_duration_s,
          "utterance durations must lie in [0.5, 10] s");
  Require(config.num_speakers >= 1, "num_speakers must be positive");

  std::vector<std::string> classes = {"bonafide"};
  for (const auto& a : config.attacks) classes.push_back(a.attack_id);
  for (const auto* counts : {&config.train_counts, &config.eval_counts}) {
    for (const auto& [name, n] : *counts) {
      if (std::find(classes.begin(), classes.end(), name) == classes.end()) {
        Fail(ErrorCode::kInvalidArgument, "count given for unknown class " + name);
      }
    }
    for (const auto& c : classes) {
      auto it = counts->find(c);
      if (it == counts->end() || it->second == 0) {
        Fail(ErrorCode::kInvalidArgument, "zero count for class " + c);
      }
    }
  }

  const fs::path wav_dir = out_dir / "wav";
  SyntheticCorpus corpus;
  corpus.train.partition = Partition::kTrain;
  corpus.eval.partition = Partition::kEval;
  std::set<fs::path> written;
  for (Partition part : {Partition::kTrain, Partition::kEval}) {
    CorpusManifest& manifest = part == Partition::kTrain ? corpus.train : corpus.eval;
    const auto& counts = part == Partition::kTrain ? config.train_counts : config.eval_counts;
    const std::string prefix = part == Partition::kTrain ? "SYN_T_" : "SYN_E_";
    std::size_t index = 0;
    for (const auto& cls : classes) {
      const AttackTemplate* attack = nullptr;
      for (const auto& a : config.attacks) {
        if (a.attack_id == cls) attack = &a;
      }
      for (std::size_t i = 0; i < counts.at(cls); ++i) {
        char id[32];
        std::snprintf(id, sizeof(id), "%s%07zu", prefix.c_str(), ++index);
        UtteranceRecord r;
        r.utt_id = id;
        Rng meta(DeriveSeed(config.seed, "meta", r.utt_id));
        char speaker[32];
        std::snprintf(speaker, sizeof(speaker), "SYN_%04zu",
                      static_cast<std::size_t>(meta.Below(config.num_speakers)));
        r.speaker_id = speaker;
        r.key = attack ? Key::kSpoof : Key::kBonafide;
        r.attack_id = attack ? attack->attack_id : kBonafideAttack;
        r.audio_ref = wav_dir / (r.utt_id + ".wav");
        if (!written.insert(r.audio_ref).second) {
          Fail(ErrorCode::kInvalidArgument, "colliding output paths: " + r.audio_ref.string());
        }
        const double duration = meta.Uniform(config.min_duration_s, config.max_duration_s);
        auto [wave, regions] = SynthesizeUtterance(config, attack, r.utt_id, duration);
        WriteWav(wave, r.audio_ref);
        r.artefact_regions = std::move(regions);
        manifest.records.push_back(std::move(r));
      }
    }
    const std::string name = ToString(part);
    WriteFileBytes(out_dir / (name + ".protocol.txt"), SerializeManifest(manifest));
    WriteJson(out_dir / (name + ".regions.json"), RegionsToJson(manifest));
  }
  return corpus;
}

// Loads a manifest written by BuildSyntheticCorpus, regions included.
inline CorpusManifest LoadCorpusPartition(const fs::path& corpus_dir, Partition part) {
  const std::string name = ToString(part);
  CorpusManifest m = ParseManifest(corpus_dir / (name + ".protocol.txt"), part, corpus_dir / "wav");
  const fs::path regions = corpus_dir / (name + ".regions.json");
  if (fs::exists(regions)) AttachRegions(m, ReadJson(regions));
  return m;
}

}  // namespace spoofshap::corpus

#endif  // SPOOFSHAP_CORPUS_SYNTH_HPP_
