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


#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "spoofshap/corpus/manifest.hpp"
#include "spoofshap/corpus/synth.hpp"
#include "spoofshap/corpus/wav.hpp"
#include "spoofshap/dsp/spectrogram.hpp"

namespace spoofshap::corpus {
namespace {

fs::path TempDir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("spoofshap_corpus_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Builds a canonical 44-byte header PCM file by hand.
std::string HandWav(const std::vector<std::int16_t>& samples, int channels = 1, int format = 1,
                    int bits = 16) {
  std::string b = "RIFF";
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>(v >> (8 * i)));
  };
  auto u16 = [&](std::uint16_t v) {
    b.push_back(static_cast<char>(v));
    b.push_back(static_cast<char>(v >> 8));
  };
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  u32(36 + data_bytes);
  b += "WAVEfmt ";
  u32(16);
  u16(format);
  u16(channels);
  u32(16000);
  u32(16000 * channels * bits / 8);
  u16(channels * bits / 8);
  u16(bits);
  b += "data";
  u32(data_bytes);
  for (auto s : samples) u16(static_cast<std::uint16_t>(s));
  return b;
}

ErrorCode CodeOf(const std::function<void()>& f, std::string* message = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  ADD_FAILURE() << "expected an exception";
  return ErrorCode::kInvalidArgument;
}

TEST(WavTest, DecodeScalesBy32768) {
  const Waveform w = DecodeWav(HandWav({0, 16384, -32768}));
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w.samples[0], 0.0f);
  EXPECT_EQ(w.samples[1], 0.5f);
  EXPECT_EQ(w.samples[2], -1.0f);
  EXPECT_EQ(w.sample_rate, 16000);
}

TEST(WavTest, OneSecondFileHas16000Samples) {
  const fs::path dir = TempDir("one_second");
  Waveform w;
  w.samples.assign(16000, 0.25f);
  WriteWav(w, dir / "a.wav");
  EXPECT_EQ(LoadWav(dir / "a.wav").size(), 16000u);
}

TEST(WavTest, DistinctErrors) {
  std::string msg;
  CodeOf([] { DecodeWav(HandWav({1, 2}, 2)); }, &msg);
  EXPECT_NE(msg.find("unsupported channel count"), std::string::npos) << msg;
  CodeOf([] { DecodeWav(HandWav({1, 2}, 1, 3, 32)); }, &msg);
  EXPECT_NE(msg.find("unsupported encoding"), std::string::npos) << msg;
  CodeOf([] { DecodeWav(HandWav({1, 2}).substr(0, 20)); }, &msg);
  EXPECT_NE(msg.find("truncated header"), std::string::npos) << msg;
  EXPECT_EQ(CodeOf([] { LoadWav("/nonexistent/spoofshap.wav"); }), ErrorCode::kIo);
}

TEST(WavTest, RoundTripWithinOneQuantizationStep) {
  const fs::path dir = TempDir("roundtrip");
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Waveform w;
    w.samples.resize(1 + rng.Below(500));
    for (auto& s : w.samples) s = static_cast<float>(rng.Uniform(-1.0, 1.0));
    if (trial == 0) w.samples = {0.0f, 0.5f};
    WriteWav(w, dir / "r.wav");
    const Waveform back = LoadWav(dir / "r.wav");
    ASSERT_EQ(back.size(), w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      EXPECT_LE(std::abs(back.samples[i] - w.samples[i]), 1.0 / 32768.0);
    }
  }
}

TEST(WavTest, WriteRejectsEmptyAndOutOfRange) {
  const fs::path dir = TempDir("reject");
  EXPECT_THROW(WriteWav(Waveform{}, dir / "e.wav"), Error);
  std::string msg;
  CodeOf([&] { WriteWav(Waveform{{1.5f}, 16000}, dir / "o.wav"); }, &msg);
  EXPECT_NE(msg.find("sample out of range"), std::string::npos) << msg;
}

TEST(ManifestTest, ParsesSpoofAndBonafideLines) {
  const CorpusManifest m = ParseManifestText(
      "LA_0079 LA_T_2909480 - A03 spoof\nLA_0079 LA_T_1138215 - - bonafide\n", Partition::kTrain, "audio");
  ASSERT_EQ(m.records.size(), 2u);
  EXPECT_EQ(m.records[0].utt_id, "LA_T_2909480");
  EXPECT_EQ(m.records[0].attack_id, "A03");
  EXPECT_EQ(m.records[0].key, Key::kSpoof);
  EXPECT_EQ(m.records[1].attack_id, "-");
  EXPECT_EQ(m.records[1].key, Key::kBonafide);
  EXPECT_EQ(m.AttackIds(), std::vector<std::string>{"A03"});
}

TEST(ManifestTest, ErrorsNameTheProblem) {
  std::string msg;
  CodeOf([] { ParseManifestText("LA_0079 LA_T_1 - A01 bonafide\n", Partition::kTrain, "audio"); }, &msg);
  EXPECT_NE(msg.find("attack/key mismatch"), std::string::npos) << msg;
  CodeOf([] { ParseManifestText("a b - - bonafide\nLA_0079 LA_T_1 - A01\n", Partition::kTrain, "audio"); }, &msg);
  EXPECT_NE(msg.find(":2"), std::string::npos) << msg;
  CodeOf([] { ParseManifestText("a u1 - - bonafide\nb u1 - A01 spoof\n", Partition::kTrain, "audio"); }, &msg);
  EXPECT_NE(msg.find("duplicate utt_id"), std::string::npos) << msg;
}

TEST(ManifestTest, ParseSerializeIsIdentityOnCanonicalText) {
  const std::string text =
      "SYN_0001 SYN_T_0000001 - - bonafide\n"
      "SYN_0002 SYN_T_0000002 - click spoof\n"
      "SYN_0001 SYN_T_0000003 - hum spoof\n";
  EXPECT_EQ(SerializeManifest(ParseManifestText(text, Partition::kTrain, "audio")), text);
}

TEST(SynthTest, BonafideIsDeterministicAndSized) {
  const Waveform a = GenBonafide(3, 1.0);
  const Waveform b = GenBonafide(3, 1.0);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.size(), 16000u);
  EXPECT_NE(GenBonafide(4, 1.0).samples, a.samples);
  EXPECT_THROW(GenBonafide(0, 0.4), Error);
  EXPECT_THROW(GenBonafide(0, 10.5), Error);
}

double Rms(const std::vector<float>& x, std::size_t begin, std::size_t end) {
  double acc = 0.0;
  for (std::size_t i = begin; i < end; ++i) acc += static_cast<double>(x[i]) * x[i];
  return std::sqrt(acc / static_cast<double>(end - begin));
}

TEST(SynthTest, VoicedToSilenceRmsRatioAtLeastTen) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const double duration = 0.5 + 0.05 * static_cast<double>(seed % 20);
    const SyntheticUtterance u = GenBonafideDetailed(seed, duration);
    const auto& x = u.waveform.samples;
    const std::size_t lead = u.voiced_start, trail = x.size() - u.voiced_end;
    ASSERT_GE(lead, 3200u);
    ASSERT_LE(lead, 8000u);
    ASSERT_GE(trail, 3200u);
    double silence_energy = 0.0;
    for (std::size_t i = 0; i < lead; ++i) silence_energy += static_cast<double>(x[i]) * x[i];
    for (std::size_t i = u.voiced_end; i < x.size(); ++i) silence_energy += static_cast<double>(x[i]) * x[i];
    const double silence = std::sqrt(silence_energy / static_cast<double>(lead + trail));
    const double voiced = Rms(x, u.voiced_start, u.voiced_end);
    EXPECT_GE(voiced / silence, 10.0) << "seed " << seed;
  }
}

TEST(SynthTest, ClickOnZeroSignalIsLocal) {
  Waveform zero;
  zero.samples.assign(1000, 0.0f);
  ArtefactSpec spec;
  spec.kind = ArtefactKind::kClick;
  spec.start = 100;
  spec.length = 1;
  spec.magnitude = 0.5;
  const auto [out, region] = InjectArtefact(zero, spec);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i == 100) {
      EXPECT_NE(out.samples[i], 0.0f);
    } else {
      EXPECT_EQ(out.samples[i], 0.0f) << i;
    }
  }
  EXPECT_EQ(region.start, 100u);
  EXPECT_EQ(region.end, 101u);
  EXPECT_EQ(region.kind, "click");
}

TEST(SynthTest, AdditiveKindsLeaveOutsideUntouched) {
  const Waveform base = GenBonafide(11, 1.2);
  for (ArtefactKind kind : {ArtefactKind::kClick, ArtefactKind::kBandNoise, ArtefactKind::kHum}) {
    ArtefactSpec spec;
    spec.kind = kind;
    spec.start = 5000;
    spec.length = 3000;
    spec.magnitude = 0.05;
    spec.seed = 5;
    if (kind == ArtefactKind::kBandNoise) spec.band = std::make_pair(6000.0, 8000.0 - 1.0);
    const auto [out, region] = InjectArtefact(base, spec);
    std::size_t changed_inside = 0;
    for (std::size_t i = 0; i < base.size(); ++i) {
      if (i < region.start || i >= region.end) {
        ASSERT_EQ(out.samples[i], base.samples[i]) << ToString(kind) << " at " << i;
      } else if (out.samples[i] != base.samples[i]) {
        ++changed_inside;
      }
    }
    EXPECT_GT(changed_inside, 0u) << ToString(kind);
  }
}

TEST(SynthTest, BandNoiseEnergyConcentratesInUpperBins) {
  Waveform base;
  base.samples.assign(16000, 0.0f);
  Rng rng(1);
  for (auto& s : base.samples) s = static_cast<float>(0.01 * rng.Normal());
  ArtefactSpec spec;
  spec.kind = ArtefactKind::kBandNoise;
  spec.start = 4000;
  spec.length = 8000;
  spec.magnitude = 0.1;
  spec.band = std::make_pair(6000.0, 7999.0);
  const auto [out, region] = InjectArtefact(base, spec);
  const dsp::Spectrogram before = dsp::MagnitudeSpectrogram(base);
  const dsp::Spectrogram after = dsp::MagnitudeSpectrogram(out);
  double inside = 0.0, total = 0.0;
  for (std::size_t n = 0; n < before.num_frames; ++n) {
    for (std::size_t m = 0; m < before.num_bins; ++m) {
      const double gain = std::max(0.0, static_cast<double>(after.at(m, n)) * after.at(m, n) -
                                            static_cast<double>(before.at(m, n)) * before.at(m, n));
      total += gain;
      if (m >= 6000 / 50 && m <= 160) inside += gain;
    }
  }
  EXPECT_GT(inside / total, 0.95);
}

TEST(SynthTest, InjectRejectsBadRegionAndBand) {
  const Waveform base = GenBonafide(1, 1.0);
  ArtefactSpec spec;
  spec.start = 15990;
  spec.length = 100;
  EXPECT_THROW(InjectArtefact(base, spec), Error);
  spec.start = 0;
  spec.kind = ArtefactKind::kBandNoise;
  spec.band = std::make_pair(6000.0, 9000.0);
  EXPECT_THROW(InjectArtefact(base, spec), Error);
}

TEST(SynthTest, NotchAndOnsetOnlyTouchRegion) {
  const Waveform base = GenBonafide(2, 1.0);
  for (ArtefactKind kind : {ArtefactKind::kNotch, ArtefactKind::kOnsetDistortion}) {
    ArtefactSpec spec;
    spec.kind = kind;
    spec.start = 6000;
    spec.length = 1600;
    spec.magnitude = 0.5;
    spec.band = std::make_pair(500.0, 1500.0);
    const auto [out, region] = InjectArtefact(base, spec);
    for (std::size_t i = 0; i < base.size(); ++i) {
      if (i < region.start || i >= region.end) {
        ASSERT_EQ(out.samples[i], base.samples[i]);
      }
    }
    EXPECT_NE(out.samples, base.samples) << ToString(kind);
  }
}

SyntheticCorpusConfig SmallConfig() {
  SyntheticCorpusConfig c;
  c.seed = 42;
  AttackTemplate click{"clickA", ArtefactKind::kClick, 0.2, std::nullopt, 0.1};
  AttackTemplate hum{"humB", ArtefactKind::kHum, 0.05, std::nullopt, 0.2};
  c.attacks = {click, hum};
  c.train_counts = {{"bonafide", 4}, {"clickA", 3}, {"humB", 2}};
  c.eval_counts = {{"bonafide", 2}, {"clickA", 2}, {"humB", 2}};
  c.min_duration_s = 0.6;
  c.max_duration_s = 0.8;
  return c;
}

TEST(CorpusTest, CountsPartitionsAndRegions) {
  const fs::path dir = TempDir("build");
  const SyntheticCorpus corpus = BuildSyntheticCorpus(SmallConfig(), dir);
  EXPECT_EQ(corpus.train.records.size(), 9u);
  EXPECT_EQ(corpus.eval.records.size(), 6u);
  for (const auto& r : corpus.eval.records) EXPECT_EQ(corpus.train.Find(r.utt_id), nullptr);

  const CorpusManifest train = LoadCorpusPartition(dir, Partition::kTrain);
  ASSERT_EQ(train.records.size(), 9u);
  for (const auto& r : train.records) {
    const Waveform w = LoadWav(r.audio_ref);
    EXPECT_EQ(r.is_bonafide(), r.artefact_regions.empty());
    for (const auto& reg : r.artefact_regions) {
      EXPECT_LT(reg.start, reg.end);
      EXPECT_LE(reg.end, w.size());
    }
  }
}

TEST(CorpusTest, EightyRecordExample) {
  const fs::path dir = TempDir("eighty");
  SyntheticCorpusConfig c = SmallConfig();
  c.attacks[0].attack_id = "clickA";
  c.train_counts = {{"bonafide", 40}, {"clickA", 40}, {"humB", 1}};
  c.attacks.pop_back();
  c.attacks.push_back({"humB", ArtefactKind::kHum, 0.05, std::nullopt, 0.2});
  const SyntheticCorpus corpus = BuildSyntheticCorpus(c, dir);
  std::size_t bona_or_click = 0;
  for (const auto& r : corpus.train.records) bona_or_click += r.attack_id != "humB";
  EXPECT_EQ(bona_or_click, 80u);
}

TEST(CorpusTest, SameSeedGivesByteIdenticalFiles) {
  const fs::path a = TempDir("det_a"), b = TempDir("det_b");
  BuildSyntheticCorpus(SmallConfig(), a);
  BuildSyntheticCorpus(SmallConfig(), b);
  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a);
    const std::string lhs = ReadFileBytes(entry.path()), rhs = ReadFileBytes(b / rel);
    EXPECT_EQ(lhs, rhs) << rel;
    ++files;
  }
  EXPECT_EQ(files, 15u + 4u);
}

TEST(CorpusTest, RejectsZeroCountsAndSingleAttack) {
  const fs::path dir = TempDir("reject");
  SyntheticCorpusConfig c = SmallConfig();
  c.eval_counts["humB"] = 0;
  std::string msg;
  CodeOf([&] { BuildSyntheticCorpus(c, dir); }, &msg);
  EXPECT_NE(msg.find("zero count"), std::string::npos) << msg;
  c = SmallConfig();
  c.attacks.pop_back();
  EXPECT_THROW(BuildSyntheticCorpus(c, dir), Error);
  c = SmallConfig();
  c.attacks[1].attack_id = "clickA";
  CodeOf([&] { BuildSyntheticCorpus(c, dir); }, &msg);
  EXPECT_NE(msg.find("colliding output paths"), std::string::npos) << msg;
}

}  // namespace
}  // namespace spoofshap::corpus
