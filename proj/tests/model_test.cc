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
#include <vector>

#include "gtest/gtest.h"
#include "spoofshap/autodiff/gradcheck.hpp"
#include "spoofshap/model/checkpoint.hpp"
#include "spoofshap/model/model.hpp"

namespace spoofshap::model {
namespace {

// Independent tally: walk the configuration layer by layer.
std::size_t TallyParameters(const ModelConfig& c) {
  const std::size_t taps = c.kind == ModelKind::kRaw1d ? 1 : 2;
  auto conv = [&](std::size_t k, std::size_t ci, std::size_t co) {
    return static_cast<std::size_t>(std::pow(k, taps)) * ci * co + co;
  };
  std::size_t total = conv(c.stem.kernel, 1, c.stem.channels);
  for (const auto& b : c.blocks) {
    total += conv(b.kernel, b.in_channels, b.out_channels);
    total += conv(b.kernel, b.out_channels, b.out_channels);
    if (b.in_channels != b.out_channels || b.stride != 1) total += conv(1, b.in_channels, b.out_channels);
  }
  std::size_t in = c.blocks.back().out_channels;
  for (std::size_t width : c.fc) {
    total += in * width + width;
    in = width;
  }
  return total;
}

Tensor<float> Probe(std::size_t length, std::uint64_t seed) {
  Rng rng(seed);
  Tensor<float> t({1, length});
  for (auto& v : t.data) v = static_cast<float>(rng.Uniform(-0.5, 0.5));
  return t;
}

TEST(ModelTest, DefaultRaw1dParameterCount) {
  const ModelConfig c = ModelConfig::DefaultRaw1d();
  const auto m = BuildModel(c, 1);
  // stem 7*16+16, block0 2*(3*16*16+16), block1 3*16*32+32 + 3*32*32+32 +
  // skip 16*32+32, fc 32*32+32 + 32*16+16 + 16*2+2.
  EXPECT_EQ(TallyParameters(c), 128u + 1568u + 1568u + 3104u + 544u + 1056u + 528u + 34u);
  EXPECT_EQ(m.NumParameters(), TallyParameters(c));
  const auto m2 = BuildModel(ModelConfig::DefaultSpec2d(), 1);
  EXPECT_EQ(m2.NumParameters(), TallyParameters(ModelConfig::DefaultSpec2d()));
}

TEST(ModelTest, InitialisationRangeAndDeterminism) {
  const auto a = BuildModel(ModelConfig::DefaultRaw1d(), 5);
  const auto b = BuildModel(ModelConfig::DefaultRaw1d(), 5);
  const auto c = BuildModel(ModelConfig::DefaultRaw1d(), 6);
  EXPECT_EQ(a.params(), b.params());
  EXPECT_NE(a.params(), c.params());
  for (std::size_t i = 0; i < a.params().size(); ++i) {
    const auto& spec = a.graph().params()[i];
    const double limit = std::sqrt(6.0 / static_cast<double>(spec.fan_in + spec.fan_out));
    for (float v : a.params()[i].data) {
      if (spec.is_bias) {
        EXPECT_EQ(v, 0.0f);
      } else {
        EXPECT_LE(std::abs(v), limit);
      }
    }
  }
}

TEST(ModelTest, ZeroModelGivesZeroLogitsAndEvenProbabilities) {
  const auto m = BuildModel(ModelConfig::DefaultRaw1d(), 0, Init::kZeros);
  const auto logits = m.ForwardScores(Probe(2000, 1));
  EXPECT_EQ(logits.data, (std::vector<float>{0.0f, 0.0f}));
  const auto probs = autodiff::Evaluate(m.probability_graph(), m.params(), Probe(999, 2));
  EXPECT_EQ(probs.data, (std::vector<float>{0.5f, 0.5f}));
}

TEST(ModelTest, MinimumLengthEqualsSearch) {
  for (const ModelConfig& c : {ModelConfig::DefaultRaw1d(), ModelConfig::DefaultSpec2d()}) {
    const auto m = BuildModel(c, 3);
    const std::size_t reported = m.MinInputExtent();
    std::size_t found = 1;
    auto works = [&](std::size_t extent) {
      const Tensor<float> in = c.kind == ModelKind::kRaw1d ? Tensor<float>({1, extent})
                                                           : Tensor<float>({1, dsp::kNumBins, extent});
      try {
        m.ForwardScores(in);
        return true;
      } catch (const Error&) {
        return false;
      }
    };
    while (!works(found)) ++found;
    EXPECT_EQ(reported, found) << ToString(c.kind);
    if (c.kind == ModelKind::kRaw1d) {
      try {
        m.ForwardScores(Tensor<float>({1, reported - 1}));
        FAIL();
      } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find(std::to_string(reported)), std::string::npos) << e.what();
      }
    }
  }
}

TEST(ModelTest, TrailingZerosMayChangeScores) {
  const auto m = BuildModel(ModelConfig::DefaultRaw1d(), 8);
  const Tensor<float> x = Probe(800, 3);
  Tensor<float> padded({1, 1600});
  std::copy(x.data.begin(), x.data.end(), padded.data.begin());
  // Not an invariant: only check that both evaluate.
  EXPECT_EQ(m.ForwardScores(x).size(), 2u);
  EXPECT_EQ(m.ForwardScores(padded).size(), 2u);
}

TEST(ModelTest, InputGradientFiniteForAdmissibleInputs) {
  const auto m = BuildModel(ModelConfig::DefaultRaw1d(), 9).Cast<double>();
  for (std::size_t len : {m.MinInputExtent(), std::size_t{500}, std::size_t{4001}}) {
    Tensor<double> x({1, len});
    Rng rng(len);
    for (auto& v : x.data) v = rng.Uniform(-1, 1);
    for (std::size_t cls : {0u, 1u}) {
      const auto g = autodiff::ComputeGradients(m.graph(), m.params(), x, cls, {false, true});
      ASSERT_EQ(g.input.size(), len);
      for (double v : g.input.data) ASSERT_TRUE(std::isfinite(v));
    }
  }
}

TEST(ModelTest, SmallModelPassesGradientCheck) {
  ModelConfig c;
  c.kind = ModelKind::kRaw1d;
  c.stem = {3, 5, 2};
  c.blocks = {{3, 3, 3, 1}, {3, 4, 3, 2}};
  c.fc = {4, 3, 2};
  const auto m = BuildModel<double>(c, 4);
  Tensor<double> x({1, 80});
  Rng rng(1);
  for (auto& v : x.data) v = rng.Uniform(-1, 1);
  const auto r = autodiff::FiniteDifferenceCheck(m.graph(), m.params(), x, 1e-5, 1);
  EXPECT_LE(r.max_relative_error, 1e-4) << r.worst_coordinate;
}

TEST(ModelTest, InconsistentChannelChainRejected) {
  ModelConfig c = ModelConfig::DefaultRaw1d();
  c.blocks[1].in_channels = 8;
  EXPECT_THROW(BuildModel(c, 0), Error);
  c = ModelConfig::DefaultRaw1d();
  c.fc[2] = 3;
  EXPECT_THROW(BuildModel(c, 0), Error);
  c = ModelConfig::DefaultRaw1d();
  c.stem.stride = 0;
  EXPECT_THROW(BuildModel(c, 0), Error);
}

TEST(ModelTest, ConfigJsonRoundTrip) {
  const ModelConfig c = ModelConfig::DefaultSpec2d();
  EXPECT_EQ(ModelConfig::FromJson(c.ToJson()).ToJson(), c.ToJson());
  Json bad = c.ToJson();
  bad["fc"] = {8, 2};
  EXPECT_THROW(ModelConfig::FromJson(bad), Error);
}

fs::path TempFile(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "spoofshap_model_test";
  fs::create_directories(dir);
  return dir / name;
}

TEST(CheckpointTest, RoundTripIsBitIdentical) {
  const auto m = BuildModel(ModelConfig::DefaultRaw1d(), 21);
  TrainingMetadata meta{21, 4, 0.125};
  SaveCheckpoint(m, meta, TempFile("a.ckpt"));
  const Checkpoint c = LoadCheckpoint(TempFile("a.ckpt"));
  EXPECT_EQ(c.metadata.epoch, 4);
  EXPECT_EQ(c.metadata.val_eer, 0.125);
  const Model<float> back = ModelFromCheckpoint(c);
  EXPECT_EQ(back.params(), m.params());
  EXPECT_EQ(back.config().ToJson(), m.config().ToJson());
  const auto probe = Probe(1234, 5);
  EXPECT_EQ(back.ForwardScores(probe), m.ForwardScores(probe));
}

TEST(CheckpointTest, TruncatedFileReportsCountMismatch) {
  const auto m = BuildModel(ModelConfig::DefaultRaw1d(), 2);
  std::string bytes = EncodeCheckpoint(MakeCheckpoint(m, {}));
  bytes.resize(bytes.size() - 10);
  WriteFileBytes(TempFile("t.ckpt"), bytes);
  try {
    LoadCheckpoint(TempFile("t.ckpt"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("parameter count mismatch"), std::string::npos) << e.what();
  }
}

TEST(CheckpointTest, VersionMismatchIsExplicit) {
  const auto m = BuildModel(ModelConfig::DefaultRaw1d(), 2);
  WriteFileBytes(TempFile("v.ckpt"), EncodeCheckpoint(MakeCheckpoint(m, {}), kCheckpointFormatVersion + 1));
  try {
    LoadCheckpoint(TempFile("v.ckpt"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos) << e.what();
  }
  SaveCheckpoint(m, {}, TempFile("w.ckpt"));
  EXPECT_THROW(LoadCheckpoint(TempFile("w.ckpt"), kCheckpointFormatVersion + 1), Error);
}

}  // namespace
}  // namespace spoofshap::model
