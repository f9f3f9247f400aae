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


#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "gtest/gtest.h"
#include "spoofshap/model/model.hpp"
#include "spoofshap/random.hpp"
#include "spoofshap/shap/attribution.hpp"
#include "spoofshap/shap/dump.hpp"
#include "spoofshap/shap/estimators.hpp"
#include "spoofshap/shap/explain.hpp"
#include "spoofshap/train/trainer.hpp"

namespace spoofshap::shap {
namespace {

struct Linear {
  std::vector<double> w;
  double Value(const std::vector<double>& x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * x[i];
    return s;
  }
  std::vector<double> Gradient(const std::vector<double>&) const { return w; }
};

struct Product {
  double Value(const std::vector<double>& x) const { return x[0] * x[1]; }
};

// f(x) = c + b.x + x'Ax with symmetric A.
struct Quadratic {
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  double c = 0.0;
  double Value(const std::vector<double>& x) const {
    double s = c;
    for (std::size_t i = 0; i < x.size(); ++i) {
      s += b[i] * x[i];
      for (std::size_t j = 0; j < x.size(); ++j) s += x[i] * a[i][j] * x[j];
    }
    return s;
  }
  std::vector<double> Gradient(const std::vector<double>& x) const {
    std::vector<double> g(b);
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = 0; j < x.size(); ++j) g[i] += 2.0 * a[i][j] * x[j];
    }
    return g;
  }
};

Quadratic RandomQuadratic(std::size_t d, Rng& rng) {
  Quadratic q;
  q.a.assign(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) q.a[i][j] = q.a[j][i] = rng.Uniform(-1.0, 1.0);
  }
  q.b.resize(d);
  for (auto& v : q.b) v = rng.Uniform(-1.0, 1.0);
  q.c = rng.Uniform(-1.0, 1.0);
  return q;
}

// A small smooth network: tanh hidden layer, used as a non-polynomial model.
struct TanhNet {
  std::vector<std::vector<double>> w;
  std::vector<double> v;
  double Value(const std::vector<double>& x) const {
    double out = 0.0;
    for (std::size_t h = 0; h < w.size(); ++h) {
      double z = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) z += w[h][i] * x[i];
      out += v[h] * std::tanh(z);
    }
    return out;
  }
};

TEST(ExplanationModelTest, Examples) {
  AttributionMap att;
  att.phi = {2.0, 3.0};
  att.phi0 = 1.0;
  EXPECT_DOUBLE_EQ(ExplanationModelValue(att, {true, false}), 3.0);
  EXPECT_DOUBLE_EQ(ExplanationModelValue(att, {true, true}), 6.0);
  EXPECT_DOUBLE_EQ(ExplanationModelValue(att, {false, false}), 1.0);
  EXPECT_THROW(ExplanationModelValue(att, {true}), Error);
}

TEST(ExactShapleyTest, LinearModel) {
  const auto att = ExactShapley(Linear{{2.0, 3.0}}, {1.0, 1.0}, {0.0, 0.0});
  EXPECT_DOUBLE_EQ(att.phi[0], 2.0);
  EXPECT_DOUBLE_EQ(att.phi[1], 3.0);
  EXPECT_DOUBLE_EQ(att.phi0, 0.0);
}

TEST(ExactShapleyTest, ProductByCoalitionEnumeration) {
  const auto att = ExactShapley(Product{}, {2.0, 3.0}, {0.0, 0.0});
  EXPECT_DOUBLE_EQ(att.phi[0], 3.0);
  EXPECT_DOUBLE_EQ(att.phi[1], 3.0);
  EXPECT_DOUBLE_EQ(att.phi0, 0.0);
}

TEST(ExactShapleyTest, EfficiencyOnRandomModels) {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 1 + rng.Below(10);
    TanhNet net;
    net.w.assign(4, std::vector<double>(d));
    for (auto& row : net.w) {
      for (auto& x : row) x = rng.Normal();
    }
    net.v = {rng.Normal(), rng.Normal(), rng.Normal(), rng.Normal()};
    std::vector<double> x(d);
    for (auto& v : x) v = rng.Normal();
    const auto att = ExactShapley(net, x, std::vector<double>(d, 0.0));
    EXPECT_LE(AdditivityGap(net.Value(x), att), 1e-9);
    EXPECT_NEAR(att.phi0 + att.Sum(), net.Value(x), 1e-9);
  }
}

TEST(ExactShapleyTest, SymmetryAndNullFeature) {
  struct F {
    double Value(const std::vector<double>& x) const { return x[0] + x[1] + 0.0 * x[2] + x[0] * x[1]; }
  };
  const auto att = ExactShapley(F{}, {1.5, 1.5, 7.0}, {0.0, 0.0, 0.0});
  EXPECT_EQ(att.phi[0], att.phi[1]);
  EXPECT_EQ(att.phi[2], 0.0);
}

TEST(ExactShapleyTest, DimensionLimit) {
  std::vector<double> x(21, 1.0);
  try {
    ExactShapley(Linear{x}, x, std::vector<double>(21, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("D <= 20"), std::string::npos);
  }
}

TEST(GradientShapTest, LinearModelIsExact) {
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    for (std::size_t n : {1u, 5u, 20u}) {
      const auto att = GradientShap(Linear{{2.0, 3.0}}, {1.0, 1.0}, {0.0, 0.0}, {n, seed, 0.0});
      EXPECT_DOUBLE_EQ(att.phi[0], 2.0);
      EXPECT_DOUBLE_EQ(att.phi[1], 3.0);
      EXPECT_LE(AdditivityGap(5.0, att), 1e-9);
    }
  }
}

TEST(GradientShapTest, MatchesExactOnRandomLinearModels) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 2 + rng.Below(10);
    Linear f{std::vector<double>(d)};
    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i) f.w[i] = rng.Normal(), x[i] = rng.Normal();
    const auto exact = ExactShapley(f, x, std::vector<double>(d, 0.0));
    const auto approx = GradientShap(f, x, std::vector<double>(d, 0.0), {20, 3, 0.0});
    for (std::size_t i = 0; i < d; ++i) EXPECT_NEAR(exact.phi[i], approx.phi[i], 1e-9);
  }
}

TEST(GradientShapTest, QuadraticAgreesWithExactAt2000Samples) {
  Rng rng(8);
  const std::size_t d = 8;
  const Quadratic q = RandomQuadratic(d, rng);
  std::vector<double> x(d);
  for (auto& v : x) v = rng.Uniform(-1.0, 1.0);
  const auto exact = ExactShapley(q, x, std::vector<double>(d, 0.0));
  const auto approx = GradientShap(q, x, std::vector<double>(d, 0.0), {2000, 4, 0.0});
  double max_phi = 0.0, max_diff = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    max_phi = std::max(max_phi, std::abs(exact.phi[i]));
    max_diff = std::max(max_diff, std::abs(exact.phi[i] - approx.phi[i]));
  }
  EXPECT_LE(max_diff, 0.05 * max_phi);
  EXPECT_DOUBLE_EQ(approx.phi0, q.c);
}

TEST(GradientShapTest, DeterministicInSeed) {
  Rng rng(9);
  const Quadratic q = RandomQuadratic(5, rng);
  const std::vector<double> x = {0.1, -0.4, 0.9, 0.3, -0.2};
  const auto a = GradientShap(q, x, std::vector<double>(5, 0.0), {20, 77, 0.1});
  const auto b = GradientShap(q, x, std::vector<double>(5, 0.0), {20, 77, 0.1});
  EXPECT_EQ(a.phi, b.phi);
  const auto c = GradientShap(q, x, std::vector<double>(5, 0.0), {20, 78, 0.1});
  EXPECT_NE(a.phi, c.phi);
}

TEST(GradientShapTest, NullFeatureGetsZero) {
  const auto att = GradientShap(Linear{{1.0, 0.0, -2.0}}, {3.0, 5.0, 1.0}, {0.0, 0.0, 0.0}, {20, 1, 0.0});
  EXPECT_LE(std::abs(att.phi[1]), 1e-9);
}

TEST(GradientShapTest, RejectsBadOptions) {
  EXPECT_THROW(GradientShap(Linear{{1.0}}, {1.0}, {0.0}, {0, 1, 0.0}), Error);
  EXPECT_THROW(GradientShap(Linear{{1.0}}, {1.0}, {0.0, 0.0}, {1, 1, 0.0}), Error);
  EXPECT_THROW(GradientShap(Linear{{1.0}}, {1.0}, {0.0}, {1, 1, -1.0}), Error);
}

TEST(AttributionTest, PositivePart) {
  EXPECT_EQ(PositivePart(std::vector<double>{-1.0, 2.0}), (std::vector<double>{0.0, 2.0}));
  EXPECT_EQ(PositivePart(std::vector<double>{-1.0, -2.0}), (std::vector<double>{0.0, 0.0}));
  const std::vector<double> v = {-0.5, 0.25, 3.0, -7.0};
  EXPECT_EQ(PositivePart(PositivePart(v)), PositivePart(v));
}

TEST(AttributionTest, ClassSymmetryDefinitions) {
  AttributionMap a, b;
  a.phi = {0.3, -1.2, 2.0, 0.5};
  b.phi = {-0.3, 1.2, -2.0, -0.5};
  EXPECT_NEAR(ClassSymmetry(a, b), -1.0, 1e-12);
  b.phi = {1.0, 1.0, 1.0, 1.0};
  try {
    ClassSymmetry(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumerical);
  }
}

model::ModelConfig TinyRaw() {
  model::ModelConfig c;
  c.kind = model::ModelKind::kRaw1d;
  c.stem = {3, 5, 2};
  c.blocks = {{3, 4, 3, 2}};
  c.fc = {6, 8, 2};
  return c;
}

autodiff::Tensor<double> RandomInput(std::size_t length, std::uint64_t seed) {
  Rng rng(seed);
  autodiff::Tensor<double> x({1, length});
  for (auto& v : x.data) v = rng.Uniform(-1.0, 1.0);
  return x;
}

TEST(ExplainTest, ProbabilityTargetsNegateExactly) {
  const auto m = model::BuildModel<double>(TinyRaw(), 4);
  ShapConfig cfg;
  cfg.target = Target::kProbability;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto x = RandomInput(64, s);
    const auto bona = ExplainInput(m, x, model::kBonafideClass, cfg, UtteranceSeed(1, "u" + std::to_string(s)));
    const auto spoof = ExplainInput(m, x, model::kSpoofClass, cfg, UtteranceSeed(1, "u" + std::to_string(s)));
    for (std::size_t i = 0; i < bona.size(); ++i) ASSERT_NEAR(bona.phi[i], -spoof.phi[i], 1e-9);
    EXPECT_NEAR(bona.phi0 + spoof.phi0, 1.0, 1e-12);
  }
}

TEST(ExplainTest, MapHasInputShapeAndMetadata) {
  const auto m = model::BuildModel<double>(TinyRaw(), 4);
  const auto x = RandomInput(50, 3);
  ShapConfig cfg;
  const auto att = ExplainInput(m, x, model::kSpoofClass, cfg, 42);
  EXPECT_EQ(att.shape, x.shape);
  EXPECT_EQ(att.size(), 50u);
  EXPECT_EQ(att.class_index, model::kSpoofClass);
  EXPECT_EQ(att.n_samples, 20u);
  EXPECT_EQ(att.seed, 42u);
  EXPECT_TRUE(std::isfinite(att.phi0));
  const auto zero = autodiff::Tensor<double>(x.shape);
  EXPECT_DOUBLE_EQ(att.phi0, m.ForwardScores(zero)[model::kSpoofClass]);
}

TEST(ExplainTest, InadmissibleInputIsRejected) {
  const auto m = model::BuildModel<double>(TinyRaw(), 4);
  EXPECT_THROW(ExplainInput(m, RandomInput(4, 1), 0, ShapConfig{}, 1), Error);
  EXPECT_THROW(ExplainInput(m, RandomInput(64, 1), 2, ShapConfig{}, 1), Error);
}

TEST(ExplainTest, LogitMapsOfTrainedToyModelAreAnticorrelated) {
  Rng rng(12);
  auto make = [&](std::size_t count) {
    std::vector<train::Example> out;
    for (std::size_t i = 0; i < count; ++i) {
      autodiff::Tensor<float> x({1, 400});
      const double f = rng.Uniform(200.0, 800.0);
      for (std::size_t n = 0; n < 400; ++n) x[n] = static_cast<float>(0.5 * std::sin(2 * std::numbers::pi * f * n / 16000.0));
      train::Example e;
      e.label = i % 2;
      e.attack_id = e.label ? "click" : "-";
      if (e.label) x[50 + rng.Below(300)] += 1.5f;
      e.input = x;
      out.push_back(e);
    }
    return out;
  };
  const auto train_set = make(32), val_set = make(16);
  train::TrainConfig tc;
  tc.epochs = 40;
  tc.lr = 0.01;
  const auto r = train::Train(train_set, val_set, TinyRaw(), tc);
  const auto m = model::ModelFromCheckpoint(r.best);
  int negative = 0;
  for (std::size_t i = 0; i < val_set.size(); ++i) {
    const auto bona = ExplainInput(m, val_set[i].input, model::kBonafideClass, ShapConfig{}, i);
    const auto spoof = ExplainInput(m, val_set[i].input, model::kSpoofClass, ShapConfig{}, i);
    negative += ClassSymmetry(bona, spoof) < 0.0;
  }
  EXPECT_EQ(negative, static_cast<int>(val_set.size()));
}

TEST(ShapConfigTest, JsonRoundTripAndValidation) {
  ShapConfig c;
  c.n_samples = 7;
  c.target = Target::kProbability;
  c.prune_fraction = 0.01;
  const ShapConfig back = ShapConfig::FromJson(c.ToJson());
  EXPECT_EQ(back.n_samples, 7u);
  EXPECT_EQ(back.target, Target::kProbability);
  EXPECT_EQ(back.prune_fraction, 0.01);
  EXPECT_THROW(ShapConfig::FromJson({{"fraction", 0.0}}), Error);
  EXPECT_THROW(ShapConfig::FromJson({{"n_samples", 0}}), Error);
}

TEST(DumpTest, RoundTripWithSidecar) {
  const fs::path dir = fs::temp_directory_path() / "spoofshap_dump_test";
  fs::remove_all(dir);
  AttributionRecord r;
  r.utt_id = "SYN_E_0000001";
  r.model_checkpoint_hash = "0123456789abcdef";
  r.map.phi = {0.5, -0.25, 1.0, 0.0, 2.0, -3.0};
  r.map.shape = {1, 2, 3};
  r.map.phi0 = 0.125;
  r.map.class_index = 1;
  r.map.n_samples = 20;
  r.map.seed = 99;
  r.map.estimator = "gradient_shap";
  SaveAttribution(r, dir / "a.phi");
  const auto back = LoadAttribution(dir / "a.phi");
  EXPECT_EQ(back.utt_id, r.utt_id);
  EXPECT_EQ(back.model_checkpoint_hash, r.model_checkpoint_hash);
  EXPECT_EQ(back.map.phi, r.map.phi);
  EXPECT_EQ(back.map.shape, r.map.shape);
  EXPECT_EQ(back.map.phi0, 0.125);
  EXPECT_EQ(back.map.seed, 99u);
  const Json meta = ReadJson(dir / "a.phi.json");
  for (const char* key : {"utt_id", "class", "target", "phi0", "n_samples", "seed", "shape", "model_checkpoint_hash"}) {
    EXPECT_TRUE(meta.contains(key)) << key;
  }
  EXPECT_EQ(ReadFileBytes(dir / "a.phi").size(), 6u * 4u);
  WriteFileBytes(dir / "a.phi", "abcd");
  EXPECT_THROW(LoadAttribution(dir / "a.phi"), Error);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace spoofshap::shap
