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

#ifndef SPOOFSHAP_MODEL_MODEL_HPP_
#define SPOOFSHAP_MODEL_MODEL_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spoofshap/autodiff/graph.hpp"
#include "spoofshap/autodiff/tensor.hpp"
#include "spoofshap/corpus/wav.hpp"
#include "spoofshap/dsp/spectrogram.hpp"
#include "spoofshap/error.hpp"
#include "spoofshap/io.hpp"
#include "spoofshap/random.hpp"

namespace spoofshap::model {

using autodiff::Graph;
using autodiff::ParamSet;
using autodiff::Shape;
using autodiff::Tensor;

inline constexpr std::size_t kBonafideClass = 0;
inline constexpr std::size_t kSpoofClass = 1;

enum class ModelKind { kRaw1d, kSpec2d };

inline const char* ToString(ModelKind k) { return k == ModelKind::kRaw1d ? "raw1d" : "spec2d"; }

inline ModelKind ModelKindFromString(const std::string& s) {
  if (s == "raw1d") return ModelKind::kRaw1d;
  if (s == "spec2d") return ModelKind::kSpec2d;
  Fail(ErrorCode::kInvalidArgument, "unknown model kind: " + s);
}

struct ConvSpec {
  std::size_t channels = 16;
  std::size_t kernel = 3;
  std::size_t stride = 1;
};

struct BlockSpec {
  std::size_t in_channels = 16;
  std::size_t out_channels = 16;
  std::size_t kernel = 3;
  std::size_t stride = 1;
};

struct ModelConfig {
  ModelKind kind = ModelKind::kRaw1d;
  ConvSpec stem;
  std::vector<BlockSpec> blocks;
  std::array<std::size_t, 3> fc = {32, 16, 2};

  static ModelConfig DefaultRaw1d() {
    ModelConfig c;
    c.kind = ModelKind::kRaw1d;
    c.stem = {16, 7, 2};
    c.blocks = {{16, 16, 3, 1}, {16, 32, 3, 2}};
    c.fc = {32, 16, 2};
    return c;
  }

  static ModelConfig DefaultSpec2d() {
    ModelConfig c;
    c.kind = ModelKind::kSpec2d;
    c.stem = {8, 3, 2};
    c.blocks = {{8, 16, 3, 2}, {16, 32, 3, 2}, {32, 32, 3, 2}};
    c.fc = {32, 16, 2};
    return c;
  }

  void Validate() const {
    Require(fc[2] == 2, "model.fc must end in 2 outputs");
    Require(fc[0] >= 1 && fc[1] >= 1, "model.fc widths must be positive");
    Require(stem.channels >= 1 && stem.kernel >= 1 && stem.stride >= 1,
            "model.stem needs positive channels, kernel and stride");
    std::size_t channels = stem.channels;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const auto& b = blocks[i];
      if (b.in_channels != channels) {
        Fail(ErrorCode::kInvalidArgument, "inconsistent channel chain at block " + std::to_string(i) +
                                              ": expected " + std::to_string(channels) +
                                              " input channels, got " + std::to_string(b.in_channels));
      }
      Require(b.out_channels >= 1 && b.kernel >= 1 && b.stride >= 1,
              "model.blocks[" + std::to_string(i) + "] needs positive channels, kernel and stride");
      channels = b.out_channels;
    }
  }

  std::size_t final_channels() const { return blocks.empty() ? stem.channels : blocks.back().out_channels; }

  Json ToJson() const {
    Json j;
    j["kind"] = ToString(kind);
    j["stem"] = {{"channels", stem.channels}, {"kernel", stem.kernel}, {"stride", stem.stride}};
    j["blocks"] = Json::array();
    for (const auto& b : blocks) {
      j["blocks"].push_back({{"in_channels", b.in_channels},
                             {"out_channels", b.out_channels},
                             {"kernel", b.kernel},
                             {"stride", b.stride}});
    }
    j["fc"] = fc;
    return j;
  }

  static ModelConfig FromJson(const Json& j) {
    ModelConfig c;
    try {
      c.kind = ModelKindFromString(j.at("kind").get<std::string>());
      const auto& s = j.at("stem");
      c.stem = {s.at("channels").get<std::size_t>(), s.at("kernel").get<std::size_t>(),
                s.at("stride").get<std::size_t>()};
      for (const auto& b : j.at("blocks")) {
        c.blocks.push_back({b.at("in_channels").get<std::size_t>(), b.at("out_channels").get<std::size_t>(),
                            b.at("kernel").get<std::size_t>(), b.at("stride").get<std::size_t>()});
      }
      const auto fc = j.at("fc");
      if (!fc.is_array() || fc.size() != 3) Fail(ErrorCode::kInvalidArgument, "model.fc must have exactly 3 layers");
      for (std::size_t i = 0; i < 3; ++i) c.fc[i] = fc[i].get<std::size_t>();
    } catch (const Json::exception& e) {
      Fail(ErrorCode::kConfig, std::string("invalid model config: ") + e.what());
    }
    c.Validate();
    return c;
  }
};

// stem conv -> relu -> residual blocks -> global max pool -> affine-relu x2 ->
// affine(2). A block is conv-relu-conv plus a skip (identity, or a 1x1
// strided conv when channels or stride change), followed by relu.
inline Graph BuildGraph(const ModelConfig& cfg) {
  cfg.Validate();
  const bool one_d = cfg.kind == ModelKind::kRaw1d;
  Graph g;
  auto conv = [&](int x, std::size_t ci, std::size_t co, std::size_t k, std::size_t s,
                  const std::string& name) {
    return one_d ? g.Conv1d(x, ci, co, k, s, name) : g.Conv2d(x, ci, co, k, s, name);
  };
  int x = g.Input();
  x = conv(x, 1, cfg.stem.channels, cfg.stem.kernel, cfg.stem.stride, "stem");
  x = g.Relu(x, "stem.relu");
  for (std::size_t i = 0; i < cfg.blocks.size(); ++i) {
    const auto& b = cfg.blocks[i];
    const std::string p = "block" + std::to_string(i);
    int h = conv(x, b.in_channels, b.out_channels, b.kernel, b.stride, p + ".conv1");
    h = g.Relu(h, p + ".relu1");
    h = conv(h, b.out_channels, b.out_channels, b.kernel, 1, p + ".conv2");
    int skip = x;
    if (b.in_channels != b.out_channels || b.stride != 1) {
      skip = conv(x, b.in_channels, b.out_channels, 1, b.stride, p + ".skip");
    }
    x = g.Add(h, skip, p + ".add");
    x = g.Relu(x, p + ".relu2");
  }
  x = g.GlobalMaxPool(x, "pool");
  x = g.Affine(x, cfg.final_channels(), cfg.fc[0], "fc0");
  x = g.Relu(x, "fc0.relu");
  x = g.Affine(x, cfg.fc[0], cfg.fc[1], "fc1");
  x = g.Relu(x, "fc1.relu");
  g.Affine(x, cfg.fc[1], cfg.fc[2], "fc2");
  return g;
}

inline Graph WithSoftmax(Graph g) {
  g.Softmax(g.output(), "softmax");
  return g;
}

enum class Init { kGlorotUniform, kZeros };

// Input tensors: waveform -> [1, L]; spectrogram -> [1, M, N].
template <typename T>
Tensor<T> ToInput(const corpus::Waveform& w) {
  return Tensor<T>({1, w.samples.size()}, std::vector<T>(w.samples.begin(), w.samples.end()));
}

template <typename T>
Tensor<T> ToInput(const dsp::Spectrogram& s) {
  return Tensor<T>({1, s.num_bins, s.num_frames}, std::vector<T>(s.values.begin(), s.values.end()));
}

template <typename T>
class Model {
 public:
  Model(ModelConfig config, ParamSet<T> params)
      : config_(std::move(config)),
        graph_(BuildGraph(config_)),
        probability_graph_(WithSoftmax(graph_)),
        params_(std::move(params)) {
    autodiff::CheckParams(graph_, params_);
  }

  const ModelConfig& config() const { return config_; }
  ModelKind kind() const { return config_.kind; }
  const Graph& graph() const { return graph_; }
  const Graph& probability_graph() const { return probability_graph_; }
  const ParamSet<T>& params() const { return params_; }
  ParamSet<T>& mutable_params() { return params_; }
  std::size_t NumParameters() const { return graph_.NumParameters(); }

  // Smallest admissible extent along the variable axis (samples for raw1d,
  // frames for spec2d with `num_bins` rows).
  std::size_t MinInputExtent(std::size_t num_bins = dsp::kNumBins) const {
    if (config_.kind == ModelKind::kRaw1d) return graph_.MinimumExtent({1, 1}, 1);
    return graph_.MinimumExtent({1, num_bins, 1}, 2);
  }

  // Shortest waveform the model accepts once the frontend is applied.
  std::size_t MinWaveformSamples() const {
    if (config_.kind == ModelKind::kRaw1d) return MinInputExtent();
    return dsp::kWindowLength + (MinInputExtent() - 1) * dsp::kHopLength;
  }

  void CheckAdmissible(const Tensor<T>& input) const {
    const std::size_t want_rank = config_.kind == ModelKind::kRaw1d ? 2 : 3;
    if (input.rank() != want_rank || input.dim(0) != 1) {
      Fail(ErrorCode::kInvalidArgument, std::string(ToString(config_.kind)) + " model expects input of rank " +
                                            std::to_string(want_rank) + " with one channel, got " +
                                            autodiff::ShapeString(input.shape));
    }
    const std::size_t extent = input.shape.back();
    const std::size_t need = config_.kind == ModelKind::kRaw1d ? MinInputExtent() : MinInputExtent(input.dim(1));
    if (extent < need) {
      Fail(ErrorCode::kInvalidArgument,
           "input too short: " + std::to_string(extent) + (config_.kind == ModelKind::kRaw1d ? " samples" : " frames") +
               ", model requires at least " + std::to_string(need));
    }
  }

  // Logits (score_bona, score_spoof).
  Tensor<T> ForwardScores(const Tensor<T>& input) const {
    CheckAdmissible(input);
    return autodiff::Evaluate(graph_, params_, input);
  }

  template <typename U>
  Model<U> Cast() const {
    return Model<U>(config_, autodiff::CastParams<U>(params_));
  }

 private:
  ModelConfig config_;
  Graph graph_;
  Graph probability_graph_;
  ParamSet<T> params_;
};

template <typename T = float>
Model<T> BuildModel(const ModelConfig& cfg, std::uint64_t seed, Init init = Init::kGlorotUniform) {
  const Graph g = BuildGraph(cfg);
  ParamSet<T> params;
  Rng rng(seed);
  for (const auto& spec : g.params()) {
    Tensor<T> p(spec.shape);
    if (init == Init::kGlorotUniform && !spec.is_bias) {
      const double limit = std::sqrt(6.0 / static_cast<double>(spec.fan_in + spec.fan_out));
      for (auto& v : p.data) v = static_cast<T>(rng.Uniform(-limit, limit));
    }
    params.push_back(std::move(p));
  }
  return Model<T>(cfg, std::move(params));
}

// Converts an utterance into the model's input representation.
template <typename T>
Tensor<T> PrepareInput(ModelKind kind, const corpus::Waveform& w) {
  if (kind == ModelKind::kRaw1d) return ToInput<T>(w);
  return ToInput<T>(dsp::MagnitudeSpectrogram(w));
}

}  // namespace spoofshap::model

#endif  // SPOOFSHAP_MODEL_MODEL_HPP_
