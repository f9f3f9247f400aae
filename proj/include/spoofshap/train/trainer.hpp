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

#ifndef SPOOFSHAP_TRAIN_TRAINER_HPP_
#define SPOOFSHAP_TRAIN_TRAINER_HPP_

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spoofshap/autodiff/graph.hpp"
#include "spoofshap/autodiff/loss.hpp"
#include "spoofshap/corpus/manifest.hpp"
#include "spoofshap/corpus/wav.hpp"
#include "spoofshap/error.hpp"
#include "spoofshap/io.hpp"
#include "spoofshap/model/checkpoint.hpp"
#include "spoofshap/model/model.hpp"
#include "spoofshap/random.hpp"
#include "spoofshap/train/adam.hpp"
#include "spoofshap/train/batching.hpp"
#include "spoofshap/train/eer.hpp"

namespace spoofshap::train {

using autodiff::Tensor;
using model::Model;
using model::ModelConfig;

struct TrainConfig {
  double lr = 0.001;
  double lr_decay = 0.95;
  AdamOptions adam;
  int epochs = 30;
  std::size_t batch_size = 8;
  std::optional<std::array<double, 2>> class_weights;  // unset means auto
  std::uint64_t seed = 0;
  // Stop after this many epochs without a validation improvement (0 = off).
  int patience = 0;
  // Stop at the first epoch with validation EER 0.
  bool stop_when_perfect = false;

  void Validate() const {
    if (!(lr > 0.0)) Fail(ErrorCode::kConfig, "train.lr: must be > 0");
    if (!(lr_decay > 0.0 && lr_decay <= 1.0)) Fail(ErrorCode::kConfig, "train.lr_decay: must lie in (0, 1]");
    if (epochs < 1) Fail(ErrorCode::kConfig, "train.epochs: must be >= 1");
    if (batch_size < 1) Fail(ErrorCode::kConfig, "train.batch_size: must be >= 1");
    if (patience < 0) Fail(ErrorCode::kConfig, "train.patience: must be >= 0");
    if (class_weights && !((*class_weights)[0] > 0.0 && (*class_weights)[1] > 0.0)) {
      Fail(ErrorCode::kConfig, "train.class_weights: weights must be positive");
    }
  }

  Json ToJson() const {
    Json j;
    j["lr"] = lr;
    j["lr_decay"] = lr_decay;
    j["adam_betas"] = {adam.beta1, adam.beta2};
    j["adam_eps"] = adam.eps;
    j["epochs"] = epochs;
    j["batch_size"] = batch_size;
    if (class_weights) {
      j["class_weights"] = *class_weights;
    } else {
      j["class_weights"] = "auto";
    }
    j["seed"] = seed;
    j["patience"] = patience;
    j["stop_when_perfect"] = stop_when_perfect;
    return j;
  }

  static TrainConfig FromJson(const Json& j) {
    TrainConfig c;
    try {
      c.lr = j.value("lr", c.lr);
      c.lr_decay = j.value("lr_decay", c.lr_decay);
      if (j.contains("adam_betas")) {
        c.adam.beta1 = j["adam_betas"].at(0).get<double>();
        c.adam.beta2 = j["adam_betas"].at(1).get<double>();
      }
      c.adam.eps = j.value("adam_eps", c.adam.eps);
      c.epochs = j.value("epochs", c.epochs);
      c.batch_size = j.value("batch_size", c.batch_size);
      if (j.contains("class_weights") && !(j["class_weights"].is_string() && j["class_weights"] == "auto")) {
        const auto& w = j["class_weights"];
        if (!w.is_array() || w.size() != 2) Fail(ErrorCode::kConfig, "train.class_weights: expected \"auto\" or [w_bona, w_spoof]");
        c.class_weights = std::array<double, 2>{w[0].get<double>(), w[1].get<double>()};
      }
      c.seed = j.value("seed", c.seed);
      c.patience = j.value("patience", c.patience);
      c.stop_when_perfect = j.value("stop_when_perfect", c.stop_when_perfect);
    } catch (const Json::exception& e) {
      Fail(ErrorCode::kConfig, std::string("train: ") + e.what());
    }
    c.Validate();
    return c;
  }
};

// One utterance prepared for the model: label 0 = bona fide, 1 = spoof.
struct Example {
  std::string utt_id;
  std::string attack_id;
  std::size_t label = 0;
  Tensor<float> input;

  std::size_t extent() const { return input.shape.back(); }
};

inline Example MakeExample(const corpus::UtteranceRecord& r, model::ModelKind kind) {
  return {r.utt_id, r.attack_id, r.is_bonafide() ? model::kBonafideClass : model::kSpoofClass,
          model::PrepareInput<float>(kind, corpus::LoadWav(r.audio_ref))};
}

inline std::vector<Example> LoadExamples(const corpus::CorpusManifest& manifest, model::ModelKind kind) {
  std::vector<Example> out;
  out.reserve(manifest.records.size());
  for (const auto& r : manifest.records) out.push_back(MakeExample(r, kind));
  return out;
}

// Inverse class frequency, normalised so the two weights average to 1.
inline std::array<double, 2> AutoClassWeights(std::size_t num_bona, std::size_t num_spoof) {
  Require(num_bona > 0 && num_spoof > 0, "class weights need both classes present");
  const double inv_b = 1.0 / static_cast<double>(num_bona);
  const double inv_s = 1.0 / static_cast<double>(num_spoof);
  const double mean = 0.5 * (inv_b + inv_s);
  return {inv_b / mean, inv_s / mean};
}

// Zero-pads the variable (last) axis at the tail.
inline Tensor<float> PadTail(const Tensor<float>& x, std::size_t length) {
  const std::size_t extent = x.shape.back();
  Require(length >= extent, "padded length shorter than input");
  if (length == extent) return x;
  autodiff::Shape shape = x.shape;
  shape.back() = length;
  Tensor<float> out(shape);
  const std::size_t rows = x.size() / extent;
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy(x.data.begin() + r * extent, x.data.begin() + (r + 1) * extent, out.data.begin() + r * length);
  }
  return out;
}

// Detection score: bona fide logit minus spoof logit (higher = more bona fide).
inline double DetectionScore(const Tensor<float>& logits) {
  return static_cast<double>(logits[model::kBonafideClass]) - static_cast<double>(logits[model::kSpoofClass]);
}

inline std::vector<double> ScoreExamples(const Model<float>& m, const std::vector<Example>& examples) {
  std::vector<double> scores;
  scores.reserve(examples.size());
  for (const auto& e : examples) scores.push_back(DetectionScore(m.ForwardScores(e.input)));
  return scores;
}

inline double EvaluateEer(const Model<float>& m, const std::vector<Example>& examples) {
  const auto scores = ScoreExamples(m, examples);
  std::vector<double> bona, spoof;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    (examples[i].label == model::kBonafideClass ? bona : spoof).push_back(scores[i]);
  }
  return ComputeEer(bona, spoof);
}

// Unweighted mean cross-entropy over a labelled set.
inline double EvaluateLoss(const Model<float>& m, const std::vector<Example>& examples) {
  double sum = 0.0;
  for (const auto& e : examples) {
    sum += autodiff::WeightedCrossEntropy(m.ForwardScores(e.input), e.label, {1.0, 1.0}).loss;
  }
  return sum / static_cast<double>(examples.size());
}

struct EpochLog {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double val_eer = 0.0;
  double val_loss = 0.0;

  Json ToJson() const {
    return {{"epoch", epoch}, {"lr", lr}, {"train_loss", train_loss}, {"val_eer", val_eer}, {"val_loss", val_loss}};
  }
};

// Checkpoint selection order: lower validation EER, then lower validation loss.
inline bool Improves(const EpochLog& candidate, double best_eer, double best_loss) {
  return candidate.val_eer < best_eer || (candidate.val_eer == best_eer && candidate.val_loss < best_loss);
}

struct TrainResult {
  model::Checkpoint best;
  std::vector<EpochLog> log;
  std::array<double, 2> class_weights{};
  // Utterances per attack id ("-" for bona fide) seen during training.
  std::map<std::string, std::size_t> train_counts;
};

inline std::map<std::string, std::size_t> CountByAttack(const std::vector<Example>& examples) {
  std::map<std::string, std::size_t> counts;
  for (const auto& e : examples) ++counts[e.attack_id];
  return counts;
}

inline void CheckTrainable(const std::vector<Example>& examples, const Model<float>& m, const std::string& what) {
  std::size_t bona = 0;
  for (const auto& e : examples) {
    bona += e.label == model::kBonafideClass;
    m.CheckAdmissible(e.input);
  }
  if (bona == 0 || bona == examples.size()) {
    Fail(ErrorCode::kInvalidArgument, what + " set must contain both bona fide and spoof utterances");
  }
}

inline TrainResult Train(const std::vector<Example>& train_set, const std::vector<Example>& val_set,
                         const ModelConfig& model_config, const TrainConfig& cfg,
                         const std::function<void(const EpochLog&)>& on_epoch = {}) {
  cfg.Validate();
  Model<float> net = model::BuildModel<float>(model_config, DeriveSeed(cfg.seed, "init", ""));
  CheckTrainable(train_set, net, "training");
  CheckTrainable(val_set, net, "validation");

  TrainResult result;
  result.train_counts = CountByAttack(train_set);
  std::size_t num_bona = 0;
  std::vector<std::size_t> lengths;
  for (const auto& e : train_set) {
    num_bona += e.label == model::kBonafideClass;
    lengths.push_back(e.extent());
  }
  result.class_weights = cfg.class_weights ? *cfg.class_weights : AutoClassWeights(num_bona, train_set.size() - num_bona);

  const BatchPlan plan = PlanBatches(lengths, cfg.batch_size);
  Rng order_rng(DeriveSeed(cfg.seed, "batch_order", ""));
  AdamState adam;
  const autodiff::Graph& graph = net.graph();
  autodiff::Gradients<float> grads;
  double best_eer = 2.0;
  double best_loss = std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = LearningRate(cfg.lr, cfg.lr_decay, epoch);
    double loss_sum = 0.0;
    for (std::size_t b : EpochOrder(plan, order_rng)) {
      const Batch& batch = plan.batches[b];
      grads.params = autodiff::ZeroParamGrads<float>(graph);
      const float scale = 1.0f / static_cast<float>(batch.items.size());
      for (std::size_t i : batch.items) {
        const Example& e = train_set[i];
        const auto act = autodiff::Forward(graph, net.params(), PadTail(e.input, batch.padded_length));
        auto lg = autodiff::WeightedCrossEntropy(act.output(), e.label, result.class_weights);
        if (!std::isfinite(static_cast<double>(lg.loss))) {
          Fail(ErrorCode::kNumerical, "training diverged at epoch " + std::to_string(epoch) + " (loss not finite)");
        }
        loss_sum += lg.loss;
        for (auto& d : lg.dlogits.data) d *= scale;
        autodiff::BackwardInto(graph, net.params(), act, lg.dlogits, &grads, {true, false});
      }
      AdamStep(net.mutable_params(), grads.params, adam, lr, cfg.adam);
    }
    EpochLog entry{epoch, lr, loss_sum / static_cast<double>(train_set.size()), EvaluateEer(net, val_set),
                   EvaluateLoss(net, val_set)};
    if (!std::isfinite(entry.train_loss)) {
      Fail(ErrorCode::kNumerical, "training diverged at epoch " + std::to_string(epoch));
    }
    result.log.push_back(entry);
    if (on_epoch) on_epoch(entry);
    if (Improves(entry, best_eer, best_loss)) {
      best_eer = entry.val_eer;
      best_loss = entry.val_loss;
      since_best = 0;
      model::TrainingMetadata meta{cfg.seed, epoch, entry.val_eer, Json::object()};
      meta.extra["val_loss"] = entry.val_loss;
      meta.extra["class_weights"] = result.class_weights;
      meta.extra["train_counts"] = result.train_counts;
      result.best = model::MakeCheckpoint(net, meta);
    } else {
      ++since_best;
    }
    if (cfg.stop_when_perfect && best_eer == 0.0) break;
    if (cfg.patience > 0 && since_best >= cfg.patience) break;
  }
  return result;
}

}  // namespace spoofshap::train

#endif  // SPOOFSHAP_TRAIN_TRAINER_HPP_
