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

#ifndef SPOOFSHAP_SHAP_EXPLAIN_HPP_
#define SPOOFSHAP_SHAP_EXPLAIN_HPP_

#include <string>
#include <vector>

#include "spoofshap/autodiff/graph.hpp"
#include "spoofshap/io.hpp"
#include "spoofshap/model/model.hpp"
#include "spoofshap/random.hpp"
#include "spoofshap/shap/attribution.hpp"
#include "spoofshap/shap/estimators.hpp"

namespace spoofshap::shap {

// One class output of a classifier, viewed as a function of its flattened
// input of fixed shape.
template <typename T>
class ModelTarget {
 public:
  ModelTarget(const model::Model<T>& m, std::size_t class_index, Target target, autodiff::Shape input_shape)
      : model_(m), class_index_(class_index), target_(target), shape_(std::move(input_shape)) {
    Require(class_index < 2, "class index must be 0 (bona fide) or 1 (spoof)");
    m.CheckAdmissible(autodiff::Tensor<T>(shape_));
  }

  double Value(const std::vector<double>& x) const {
    return static_cast<double>(autodiff::Evaluate(graph(), model_.params(), ToTensor(x))[class_index_]);
  }

  std::vector<double> Gradient(const std::vector<double>& x) const {
    const auto g = autodiff::ComputeGradients(graph(), model_.params(), ToTensor(x), class_index_, {false, true});
    return {g.input.data.begin(), g.input.data.end()};
  }

  const autodiff::Shape& shape() const { return shape_; }

 private:
  const autodiff::Graph& graph() const {
    return target_ == Target::kLogit ? model_.graph() : model_.probability_graph();
  }

  autodiff::Tensor<T> ToTensor(const std::vector<double>& x) const {
    Require(x.size() == autodiff::NumElements(shape_), "input size differs from the explained shape");
    return autodiff::Tensor<T>(shape_, std::vector<T>(x.begin(), x.end()));
  }

  const model::Model<T>& model_;
  std::size_t class_index_;
  Target target_;
  autodiff::Shape shape_;
};

struct ShapConfig {
  std::size_t n_samples = 20;
  Target target = Target::kLogit;
  double noise_std = 0.0;
  double prune_fraction = 0.002;

  void Validate() const {
    if (n_samples < 1) Fail(ErrorCode::kConfig, "shap.n_samples: must be >= 1");
    if (!(noise_std >= 0.0)) Fail(ErrorCode::kConfig, "shap.noise_std: must be >= 0");
    if (!(prune_fraction > 0.0 && prune_fraction <= 1.0)) Fail(ErrorCode::kConfig, "shap.fraction: must lie in (0, 1]");
  }

  Json ToJson() const {
    return {{"n_samples", n_samples}, {"target", ToString(target)}, {"noise_std", noise_std}, {"fraction", prune_fraction}};
  }

  static ShapConfig FromJson(const Json& j) {
    ShapConfig c;
    try {
      c.n_samples = j.value("n_samples", c.n_samples);
      c.target = TargetFromString(j.value("target", std::string("logit")));
      c.noise_std = j.value("noise_std", c.noise_std);
      c.prune_fraction = j.value("fraction", c.prune_fraction);
    } catch (const Json::exception& e) {
      Fail(ErrorCode::kConfig, std::string("shap: ") + e.what());
    }
    c.Validate();
    return c;
  }
};

// GradientSHAP of one class output against the all-zeros baseline, for the
// whole unpadded input.
template <typename T>
AttributionMap ExplainInput(const model::Model<T>& m, const autodiff::Tensor<T>& input, std::size_t class_index,
                            const ShapConfig& cfg, std::uint64_t seed) {
  const ModelTarget<T> f(m, class_index, cfg.target, input.shape);
  const std::vector<double> x(input.data.begin(), input.data.end());
  const std::vector<double> baseline(x.size(), 0.0);
  AttributionMap att = GradientShap(f, x, baseline, {cfg.n_samples, seed, cfg.noise_std});
  att.shape = input.shape;
  att.class_index = class_index;
  att.target = cfg.target;
  return att;
}

// Attribution seeds depend on the utterance only, so both classes share the
// same alpha draws (which makes probability-mode maps exact negatives).
inline std::uint64_t UtteranceSeed(std::uint64_t global_seed, const std::string& utt_id) {
  return DeriveSeed(global_seed, "explain", utt_id);
}

}  // namespace spoofshap::shap

#endif  // SPOOFSHAP_SHAP_EXPLAIN_HPP_
