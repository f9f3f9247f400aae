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

#ifndef SPOOFSHAP_AUTODIFF_LOSS_HPP_
#define SPOOFSHAP_AUTODIFF_LOSS_HPP_

#include <array>
#include <cmath>
#include <cstddef>

#include "spoofshap/autodiff/tensor.hpp"
#include "spoofshap/error.hpp"

namespace spoofshap::autodiff {

template <typename T>
struct LossAndGrad {
  T loss = 0;
  Tensor<T> dlogits;
};

// loss = -weight[label] * log softmax(logits)[label]; the adjoint is
// weight[label] * (softmax(logits) - onehot(label)).
template <typename T>
LossAndGrad<T> WeightedCrossEntropy(const Tensor<T>& logits, std::size_t label,
                                    const std::array<double, 2>& weights) {
  Require(logits.rank() == 1 && logits.size() == 2, "weighted cross-entropy expects 2 logits");
  Require(label < 2, "label out of range");
  Require(weights[0] > 0.0 && weights[1] > 0.0, "class weights must be positive");
  for (T z : logits.data) {
    if (!std::isfinite(static_cast<double>(z))) Fail(ErrorCode::kNumerical, "non-finite logits");
  }
  const T peak = std::max(logits[0], logits[1]);
  const T e0 = std::exp(logits[0] - peak);
  const T e1 = std::exp(logits[1] - peak);
  const T total = e0 + e1;
  const T log_total = std::log(total) + peak;
  const T w = static_cast<T>(weights[label]);
  LossAndGrad<T> out;
  out.loss = w * (log_total - logits[label]);
  out.dlogits = Tensor<T>({2});
  out.dlogits[0] = w * (e0 / total - (label == 0 ? T(1) : T(0)));
  out.dlogits[1] = w * (e1 / total - (label == 1 ? T(1) : T(0)));
  return out;
}

}  // namespace spoofshap::autodiff

#endif  // SPOOFSHAP_AUTODIFF_LOSS_HPP_
