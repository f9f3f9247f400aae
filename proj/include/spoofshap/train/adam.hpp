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

#ifndef SPOOFSHAP_TRAIN_ADAM_HPP_
#define SPOOFSHAP_TRAIN_ADAM_HPP_

#include <cmath>
#include <string>
#include <vector>

#include "spoofshap/autodiff/tensor.hpp"
#include "spoofshap/error.hpp"

namespace spoofshap::train {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  long step = 0;
};

// lr * decay^epoch, epochs counted from 0.
inline double LearningRate(double base_lr, double decay, int epoch) {
  return base_lr * std::pow(decay, epoch);
}

// One bias-corrected Adam update. Moments are kept in double precision
// whatever the parameter type.
template <typename T>
void AdamStep(autodiff::ParamSet<T>& params, const autodiff::ParamSet<T>& grads, AdamState& state,
              double lr, const AdamOptions& opt = {}) {
  Require(params.size() == grads.size(), "Adam: parameter and gradient sets differ in size");
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.size(), 0.0);
      state.v.emplace_back(p.size(), 0.0);
    }
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    Require(params[k].shape == grads[k].shape && state.m[k].size() == params[k].size(),
            "Adam: shape mismatch at parameter " + std::to_string(k));
    for (std::size_t j = 0; j < grads[k].size(); ++j) {
      if (!std::isfinite(static_cast<double>(grads[k][j]))) {
        Fail(ErrorCode::kNumerical, "non-finite gradient at parameter " + std::to_string(k) + "[" +
                                        std::to_string(j) + "]");
      }
    }
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& m = state.m[k];
    auto& v = state.v[k];
    for (std::size_t j = 0; j < params[k].size(); ++j) {
      const double g = grads[k][j];
      m[j] = opt.beta1 * m[j] + (1.0 - opt.beta1) * g;
      v[j] = opt.beta2 * v[j] + (1.0 - opt.beta2) * g * g;
      const double step = lr * (m[j] / c1) / (std::sqrt(v[j] / c2) + opt.eps);
      params[k][j] = static_cast<T>(params[k][j] - step);
    }
  }
}

}  // namespace spoofshap::train

#endif  // SPOOFSHAP_TRAIN_ADAM_HPP_
