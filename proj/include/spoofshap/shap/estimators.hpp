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

#ifndef SPOOFSHAP_SHAP_ESTIMATORS_HPP_
#define SPOOFSHAP_SHAP_ESTIMATORS_HPP_

#include <bit>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <string>
#include <vector>

#include "spoofshap/error.hpp"
#include "spoofshap/random.hpp"
#include "spoofshap/shap/attribution.hpp"

namespace spoofshap::shap {

inline constexpr std::size_t kMaxExactFeatures = 20;

// A function explained by the estimators: f.Value(x) -> double, plus
// f.Gradient(x) -> std::vector<double> for the gradient estimator.
template <typename F>
concept ScalarFunction = requires(const F& f, const std::vector<double>& x) {
  { f.Value(x) } -> std::convertible_to<double>;
};

template <typename F>
concept DifferentiableFunction = ScalarFunction<F> && requires(const F& f, const std::vector<double>& x) {
  { f.Gradient(x) } -> std::convertible_to<std::vector<double>>;
};

// Classical Shapley values by enumerating all 2^D coalitions; an absent
// feature takes its baseline value.
template <ScalarFunction F>
AttributionMap ExactShapley(const F& f, const std::vector<double>& x, const std::vector<double>& baseline) {
  const std::size_t d = x.size();
  Require(baseline.size() == d, "baseline shape differs from input shape");
  if (d > kMaxExactFeatures) {
    Fail(ErrorCode::kInvalidArgument, "exact Shapley is limited to D <= " + std::to_string(kMaxExactFeatures) +
                                          " features (got " + std::to_string(d) + ")");
  }
  const std::size_t coalitions = std::size_t{1} << d;
  std::vector<double> value(coalitions);
  std::vector<double> point(d);
  for (std::size_t s = 0; s < coalitions; ++s) {
    for (std::size_t n = 0; n < d; ++n) point[n] = (s >> n) & 1 ? x[n] : baseline[n];
    value[s] = f.Value(point);
  }
  // weight(|S|) = |S|! (D - |S| - 1)! / D! = 1 / (D * C(D - 1, |S|)).
  std::vector<double> weight(d == 0 ? 1 : d);
  double binom = 1.0;
  for (std::size_t k = 0; k < d; ++k) {
    weight[k] = 1.0 / (static_cast<double>(d) * binom);
    binom = binom * static_cast<double>(d - 1 - k) / static_cast<double>(k + 1);
  }
  AttributionMap att;
  att.phi.assign(d, 0.0);
  att.shape = {d};
  att.phi0 = value[0];
  att.estimator = "exact_shapley";
  for (std::size_t s = 0; s < coalitions; ++s) {
    const std::size_t size = static_cast<std::size_t>(std::popcount(s));
    for (std::size_t n = 0; n < d; ++n) {
      if ((s >> n) & 1) continue;
      att.phi[n] += weight[size] * (value[s | (std::size_t{1} << n)] - value[s]);
    }
  }
  return att;
}

struct GradientShapOptions {
  std::size_t n_samples = 20;
  std::uint64_t seed = 0;
  double noise_std = 0.0;
};

// Expected-gradients estimate: for each draw, alpha ~ U(0, 1) and the
// gradient is taken at baseline + alpha * (x + noise - baseline); phi is
// (x - baseline) times the mean gradient and phi0 = f(baseline).
template <DifferentiableFunction F>
AttributionMap GradientShap(const F& f, const std::vector<double>& x, const std::vector<double>& baseline,
                            const GradientShapOptions& opt) {
  const std::size_t d = x.size();
  Require(baseline.size() == d, "baseline shape differs from input shape");
  Require(opt.n_samples >= 1, "n_samples must be at least 1");
  Require(opt.noise_std >= 0.0, "noise_std must be non-negative");
  Rng rng(opt.seed);
  std::vector<double> mean_grad(d, 0.0);
  std::vector<double> point(d);
  for (std::size_t s = 0; s < opt.n_samples; ++s) {
    const double alpha = rng.Uniform();
    for (std::size_t n = 0; n < d; ++n) {
      const double noisy = opt.noise_std > 0.0 ? x[n] + rng.Normal(0.0, opt.noise_std) : x[n];
      point[n] = baseline[n] + alpha * (noisy - baseline[n]);
    }
    const std::vector<double> g = f.Gradient(point);
    Require(g.size() == d, "gradient size differs from input size");
    for (std::size_t n = 0; n < d; ++n) {
      if (!std::isfinite(g[n])) Fail(ErrorCode::kNumerical, "model gradient is not finite");
      mean_grad[n] += g[n];
    }
  }
  AttributionMap att;
  att.phi.resize(d);
  att.shape = {d};
  const double inv = 1.0 / static_cast<double>(opt.n_samples);
  for (std::size_t n = 0; n < d; ++n) att.phi[n] = (x[n] - baseline[n]) * (mean_grad[n] * inv);
  att.phi0 = f.Value(baseline);
  att.estimator = "gradient_shap";
  att.n_samples = opt.n_samples;
  att.seed = opt.seed;
  return att;
}

}  // namespace spoofshap::shap

#endif  // SPOOFSHAP_SHAP_ESTIMATORS_HPP_
