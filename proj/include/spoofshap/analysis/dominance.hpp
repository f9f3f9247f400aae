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

#ifndef SPOOFSHAP_ANALYSIS_DOMINANCE_HPP_
#define SPOOFSHAP_ANALYSIS_DOMINANCE_HPP_

#include <cmath>
#include <vector>

#include "spoofshap/analysis/prune.hpp"
#include "spoofshap/error.hpp"
#include "spoofshap/random.hpp"
#include "spoofshap/shap/estimators.hpp"

namespace spoofshap::analysis {

struct DominanceResult {
  double delta_top = 0.0;
  std::vector<double> delta_random;
};

// k distinct indices from [0, n), drawn by a partial Fisher-Yates shuffle.
inline std::vector<std::size_t> RandomSubset(std::size_t n, std::size_t k, Rng& rng) {
  Require(k <= n, "subset larger than population");
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.Below(n - i)]);
  pool.resize(k);
  return pool;
}

// Output change when the given features are set to the zero baseline.
template <shap::ScalarFunction F>
double ZeroingEffect(const F& f, const std::vector<double>& x, double fx, const std::vector<std::size_t>& features) {
  std::vector<double> masked = x;
  for (std::size_t i : features) masked[i] = 0.0;
  return std::abs(fx - f.Value(masked));
}

template <shap::ScalarFunction F>
DominanceResult DominanceTest(const F& f, const std::vector<double>& x, const PruneMask& mask, std::size_t trials,
                              std::uint64_t seed) {
  Require(mask.num_features == x.size(), "prune mask was built for a different input");
  const double fx = f.Value(x);
  DominanceResult r;
  r.delta_top = ZeroingEffect(f, x, fx, mask.selected);
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    r.delta_random.push_back(ZeroingEffect(f, x, fx, RandomSubset(x.size(), mask.selected.size(), rng)));
  }
  return r;
}

}  // namespace spoofshap::analysis

#endif  // SPOOFSHAP_ANALYSIS_DOMINANCE_HPP_
