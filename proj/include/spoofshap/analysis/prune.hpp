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

#ifndef SPOOFSHAP_ANALYSIS_PRUNE_HPP_
#define SPOOFSHAP_ANALYSIS_PRUNE_HPP_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "spoofshap/error.hpp"

namespace spoofshap::analysis {

struct PruneMask {
  std::vector<std::size_t> selected;  // ascending feature indices
  std::size_t num_features = 0;
  double fraction = 0.0;
  double threshold = 0.0;  // smallest selected value
  bool all_zero = false;   // attribution had no positive value

  std::vector<bool> Dense() const {
    std::vector<bool> d(num_features, false);
    for (std::size_t i : selected) d[i] = true;
    return d;
  }
};

inline std::size_t PruneCount(std::size_t num_features, double fraction) {
  const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(num_features)));
  return std::clamp<std::size_t>(k, 1, num_features);
}

// Keeps the k = max(1, round(fraction * D)) largest values; equal values go
// to the lower index first.
inline PruneMask PruneTopFraction(const std::vector<double>& phi, double fraction) {
  Require(fraction > 0.0 && fraction <= 1.0, "prune fraction must lie in (0, 1]");
  Require(!phi.empty(), "cannot prune an empty attribution");
  const std::size_t k = PruneCount(phi.size(), fraction);
  std::vector<std::size_t> order(phi.size());
  std::iota(order.begin(), order.end(), 0);
  auto before = [&](std::size_t a, std::size_t b) { return phi[a] > phi[b] || (phi[a] == phi[b] && a < b); };
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1), order.end(), before);
  PruneMask mask;
  mask.selected.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  mask.threshold = phi[order[k - 1]];
  std::sort(mask.selected.begin(), mask.selected.end());
  mask.num_features = phi.size();
  mask.fraction = fraction;
  mask.all_zero = std::none_of(phi.begin(), phi.end(), [](double v) { return v > 0.0; });
  return mask;
}

}  // namespace spoofshap::analysis

#endif  // SPOOFSHAP_ANALYSIS_PRUNE_HPP_
