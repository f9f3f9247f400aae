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

#ifndef SPOOFSHAP_TRAIN_EER_HPP_
#define SPOOFSHAP_TRAIN_EER_HPP_

#include <algorithm>
#include <vector>

#include "spoofshap/error.hpp"

namespace spoofshap::train {

struct ErrorRates {
  double threshold = 0.0;
  double far = 0.0;  // fraction of spoof scores >= threshold
  double frr = 0.0;  // fraction of bona fide scores < threshold
};

// Operating points at every candidate threshold, ascending: one below all
// scores, the midpoint of each adjacent distinct pair, one above all scores.
inline std::vector<ErrorRates> ErrorRateCurve(std::vector<double> bona, std::vector<double> spoof) {
  Require(!bona.empty() && !spoof.empty(), "EER needs non-empty bona fide and spoof score lists");
  std::sort(bona.begin(), bona.end());
  std::sort(spoof.begin(), spoof.end());
  std::vector<double> all(bona);
  all.insert(all.end(), spoof.begin(), spoof.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  std::vector<double> thresholds = {all.front() - 1.0};
  for (std::size_t i = 0; i + 1 < all.size(); ++i) thresholds.push_back(0.5 * (all[i] + all[i + 1]));
  thresholds.push_back(all.back() + 1.0);

  std::vector<ErrorRates> curve;
  curve.reserve(thresholds.size());
  std::size_t bona_below = 0, spoof_below = 0;
  for (double t : thresholds) {
    while (bona_below < bona.size() && bona[bona_below] < t) ++bona_below;
    while (spoof_below < spoof.size() && spoof[spoof_below] < t) ++spoof_below;
    curve.push_back({t, static_cast<double>(spoof.size() - spoof_below) / spoof.size(),
                     static_cast<double>(bona_below) / bona.size()});
  }
  return curve;
}

// Locates where FRR - FAR changes sign along an ascending curve and
// interpolates (FAR + FRR) / 2 linearly across that step.
inline double EerFromCurve(const std::vector<ErrorRates>& curve) {
  Require(!curve.empty(), "empty error-rate curve");
  auto gap = [](const ErrorRates& r) { return r.frr - r.far; };
  auto mean = [](const ErrorRates& r) { return 0.5 * (r.far + r.frr); };
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double d = gap(curve[i]);
    if (d == 0.0) return mean(curve[i]);
    if (d > 0.0) {
      if (i == 0) return mean(curve[0]);
      const double d0 = gap(curve[i - 1]);
      const double lambda = -d0 / (d - d0);
      return (1.0 - lambda) * mean(curve[i - 1]) + lambda * mean(curve[i]);
    }
  }
  return mean(curve.back());
}

// Higher scores mean more bona fide.
inline double ComputeEer(const std::vector<double>& bona, const std::vector<double>& spoof) {
  return EerFromCurve(ErrorRateCurve(bona, spoof));
}

}  // namespace spoofshap::train

#endif  // SPOOFSHAP_TRAIN_EER_HPP_
