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

#ifndef SPOOFSHAP_TRAIN_BATCHING_HPP_
#define SPOOFSHAP_TRAIN_BATCHING_HPP_

#include <algorithm>
#include <numeric>
#include <vector>

#include "spoofshap/error.hpp"
#include "spoofshap/random.hpp"

namespace spoofshap::train {

struct Batch {
  std::vector<std::size_t> items;  // indices into the length list
  std::size_t padded_length = 0;   // max raw length in the batch
};

struct BatchPlan {
  std::vector<Batch> batches;

  // Mean over batches of (padded - raw) / raw summed over members.
  double PaddingOverhead(const std::vector<std::size_t>& lengths) const {
    double total = 0.0;
    for (const auto& b : batches) {
      double raw = 0.0, padded = 0.0;
      for (std::size_t i : b.items) {
        raw += static_cast<double>(lengths[i]);
        padded += static_cast<double>(b.padded_length);
      }
      total += (padded - raw) / raw;
    }
    return batches.empty() ? 0.0 : total / static_cast<double>(batches.size());
  }
};

inline Batch MakeBatch(std::vector<std::size_t> items, const std::vector<std::size_t>& lengths) {
  Batch b;
  for (std::size_t i : items) b.padded_length = std::max(b.padded_length, lengths[i]);
  b.items = std::move(items);
  return b;
}

// Stable sort by length, then consecutive runs of batch_size.
inline BatchPlan PlanBatches(const std::vector<std::size_t>& lengths, std::size_t batch_size) {
  Require(batch_size >= 1, "batch_size must be at least 1");
  Require(!lengths.empty(), "cannot plan batches for an empty manifest");
  std::vector<std::size_t> order(lengths.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lengths[a] < lengths[b]; });
  BatchPlan plan;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t end = std::min(order.size(), start + batch_size);
    plan.batches.push_back(MakeBatch({order.begin() + start, order.begin() + end}, lengths));
  }
  return plan;
}

// Batch order for one epoch; contents stay fixed.
inline std::vector<std::size_t> EpochOrder(const BatchPlan& plan, Rng& rng) {
  std::vector<std::size_t> order(plan.batches.size());
  std::iota(order.begin(), order.end(), 0);
  rng.Shuffle(order);
  return order;
}

}  // namespace spoofshap::train

#endif  // SPOOFSHAP_TRAIN_BATCHING_HPP_
