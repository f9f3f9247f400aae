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

#ifndef SPOOFSHAP_ANALYSIS_HISTOGRAM_HPP_
#define SPOOFSHAP_ANALYSIS_HISTOGRAM_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "spoofshap/error.hpp"
#include "spoofshap/io.hpp"

namespace spoofshap::analysis {

struct ShapHistogram {
  std::vector<double> edges;  // num_bins + 1, strictly increasing
  std::vector<std::size_t> counts;
  std::size_t total = 0;
  bool degenerate = false;  // every value was zero; one bin holds them all

  bool IsNonIncreasing() const {
    for (std::size_t i = 1; i < counts.size(); ++i) {
      if (counts[i] > counts[i - 1]) return false;
    }
    return true;
  }

  Json ToJson() const { return {{"edges", edges}, {"counts", counts}, {"total", total}, {"degenerate", degenerate}}; }
};

// Uniform bins over [0, max] of the positive part of phi; the maximum falls
// in the last bin.
inline ShapHistogram MakeShapHistogram(const std::vector<double>& phi, std::size_t num_bins) {
  Require(num_bins >= 2, "histogram needs at least 2 bins");
  ShapHistogram h;
  h.total = phi.size();
  double top = 0.0;
  for (double v : phi) top = std::max(top, v);
  if (!(top > 0.0)) {
    h.degenerate = true;
    h.edges = {0.0, 1.0};
    h.counts = {phi.size()};
    return h;
  }
  h.edges.resize(num_bins + 1);
  for (std::size_t i = 0; i <= num_bins; ++i) h.edges[i] = top * static_cast<double>(i) / static_cast<double>(num_bins);
  h.counts.assign(num_bins, 0);
  for (double v : phi) {
    const double x = std::max(v, 0.0);
    auto bin = static_cast<std::size_t>(x / top * static_cast<double>(num_bins));
    ++h.counts[std::min(bin, num_bins - 1)];
  }
  return h;
}

}  // namespace spoofshap::analysis

#endif  // SPOOFSHAP_ANALYSIS_HISTOGRAM_HPP_
