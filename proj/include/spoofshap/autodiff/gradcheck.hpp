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

#ifndef SPOOFSHAP_AUTODIFF_GRADCHECK_HPP_
#define SPOOFSHAP_AUTODIFF_GRADCHECK_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "spoofshap/autodiff/graph.hpp"
#include "spoofshap/error.hpp"

namespace spoofshap::autodiff {

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_coordinate;
  std::size_t checked = 0;
  // Coordinates whose perturbation crosses a relu kink or changes a max-pool
  // winner; the function is not differentiable there.
  std::size_t excluded = 0;
};

namespace internal {

// Which side of every relu kink each unit is on (0 exactly at the kink), and
// every pooling winner. A coordinate whose perturbation changes this pattern
// straddles a non-differentiable point.
inline std::vector<long> ActivationPattern(const Graph& g, const Activations<double>& act) {
  std::vector<long> pattern;
  const auto& nodes = g.nodes();
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (nodes[i].op == OpKind::kRelu) {
      for (double v : act.values[nodes[i].lhs].data) pattern.push_back(v > 0.0 ? 1 : (v < 0.0 ? -1 : 0));
    } else if (nodes[i].op == OpKind::kGlobalMaxPool) {
      for (std::size_t a : act.argmax[i]) pattern.push_back(static_cast<long>(a));
    }
  }
  return pattern;
}

}  // namespace internal

// Central differences (f(c + eps) - f(c - eps)) / 2 eps against the reverse
// pass, for every parameter and input coordinate. Error is normalised by
// max(1, |analytic|).
inline GradCheckReport FiniteDifferenceCheck(const Graph& g, const ParamSet<double>& params,
                                             const Tensor<double>& input, double eps,
                                             std::size_t output_index = 0) {
  Require(eps > 0.0, "eps must be positive");
  const Activations<double> base = Forward(g, params, input);
  const auto pattern = internal::ActivationPattern(g, base);
  Tensor<double> seed(base.output().shape);
  Require(output_index < seed.size(), "output index out of range");
  seed[output_index] = 1.0;
  const Gradients<double> analytic = Backward(g, params, base, seed);

  GradCheckReport report;
  ParamSet<double> p = params;
  Tensor<double> x = input;
  auto probe = [&](double* coord, double grad, const std::string& label) {
    const double saved = *coord;
    *coord = saved + eps;
    const auto plus = Forward(g, p, x);
    *coord = saved - eps;
    const auto minus = Forward(g, p, x);
    *coord = saved;
    if (internal::ActivationPattern(g, plus) != pattern ||
        internal::ActivationPattern(g, minus) != pattern) {
      ++report.excluded;
      return;
    }
    const double fd = (plus.output()[output_index] - minus.output()[output_index]) / (2.0 * eps);
    const double err = std::abs(fd - grad) / std::max(1.0, std::abs(grad));
    ++report.checked;
    if (err >= report.max_relative_error) {
      report.max_relative_error = err;
      report.worst_coordinate = label;
    }
  };
  for (std::size_t k = 0; k < p.size(); ++k) {
    for (std::size_t j = 0; j < p[k].size(); ++j) {
      probe(&p[k][j], analytic.params[k][j], g.params()[k].name + "[" + std::to_string(j) + "]");
    }
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    probe(&x[j], analytic.input[j], "input[" + std::to_string(j) + "]");
  }
  return report;
}

}  // namespace spoofshap::autodiff

#endif  // SPOOFSHAP_AUTODIFF_GRADCHECK_HPP_
