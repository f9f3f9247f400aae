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

#ifndef SPOOFSHAP_SHAP_ATTRIBUTION_HPP_
#define SPOOFSHAP_SHAP_ATTRIBUTION_HPP_

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "spoofshap/autodiff/tensor.hpp"
#include "spoofshap/error.hpp"

namespace spoofshap::shap {

using autodiff::Shape;

// What the explained function returns for the chosen class.
enum class Target { kLogit, kProbability };

inline const char* ToString(Target t) { return t == Target::kLogit ? "logit" : "probability"; }

inline Target TargetFromString(const std::string& s) {
  if (s == "logit") return Target::kLogit;
  if (s == "probability") return Target::kProbability;
  Fail(ErrorCode::kInvalidArgument, "unknown SHAP target: " + s);
}

// Per-feature contributions phi with base value phi0 = f(baseline). phi has
// the explained input's shape, flattened row-major.
struct AttributionMap {
  std::vector<double> phi;
  Shape shape;
  double phi0 = 0.0;
  std::size_t class_index = 0;
  Target target = Target::kLogit;
  std::string estimator;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;

  std::size_t size() const { return phi.size(); }
  double Sum() const {
    double s = 0.0;
    for (double v : phi) s += v;
    return s;
  }
};

// g(mask) = phi0 + sum_n phi_n * mask_n.
inline double ExplanationModelValue(const AttributionMap& att, const std::vector<bool>& mask) {
  if (mask.size() != att.phi.size()) {
    Fail(ErrorCode::kInvalidArgument, "mask has " + std::to_string(mask.size()) + " entries, attribution has " +
                                          std::to_string(att.phi.size()));
  }
  double g = att.phi0;
  for (std::size_t n = 0; n < mask.size(); ++n) {
    if (mask[n]) g += att.phi[n];
  }
  return g;
}

// |f(x) - (phi0 + sum phi)| / max(1, |f(x)|).
inline double AdditivityGap(double fx, const AttributionMap& att) {
  return std::abs(fx - (att.phi0 + att.Sum())) / std::max(1.0, std::abs(fx));
}

inline double PearsonCorrelation(const std::vector<double>& a, const std::vector<double>& b) {
  Require(a.size() == b.size() && !a.empty(), "correlation needs two equal-length, non-empty vectors");
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ma += a[i], mb += b[i];
  ma /= static_cast<double>(a.size());
  mb /= static_cast<double>(b.size());
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) Fail(ErrorCode::kNumerical, "zero-variance attribution vector");
  return sab / std::sqrt(saa * sbb);
}

// Correlation between the two class attributions of one input.
inline double ClassSymmetry(const AttributionMap& bona, const AttributionMap& spoof) {
  Require(bona.shape == spoof.shape, "class attributions differ in shape");
  return PearsonCorrelation(bona.phi, spoof.phi);
}

inline std::vector<double> PositivePart(std::vector<double> phi) {
  for (double& v : phi) v = std::max(v, 0.0);
  return phi;
}

inline AttributionMap PositivePart(AttributionMap att) {
  for (double& v : att.phi) v = std::max(v, 0.0);
  return att;
}

}  // namespace spoofshap::shap

#endif  // SPOOFSHAP_SHAP_ATTRIBUTION_HPP_
