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

#ifndef SPOOFSHAP_DSP_VAD_HPP_
#define SPOOFSHAP_DSP_VAD_HPP_

#include <algorithm>
#include <vector>

#include "spoofshap/dsp/spectrogram.hpp"
#include "spoofshap/error.hpp"

namespace spoofshap::dsp {

inline constexpr double kDefaultVadRatio = 0.01;

struct VadMask {
  std::vector<bool> speech;  // one entry per spectrogram frame
  double threshold_ratio = kDefaultVadRatio;

  std::size_t size() const { return speech.size(); }
  std::size_t num_speech() const {
    return static_cast<std::size_t>(std::count(speech.begin(), speech.end(), true));
  }
};

// Frame n is speech iff its energy is at least ratio * (peak frame energy).
// An all-zero spectrogram has no speech.
inline VadMask EnergyVad(const Spectrogram& s, double threshold_ratio = kDefaultVadRatio) {
  Require(threshold_ratio > 0.0 && threshold_ratio < 1.0,
          "VAD threshold ratio must lie in (0, 1)");
  Require(s.num_frames > 0 && s.num_bins > 0, "empty spectrogram");
  const std::vector<double> energy = FrameEnergies(s);
  const double peak = *std::max_element(energy.begin(), energy.end());
  VadMask mask;
  mask.threshold_ratio = threshold_ratio;
  mask.speech.resize(energy.size());
  const double threshold = threshold_ratio * peak;
  for (std::size_t n = 0; n < energy.size(); ++n) {
    mask.speech[n] = peak > 0.0 && energy[n] >= threshold;
  }
  return mask;
}

}  // namespace spoofshap::dsp

#endif  // SPOOFSHAP_DSP_VAD_HPP_
