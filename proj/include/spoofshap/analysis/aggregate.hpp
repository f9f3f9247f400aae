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

#ifndef SPOOFSHAP_ANALYSIS_AGGREGATE_HPP_
#define SPOOFSHAP_ANALYSIS_AGGREGATE_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "spoofshap/analysis/prune.hpp"
#include "spoofshap/corpus/manifest.hpp"
#include "spoofshap/dsp/spectrogram.hpp"
#include "spoofshap/dsp/vad.hpp"
#include "spoofshap/error.hpp"

namespace spoofshap::analysis {

// How attribution indices map onto time and frequency. Waveform maps have one
// feature per sample; spectrogram maps are row-major (bin, frame).
struct FeatureLayout {
  bool spectral = false;
  std::size_t num_samples = 0;  // waveform length (both layouts)
  std::size_t num_bins = 0;     // spectral only
  std::size_t num_frames = 0;   // frames of the utterance's spectrogram
  std::size_t hop = dsp::kHopLength;
  std::size_t window = dsp::kWindowLength;
  double bin_hz = 50.0;
  int sample_rate = 16000;

  static FeatureLayout Waveform(std::size_t num_samples, int sample_rate = 16000) {
    FeatureLayout l;
    l.num_samples = num_samples;
    l.num_frames = dsp::NumFrames(num_samples, l.window, l.hop);
    l.sample_rate = sample_rate;
    return l;
  }

  static FeatureLayout Spectral(std::size_t num_samples, std::size_t num_bins, std::size_t num_frames,
                                double bin_hz = 50.0, int sample_rate = 16000) {
    FeatureLayout l;
    l.spectral = true;
    l.num_samples = num_samples;
    l.num_bins = num_bins;
    l.num_frames = num_frames;
    l.bin_hz = bin_hz;
    l.sample_rate = sample_rate;
    return l;
  }

  std::size_t num_features() const { return spectral ? num_bins * num_frames : num_samples; }

  // Frame of feature i; waveform samples map to floor(i / hop), clamped to the
  // last frame.
  std::size_t FrameOf(std::size_t i) const {
    if (spectral) return i % num_frames;
    Require(num_frames > 0, "waveform shorter than one analysis window");
    return std::min(i / hop, num_frames - 1);
  }

  std::size_t BinOf(std::size_t i) const { return i / num_frames; }

  void Check(std::size_t features) const {
    if (features != num_features()) {
      Fail(ErrorCode::kInvalidArgument, "attribution has " + std::to_string(features) +
                                            " features, layout expects " + std::to_string(num_features()));
    }
  }
};

struct SegmentMass {
  double speech_mass = 0.0;
  double nonspeech_mass = 0.0;
  std::size_t speech_features = 0;
  std::size_t nonspeech_features = 0;
  // (speech mass / speech length) / (nonspeech mass / nonspeech length);
  // unset when one of the classes is empty, infinite when all mass is speech.
  std::optional<double> density_ratio;
  std::string status = "ok";
};

inline SegmentMass AggregateSegments(const std::vector<double>& phi, const dsp::VadMask& vad,
                                     const FeatureLayout& layout) {
  layout.Check(phi.size());
  Require(vad.size() == layout.num_frames, "VAD mask length differs from the utterance's frame count");
  SegmentMass s;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double v = std::max(phi[i], 0.0);
    if (vad.speech[layout.FrameOf(i)]) {
      s.speech_mass += v;
      ++s.speech_features;
    } else {
      s.nonspeech_mass += v;
      ++s.nonspeech_features;
    }
  }
  if (s.speech_features == 0) {
    s.status = "all_nonspeech";
  } else if (s.nonspeech_features == 0) {
    s.status = "all_speech";
  } else if (s.nonspeech_mass == 0.0) {
    s.status = s.speech_mass > 0.0 ? "no_nonspeech_mass" : "no_mass";
    if (s.speech_mass > 0.0) s.density_ratio = std::numeric_limits<double>::infinity();
  } else {
    s.density_ratio = (s.speech_mass / static_cast<double>(s.speech_features)) /
                      (s.nonspeech_mass / static_cast<double>(s.nonspeech_features));
  }
  return s;
}

inline constexpr double kDefaultLowEdgeHz = 3000.0;
inline constexpr double kDefaultHighEdgeHz = 6000.0;

// Band j is [edge_{j-1}, edge_j) of bin frequency m * bin_hz, with the outer
// bands open-ended. Returns one fraction of selected points per band.
inline std::vector<double> BandFractions(const PruneMask& mask, const FeatureLayout& layout,
                                         const std::vector<double>& edges_hz) {
  Require(layout.spectral, "band fractions need a spectrogram attribution");
  Require(!mask.selected.empty(), "band fractions of an empty mask");
  Require(std::is_sorted(edges_hz.begin(), edges_hz.end()), "band edges must be ascending");
  const double nyquist = layout.sample_rate / 2.0;
  for (double e : edges_hz) Require(e > 0.0 && e <= nyquist, "band edge outside (0, Nyquist]");
  layout.Check(mask.num_features);
  std::vector<double> fractions(edges_hz.size() + 1, 0.0);
  for (std::size_t i : mask.selected) {
    const double f = static_cast<double>(layout.BinOf(i)) * layout.bin_hz;
    const auto band = static_cast<std::size_t>(std::upper_bound(edges_hz.begin(), edges_hz.end(), f) - edges_hz.begin());
    fractions[band] += 1.0;
  }
  for (double& v : fractions) v /= static_cast<double>(mask.selected.size());
  return fractions;
}

// Fraction of selected points inside the [lo, hi) Hz band.
inline double FractionInBand(const PruneMask& mask, const FeatureLayout& layout, double lo_hz, double hi_hz) {
  Require(layout.spectral && !mask.selected.empty(), "band fraction needs a non-empty spectrogram mask");
  std::size_t inside = 0;
  for (std::size_t i : mask.selected) {
    const double f = static_cast<double>(layout.BinOf(i)) * layout.bin_hz;
    inside += f >= lo_hz && f < hi_hz;
  }
  return static_cast<double>(inside) / static_cast<double>(mask.selected.size());
}

// Per-frame (spectral) or per-sample (waveform) membership of a set of sample
// regions. A frame belongs when its window overlaps a region.
inline std::vector<bool> RegionCover(const std::vector<corpus::ArtefactRegion>& regions, const FeatureLayout& layout) {
  const std::size_t units = layout.spectral ? layout.num_frames : layout.num_samples;
  std::vector<bool> cover(units, false);
  for (const auto& r : regions) {
    Require(r.start < r.end && r.end <= layout.num_samples, "artefact region outside the utterance");
    if (layout.spectral) {
      for (std::size_t n = 0; n < layout.num_frames; ++n) {
        const std::size_t begin = n * layout.hop, end = begin + layout.window;
        if (begin < r.end && end > r.start) cover[n] = true;
      }
    } else {
      for (std::size_t i = r.start; i < r.end; ++i) cover[i] = true;
    }
  }
  return cover;
}

// (fraction of selected points inside the regions) / (fraction of the
// utterance the regions cover).
inline double LocalizationEnrichment(const PruneMask& mask, const std::vector<corpus::ArtefactRegion>& regions,
                                     const FeatureLayout& layout) {
  Require(!regions.empty(), "localization needs at least one ground-truth region");
  Require(!mask.selected.empty(), "localization of an empty mask");
  layout.Check(mask.num_features);
  const std::vector<bool> cover = RegionCover(regions, layout);
  const double covered = static_cast<double>(std::count(cover.begin(), cover.end(), true)) /
                         static_cast<double>(cover.size());
  std::size_t inside = 0;
  for (std::size_t i : mask.selected) inside += cover[layout.spectral ? layout.FrameOf(i) : i];
  return (static_cast<double>(inside) / static_cast<double>(mask.selected.size())) / covered;
}

// Share of the selected points' attribution mass whose frame satisfies pred.
template <typename Pred>
double MaskedMassFraction(const std::vector<double>& phi, const PruneMask& mask, Pred&& pred) {
  double total = 0.0, hit = 0.0;
  for (std::size_t i : mask.selected) {
    const double v = std::max(phi[i], 0.0);
    total += v;
    if (pred(i)) hit += v;
  }
  return total > 0.0 ? hit / total : 0.0;
}

// The leading interval starts at the first speech frame (frame 0 when the
// VAD finds none) and lasts `seconds`.
inline std::pair<std::size_t, std::size_t> LeadingFrames(const dsp::VadMask& vad, const FeatureLayout& layout,
                                                         double seconds = 0.5) {
  std::size_t first = 0;
  while (first < vad.size() && !vad.speech[first]) ++first;
  if (first == vad.size()) first = 0;
  const double frames_per_s = static_cast<double>(layout.sample_rate) / static_cast<double>(layout.hop);
  const auto span = static_cast<std::size_t>(std::llround(seconds * frames_per_s));
  return {first, std::min(layout.num_frames, first + span)};
}

}  // namespace spoofshap::analysis

#endif  // SPOOFSHAP_ANALYSIS_AGGREGATE_HPP_
