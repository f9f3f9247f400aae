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

#ifndef SPOOFSHAP_DSP_SPECTROGRAM_HPP_
#define SPOOFSHAP_DSP_SPECTROGRAM_HPP_

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "spoofshap/corpus/wav.hpp"
#include "spoofshap/dsp/fft.hpp"
#include "spoofshap/error.hpp"
#include "spoofshap/io.hpp"

namespace spoofshap::dsp {

// 20 ms window and 10 ms shift at 16 kHz; FFT size equals the window so
// there is no zero padding.
inline constexpr std::size_t kWindowLength = 320;
inline constexpr std::size_t kHopLength = 160;
inline constexpr std::size_t kFftSize = 320;
inline constexpr std::size_t kNumBins = kFftSize / 2 + 1;

// Magnitudes X(m, n), row-major with m (frequency bin) as the row index.
struct Spectrogram {
  std::vector<float> values;
  std::size_t num_bins = 0;    // M
  std::size_t num_frames = 0;  // N
  double bin_hz = 0.0;
  double hop_s = 0.0;
  std::size_t window_length = 0;

  float at(std::size_t m, std::size_t n) const { return values[m * num_frames + n]; }
  float& at(std::size_t m, std::size_t n) { return values[m * num_frames + n]; }
};

// Symmetric Hamming: w[k] = 0.54 - 0.46 cos(2 pi k / (len - 1)).
inline std::vector<double> HammingWindow(std::size_t length) {
  Require(length >= 2, "Hamming window length must be at least 2");
  std::vector<double> w(length);
  const double denom = static_cast<double>(length - 1);
  for (std::size_t k = 0; k < length; ++k) {
    w[k] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / denom);
  }
  // Exact symmetry regardless of cos rounding.
  for (std::size_t k = 0; k < length / 2; ++k) w[length - 1 - k] = w[k];
  return w;
}

inline std::size_t NumFrames(std::size_t signal_length, std::size_t window_length,
                             std::size_t hop) {
  if (signal_length < window_length) return 0;
  return (signal_length - window_length) / hop + 1;
}

// Frames start at i * hop; trailing samples that do not fill a window are
// dropped.
inline std::vector<std::span<const float>> FrameSignal(const corpus::Waveform& w,
                                                       std::size_t window_length,
                                                       std::size_t hop) {
  Require(window_length >= 1 && hop >= 1, "window and hop must be positive");
  if (w.samples.size() < window_length) {
    Fail(ErrorCode::kInvalidArgument,
         "signal shorter than window (" + std::to_string(w.samples.size()) + " < " +
             std::to_string(window_length) + ")");
  }
  const std::size_t count = NumFrames(w.samples.size(), window_length, hop);
  std::vector<std::span<const float>> frames;
  frames.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    frames.emplace_back(w.samples.data() + i * hop, window_length);
  }
  return frames;
}

inline Spectrogram MagnitudeSpectrogram(const corpus::Waveform& w) {
  if (w.sample_rate != corpus::kDefaultSampleRate) {
    Fail(ErrorCode::kInvalidArgument,
         "spectrogram frontend expects 16000 Hz input, got " + std::to_string(w.sample_rate));
  }
  const auto frames = FrameSignal(w, kWindowLength, kHopLength);
  static const std::vector<double> window = HammingWindow(kWindowLength);
  static const Fft fft(kFftSize);

  Spectrogram s;
  s.num_bins = kNumBins;
  s.num_frames = frames.size();
  s.bin_hz = static_cast<double>(w.sample_rate) / kFftSize;
  s.hop_s = static_cast<double>(kHopLength) / w.sample_rate;
  s.window_length = kWindowLength;
  s.values.assign(s.num_bins * s.num_frames, 0.0f);

  std::vector<double> buf(kFftSize);
  for (std::size_t n = 0; n < frames.size(); ++n) {
    for (std::size_t k = 0; k < kWindowLength; ++k) buf[k] = window[k] * frames[n][k];
    const auto spectrum = fft.Forward(std::span<const double>(buf));
    for (std::size_t m = 0; m < kNumBins; ++m) {
      s.at(m, n) = static_cast<float>(std::abs(spectrum[m]));
    }
  }
  return s;
}

inline std::vector<double> FrameEnergies(const Spectrogram& s) {
  std::vector<double> e(s.num_frames, 0.0);
  for (std::size_t m = 0; m < s.num_bins; ++m) {
    for (std::size_t n = 0; n < s.num_frames; ++n) {
      const double x = s.at(m, n);
      e[n] += x * x;
    }
  }
  return e;
}

// Binary dump: float32 M x N row-major, with a JSON sidecar.
inline void SaveSpectrogram(const Spectrogram& s, const fs::path& bin_path) {
  WriteFileBytes(bin_path, EncodeFloat32(std::span<const float>(s.values)));
  Json meta;
  meta["M"] = s.num_bins;
  meta["N"] = s.num_frames;
  meta["bin_hz"] = s.bin_hz;
  meta["hop_s"] = s.hop_s;
  WriteJson(fs::path(bin_path.string() + ".json"), meta);
}

inline Spectrogram LoadSpectrogram(const fs::path& bin_path) {
  const Json meta = ReadJson(fs::path(bin_path.string() + ".json"));
  Spectrogram s;
  s.num_bins = meta.at("M").get<std::size_t>();
  s.num_frames = meta.at("N").get<std::size_t>();
  s.bin_hz = meta.at("bin_hz").get<double>();
  s.hop_s = meta.at("hop_s").get<double>();
  s.window_length = kWindowLength;
  s.values = DecodeFloat32(ReadFileBytes(bin_path));
  if (s.values.size() != s.num_bins * s.num_frames) {
    Fail(ErrorCode::kFormat, bin_path.string() + ": size does not match M x N");
  }
  return s;
}

}  // namespace spoofshap::dsp

#endif  // SPOOFSHAP_DSP_SPECTROGRAM_HPP_
