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


#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "gtest/gtest.h"
#include "spoofshap/dsp/fft.hpp"
#include "spoofshap/dsp/spectrogram.hpp"
#include "spoofshap/dsp/vad.hpp"
#include "spoofshap/random.hpp"

namespace spoofshap::dsp {
namespace {

std::vector<Complex> NaiveDft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    long double re = 0, im = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const long double a = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>((j * k) % n) / n;
      re += x[j] * std::cos(a);
      im += x[j] * std::sin(a);
    }
    out[k] = Complex(static_cast<double>(re), static_cast<double>(im));
  }
  return out;
}

corpus::Waveform Sine(double hz, std::size_t length, double amplitude = 1.0) {
  corpus::Waveform w;
  w.samples.resize(length);
  for (std::size_t i = 0; i < length; ++i) {
    w.samples[i] = static_cast<float>(amplitude * std::sin(2.0 * std::numbers::pi * hz * i / 16000.0));
  }
  return w;
}

TEST(HammingTest, LengthFiveByHand) {
  const auto w = HammingWindow(5);
  const double expected[] = {0.08, 0.54, 1.0, 0.54, 0.08};
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(w[k], expected[k], 1e-15);
}

TEST(HammingTest, EndpointsAndSymmetry) {
  for (std::size_t len : {2u, 3u, 17u, 320u, 1001u}) {
    const auto w = HammingWindow(len);
    EXPECT_NEAR(w.front(), 0.08, 1e-15);
    EXPECT_NEAR(w.back(), 0.08, 1e-15);
    for (std::size_t k = 0; k < len; ++k) EXPECT_EQ(w[k], w[len - 1 - k]);
  }
  const auto w = HammingWindow(320);
  EXPECT_EQ(w[159], w[160]);
  EXPECT_THROW(HammingWindow(1), Error);
}

TEST(FrameTest, CountsAndStarts) {
  corpus::Waveform w;
  w.samples.resize(16000);
  for (std::size_t i = 0; i < w.size(); ++i) w.samples[i] = static_cast<float>(i);
  const auto frames = FrameSignal(w, 320, 160);
  // Starts 0, 160, ..., 15680 enumerated directly.
  std::size_t expected = 0;
  for (std::size_t s = 0; s + 320 <= 16000; s += 160) ++expected;
  EXPECT_EQ(expected, 99u);
  ASSERT_EQ(frames.size(), expected);
  for (std::size_t i = 0; i < frames.size(); ++i) EXPECT_EQ(frames[i][0], static_cast<float>(i * 160));

  w.samples.resize(320);
  EXPECT_EQ(FrameSignal(w, 320, 160).size(), 1u);
  w.samples.resize(319);
  EXPECT_THROW(FrameSignal(w, 320, 160), Error);
}

TEST(FftTest, MatchesNaiveDftOnRandomFrames) {
  Rng rng(99);
  const Fft fft(320);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(320);
    for (auto& v : x) v = rng.Uniform(-1.0, 1.0);
    const auto fast = fft.Forward(std::span<const double>(x));
    const auto slow = NaiveDft(x);
    for (std::size_t k = 0; k < 320; ++k) {
      EXPECT_LE(std::abs(fast[k] - slow[k]), 1e-9) << k;
    }
  }
}

TEST(FftTest, OtherSizesAndInverse) {
  Rng rng(5);
  for (std::size_t n : {1u, 2u, 7u, 12u, 97u, 256u, 300u}) {
    const Fft fft(n);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.Normal();
    const auto fast = fft.Forward(std::span<const double>(x));
    const auto slow = NaiveDft(x);
    for (std::size_t k = 0; k < n; ++k) EXPECT_LE(std::abs(fast[k] - slow[k]), 1e-9);
    const auto back = fft.Inverse(fast);
    for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(back[k].real(), x[k], 1e-12);
  }
}

TEST(FftTest, ParsevalOnWindowedFrame) {
  Rng rng(3);
  const auto window = HammingWindow(320);
  const Fft fft(320);
  std::vector<double> x(320);
  double time_energy = 0.0;
  for (std::size_t k = 0; k < 320; ++k) {
    x[k] = window[k] * rng.Uniform(-1.0, 1.0);
    time_energy += x[k] * x[k];
  }
  const auto spectrum = fft.Forward(std::span<const double>(x));
  double freq_energy = 0.0;
  for (std::size_t m = 0; m <= 160; ++m) {
    const double doubling = (m == 0 || m == 160) ? 1.0 : 2.0;
    freq_energy += doubling * std::norm(spectrum[m]);
  }
  EXPECT_NEAR(freq_energy / (320.0 * time_energy), 1.0, 1e-6);
}

TEST(SpectrogramTest, SinusoidPeaksAtExpectedBin) {
  const Spectrogram s = MagnitudeSpectrogram(Sine(400.0, 16000));
  EXPECT_EQ(s.num_bins, 161u);
  EXPECT_EQ(s.num_frames, 99u);
  EXPECT_DOUBLE_EQ(s.bin_hz, 50.0);
  EXPECT_DOUBLE_EQ(s.hop_s, 0.01);
  std::size_t best = 0;
  double best_mean = -1.0;
  for (std::size_t m = 0; m < s.num_bins; ++m) {
    double mean = 0.0;
    for (std::size_t n = 0; n < s.num_frames; ++n) mean += s.at(m, n);
    if (mean > best_mean) best_mean = mean, best = m;
  }
  EXPECT_EQ(best, 400u / 50u);
}

TEST(SpectrogramTest, ZeroSignalAndShapeAndNonNegativity) {
  corpus::Waveform zero;
  zero.samples.assign(1000, 0.0f);
  const Spectrogram s = MagnitudeSpectrogram(zero);
  EXPECT_EQ(s.num_bins, 161u);
  for (float v : s.values) EXPECT_EQ(v, 0.0f);
  const Spectrogram t = MagnitudeSpectrogram(Sine(1234.0, 333, 0.3));
  EXPECT_EQ(t.num_bins, 161u);
  for (float v : t.values) EXPECT_GE(v, 0.0f);
  corpus::Waveform w8k = Sine(100, 1000);
  w8k.sample_rate = 8000;
  EXPECT_THROW(MagnitudeSpectrogram(w8k), Error);
}

TEST(SpectrogramTest, HopShiftMovesOneFrame) {
  Rng rng(12);
  corpus::Waveform w;
  w.samples.resize(4000);
  for (auto& v : w.samples) v = static_cast<float>(rng.Uniform(-0.5, 0.5));
  corpus::Waveform shifted;
  shifted.samples.assign(160, 0.0f);
  shifted.samples.insert(shifted.samples.end(), w.samples.begin(), w.samples.end());
  const Spectrogram a = MagnitudeSpectrogram(w);
  const Spectrogram b = MagnitudeSpectrogram(shifted);
  ASSERT_EQ(b.num_frames, a.num_frames + 1);
  for (std::size_t n = 0; n < a.num_frames; ++n) {
    for (std::size_t m = 0; m < a.num_bins; ++m) ASSERT_EQ(b.at(m, n + 1), a.at(m, n));
  }
}

TEST(SpectrogramTest, DumpRoundTrip) {
  const fs::path dir = fs::temp_directory_path() / "spoofshap_dsp_test";
  fs::create_directories(dir);
  const Spectrogram s = MagnitudeSpectrogram(Sine(700.0, 2000, 0.5));
  SaveSpectrogram(s, dir / "s.f32");
  const Spectrogram back = LoadSpectrogram(dir / "s.f32");
  EXPECT_EQ(back.values, s.values);
  EXPECT_EQ(back.num_bins, s.num_bins);
  EXPECT_EQ(back.num_frames, s.num_frames);
  EXPECT_EQ(back.bin_hz, s.bin_hz);
  const Json sidecar = ReadJson(dir / "s.f32.json");
  EXPECT_EQ(sidecar["M"], 161);
}

Spectrogram FromFrameEnergies(const std::vector<double>& energy) {
  Spectrogram s;
  s.num_bins = 1;
  s.num_frames = energy.size();
  for (double e : energy) s.values.push_back(static_cast<float>(std::sqrt(e)));
  return s;
}

TEST(VadTest, ThresholdByHand) {
  const VadMask mask = EnergyVad(FromFrameEnergies({0, 0, 10, 12, 0}), 0.1);
  EXPECT_EQ(mask.speech, (std::vector<bool>{false, false, true, true, false}));
  EXPECT_EQ(mask.num_speech(), 2u);
}

TEST(VadTest, DegenerateAndPreconditions) {
  const VadMask mask = EnergyVad(FromFrameEnergies({0, 0, 0}));
  EXPECT_EQ(mask.num_speech(), 0u);
  EXPECT_EQ(mask.size(), 3u);
  EXPECT_THROW(EnergyVad(FromFrameEnergies({1, 2}), 1.0), Error);
  EXPECT_THROW(EnergyVad(FromFrameEnergies({1, 2}), 0.0), Error);
  EXPECT_THROW(EnergyVad(Spectrogram{}), Error);
}

}  // namespace
}  // namespace spoofshap::dsp
