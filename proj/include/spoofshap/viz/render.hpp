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

#ifndef SPOOFSHAP_VIZ_RENDER_HPP_
#define SPOOFSHAP_VIZ_RENDER_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "spoofshap/analysis/histogram.hpp"
#include "spoofshap/analysis/prune.hpp"
#include "spoofshap/corpus/wav.hpp"
#include "spoofshap/dsp/spectrogram.hpp"
#include "spoofshap/error.hpp"
#include "spoofshap/viz/image.hpp"

namespace spoofshap::viz {

enum class OverlayMode { kBothClasses, kSpoofOnly };

inline const char* ToString(OverlayMode m) { return m == OverlayMode::kBothClasses ? "both_classes" : "spoof_only"; }

inline OverlayMode OverlayModeFromString(const std::string& s) {
  if (s == "both_classes") return OverlayMode::kBothClasses;
  if (s == "spoof_only") return OverlayMode::kSpoofOnly;
  Fail(ErrorCode::kInvalidArgument, "unknown overlay mode: " + s);
}

struct OverlayStyle {
  OverlayMode mode = OverlayMode::kBothClasses;
  int dilation_radius = 2;
  bool log_magnitude_display = true;
  int width = 800;         // waveform plot area in pixels
  int height = 240;
  int cell_px = 2;         // spectrogram pixels per cell

  void Validate() const {
    Require(dilation_radius >= 0, "dilation radius must be non-negative");
    Require(width >= 16 && height >= 16 && cell_px >= 1, "figure dimensions too small");
  }
};

// Margins around every plot area.
inline constexpr int kMarginLeft = 48;
inline constexpr int kMarginRight = 12;
inline constexpr int kMarginTop = 12;
inline constexpr int kMarginBottom = 28;

inline std::string FormatTick(double v, int decimals) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

inline std::string FormatSci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1e", v);
  return buf;
}

// Column of sample s when `length` samples span `width` pixels.
inline int SampleColumn(std::size_t s, std::size_t length, int width) {
  return static_cast<int>((static_cast<double>(s) * width) / static_cast<double>(length));
}

inline void DrawTimeAxis(Image& img, int x0, int width, int y, double duration_s) {
  img.HLine(x0, x0 + width - 1, y, kBlack);
  const double step = duration_s > 4.0 ? 1.0 : (duration_s > 1.0 ? 0.2 : 0.1);
  for (int k = 0; k * step <= duration_s + 1e-9; ++k) {
    const int x = x0 + static_cast<int>(std::lround(k * step / duration_s * (width - 1)));
    img.VLine(x, y, y + 3, kBlack);
    const std::string label = FormatTick(k * step, 1);
    DrawText(img, x - TextWidth(label) / 2, y + 6, label, kBlack);
  }
  DrawText(img, x0 + width - TextWidth("S"), y + 6 + kGlyphHeight + 2, "S", kBlack);
}

// Waveform trace with bona fide attribution as green bars above the axis and
// spoof attribution as red bars below it. Attributions are positive parts;
// each column shows the largest value that falls into it.
inline Image RenderWaveformOverlay(const corpus::Waveform& w, const std::vector<double>& phi_bona,
                                   const std::vector<double>& phi_spoof, const OverlayStyle& style) {
  style.Validate();
  const std::size_t n = w.samples.size();
  Require(n > 0, "cannot render an empty waveform");
  const bool draw_bona = style.mode == OverlayMode::kBothClasses;
  if ((draw_bona && phi_bona.size() != n) || phi_spoof.size() != n) {
    Fail(ErrorCode::kInvalidArgument, "attribution length does not match waveform length " + std::to_string(n));
  }
  const int pw = style.width, ph = style.height;
  Image img(kMarginLeft + pw + kMarginRight, kMarginTop + ph + kMarginBottom + kGlyphHeight + 4);
  const int x0 = kMarginLeft, axis_y = kMarginTop + ph / 2, half = ph / 2 - 1;

  std::vector<float> lo(pw, 0.0f), hi(pw, 0.0f);
  std::vector<double> bona_col(pw, 0.0), spoof_col(pw, 0.0);
  std::vector<bool> touched(pw, false);
  float peak = 0.0f;
  for (std::size_t s = 0; s < n; ++s) {
    const int c = SampleColumn(s, n, pw);
    const float v = w.samples[s];
    if (!touched[c]) lo[c] = hi[c] = v;
    touched[c] = true;
    lo[c] = std::min(lo[c], v);
    hi[c] = std::max(hi[c], v);
    peak = std::max(peak, std::abs(v));
    if (draw_bona) bona_col[c] = std::max(bona_col[c], phi_bona[s]);
    spoof_col[c] = std::max(spoof_col[c], phi_spoof[s]);
  }
  const double phi_peak = std::max(*std::max_element(bona_col.begin(), bona_col.end()),
                                   *std::max_element(spoof_col.begin(), spoof_col.end()));

  const double amp = peak > 0.0f ? half / static_cast<double>(peak) : 0.0;
  for (int c = 0; c < pw; ++c) {
    if (!touched[c]) continue;
    const int top = axis_y - static_cast<int>(std::lround(hi[c] * amp));
    const int bottom = axis_y - static_cast<int>(std::lround(lo[c] * amp));
    img.VLine(x0 + c, top, bottom, kGray);
  }
  if (phi_peak > 0.0) {
    for (int c = 0; c < pw; ++c) {
      if (bona_col[c] > 0.0) {
        const int h = std::max(1, static_cast<int>(std::lround(bona_col[c] / phi_peak * half)));
        img.VLine(x0 + c, axis_y - h, axis_y - 1, kGreen);
      }
      if (spoof_col[c] > 0.0) {
        const int h = std::max(1, static_cast<int>(std::lround(spoof_col[c] / phi_peak * half)));
        img.VLine(x0 + c, axis_y + 1, axis_y + h, kRed);
      }
    }
  }
  img.VLine(x0 - 1, kMarginTop, kMarginTop + ph - 1, kBlack);
  DrawTimeAxis(img, x0, pw, kMarginTop + ph, static_cast<double>(n) / w.sample_rate);
  return img;
}

namespace internal {

// Largest normalised intensity covering each cell after square dilation.
inline std::vector<double> DilatedIntensity(const std::vector<double>& phi, const analysis::PruneMask& mask,
                                            std::size_t rows, std::size_t cols, int radius) {
  std::vector<double> grid(rows * cols, 0.0);
  double peak = 0.0;
  for (std::size_t i : mask.selected) peak = std::max(peak, phi[i]);
  if (peak <= 0.0) return grid;
  const long r = radius;
  for (std::size_t i : mask.selected) {
    if (phi[i] <= 0.0) continue;
    const double t = phi[i] / peak;
    const long m = static_cast<long>(i / cols), k = static_cast<long>(i % cols);
    for (long dm = std::max(0L, m - r); dm <= std::min(static_cast<long>(rows) - 1, m + r); ++dm) {
      for (long dk = std::max(0L, k - r); dk <= std::min(static_cast<long>(cols) - 1, k + r); ++dk) {
        double& g = grid[static_cast<std::size_t>(dm) * cols + static_cast<std::size_t>(dk)];
        g = std::max(g, t);
      }
    }
  }
  return grid;
}

// Darker shades for weaker points; the strongest point gets the full colour.
inline Rgb Shade(Rgb full, double t) {
  const double s = 0.35 + 0.65 * t;
  return {static_cast<std::uint8_t>(std::lround(full.r * s)), static_cast<std::uint8_t>(std::lround(full.g * s)),
          static_cast<std::uint8_t>(std::lround(full.b * s))};
}

}  // namespace internal

struct ClassOverlay {
  const std::vector<double>* phi = nullptr;
  const analysis::PruneMask* mask = nullptr;
};

// Grayscale magnitude background (low frequencies at the bottom) with pruned
// points drawn in red (spoof) and, in both-classes mode, green (bona fide).
inline Image RenderSpectrogramOverlay(const dsp::Spectrogram& s, const std::vector<double>& phi_spoof,
                                      const analysis::PruneMask& mask_spoof, const OverlayStyle& style,
                                      std::optional<ClassOverlay> bona = std::nullopt) {
  style.Validate();
  const std::size_t cells = s.num_bins * s.num_frames;
  Require(cells > 0, "cannot render an empty spectrogram");
  auto check = [&](const std::vector<double>& phi, const analysis::PruneMask& mask) {
    if (phi.size() != cells || mask.num_features != cells) {
      Fail(ErrorCode::kInvalidArgument, "attribution shape does not match spectrogram " +
                                            std::to_string(s.num_bins) + "x" + std::to_string(s.num_frames));
    }
  };
  check(phi_spoof, mask_spoof);
  const bool draw_bona = style.mode == OverlayMode::kBothClasses && bona.has_value();
  if (draw_bona) check(*bona->phi, *bona->mask);

  const int cp = style.cell_px;
  const int pw = static_cast<int>(s.num_frames) * cp, ph = static_cast<int>(s.num_bins) * cp;
  Image img(kMarginLeft + pw + kMarginRight, kMarginTop + ph + kMarginBottom + kGlyphHeight + 4);
  const int x0 = kMarginLeft, y0 = kMarginTop;

  auto display = [&](float v) { return style.log_magnitude_display ? std::log1p(static_cast<double>(v)) : v; };
  double peak = 0.0;
  for (float v : s.values) peak = std::max(peak, display(v));
  const auto spoof = internal::DilatedIntensity(phi_spoof, mask_spoof, s.num_bins, s.num_frames, style.dilation_radius);
  const auto green = draw_bona ? internal::DilatedIntensity(*bona->phi, *bona->mask, s.num_bins, s.num_frames,
                                                            style.dilation_radius)
                               : std::vector<double>(cells, 0.0);
  for (std::size_t m = 0; m < s.num_bins; ++m) {
    for (std::size_t k = 0; k < s.num_frames; ++k) {
      const std::size_t i = m * s.num_frames + k;
      Rgb c;
      if (spoof[i] > 0.0 && spoof[i] >= green[i]) {
        c = internal::Shade(kRed, spoof[i]);
      } else if (green[i] > 0.0) {
        c = internal::Shade(kGreen, green[i]);
      } else {
        const double t = peak > 0.0 ? display(s.at(m, k)) / peak : 0.0;
        const auto g = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - t)));
        c = {g, g, g};
      }
      const int px = x0 + static_cast<int>(k) * cp;
      const int py = y0 + ph - (static_cast<int>(m) + 1) * cp;
      img.FillRect(px, py, px + cp - 1, py + cp - 1, c);
    }
  }
  img.VLine(x0 - 1, y0, y0 + ph - 1, kBlack);
  for (int khz = 0; khz * 1000.0 <= (s.num_bins - 1) * s.bin_hz; khz += 2) {
    const int y = y0 + ph - 1 - static_cast<int>(std::lround(khz * 1000.0 / s.bin_hz * cp));
    img.HLine(x0 - 4, x0 - 1, y, kBlack);
    const std::string label = std::to_string(khz);
    DrawText(img, x0 - 6 - TextWidth(label), y - kGlyphHeight / 2, label, kBlack);
  }
  DrawText(img, 2, y0, "KHZ", kBlack);
  DrawTimeAxis(img, x0, pw, y0 + ph, static_cast<double>(s.num_frames) * s.hop_s);
  return img;
}

// Bar chart of bin counts on linear axes; bar heights are proportional to
// counts and every fifth edge is labelled.
inline Image RenderHistogram(const analysis::ShapHistogram& h, int width = 600, int height = 240) {
  Require(!h.counts.empty() && h.edges.size() == h.counts.size() + 1, "invalid histogram");
  Require(width >= static_cast<int>(h.counts.size()) && height >= 16, "histogram figure too small");
  const int nb = static_cast<int>(h.counts.size());
  const int bar_w = width / nb, pw = bar_w * nb;
  Image img(kMarginLeft + pw + kMarginRight + 24, kMarginTop + height + kMarginBottom);
  const int x0 = kMarginLeft, base = kMarginTop + height - 1;
  const std::size_t peak = *std::max_element(h.counts.begin(), h.counts.end());
  for (int b = 0; b < nb; ++b) {
    if (peak == 0 || h.counts[b] == 0) continue;
    const int bh = static_cast<int>(std::lround(static_cast<double>(h.counts[b]) / peak * (height - 1)));
    if (bh > 0) img.FillRect(x0 + b * bar_w, base - bh + 1, x0 + (b + 1) * bar_w - 2, base, kBlue);
  }
  img.HLine(x0, x0 + pw - 1, base + 1, kBlack);
  img.VLine(x0 - 1, kMarginTop, base + 1, kBlack);
  for (int e = 0; e <= nb; ++e) {
    const int x = x0 + e * bar_w;
    img.VLine(x, base + 1, base + 4, kBlack);
    if (e % 5 == 0 || e == nb) {
      const std::string label = FormatSci(h.edges[e]);
      DrawText(img, x - TextWidth(label) / 2, base + 7, label, kBlack);
    }
  }
  const std::string top = std::to_string(peak);
  DrawText(img, x0 - 4 - TextWidth(top), kMarginTop, top, kBlack);
  DrawText(img, x0 - 4 - TextWidth("0"), base - kGlyphHeight + 1, "0", kBlack);
  return img;
}

}  // namespace spoofshap::viz

#endif  // SPOOFSHAP_VIZ_RENDER_HPP_
