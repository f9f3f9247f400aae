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

#ifndef SPOOFSHAP_DSP_FFT_HPP_
#define SPOOFSHAP_DSP_FFT_HPP_

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "spoofshap/error.hpp"

namespace spoofshap::dsp {

using Complex = std::complex<double>;

// Mixed-radix decimation-in-time FFT for any length. Each level splits by the
// smallest prime factor, so cost is O(N * sum of prime factors); 320 = 2^6 * 5
// is cheap, a large prime length degrades to a direct DFT.
class Fft {
 public:
  explicit Fft(std::size_t n) : n_(n), twiddle_(n) {
    Require(n >= 1, "FFT size must be positive");
    for (std::size_t j = 0; j < n; ++j) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
      twiddle_[j] = Complex(std::cos(angle), std::sin(angle));
    }
  }

  std::size_t size() const { return n_; }

  std::vector<Complex> Forward(std::span<const Complex> x) const {
    Require(x.size() == n_, "FFT input length mismatch");
    std::vector<Complex> out(n_);
    Recurse(x.data(), 1, n_, out.data());
    return out;
  }

  std::vector<Complex> Forward(std::span<const double> x) const {
    std::vector<Complex> c(x.begin(), x.end());
    return Forward(std::span<const Complex>(c));
  }

  // Unnormalized conjugate transform divided by N.
  std::vector<Complex> Inverse(std::span<const Complex> x) const {
    std::vector<Complex> conj(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) conj[i] = std::conj(x[i]);
    std::vector<Complex> y = Forward(std::span<const Complex>(conj));
    const double scale = 1.0 / static_cast<double>(n_);
    for (auto& v : y) v = std::conj(v) * scale;
    return y;
  }

 private:
  static std::size_t SmallestFactor(std::size_t n) {
    if (n % 2 == 0) return 2;
    for (std::size_t p = 3; p * p <= n; p += 2) {
      if (n % p == 0) return p;
    }
    return n;
  }

  // Transforms n elements read from `in` with the given stride into `out`.
  void Recurse(const Complex* in, std::size_t stride, std::size_t n, Complex* out) const {
    if (n == 1) {
      out[0] = in[0];
      return;
    }
    const std::size_t p = SmallestFactor(n);
    const std::size_t m = n / p;
    // Sub-transform r lands in out[r*m, (r+1)*m).
    for (std::size_t r = 0; r < p; ++r) Recurse(in + r * stride, stride * p, m, out + r * m);
    // Twiddle index for size n at exponent e is e * (n_/n) in the master table.
    const std::size_t tw_stride = n_ / n;
    std::vector<Complex> scratch(p);
    std::vector<Complex> combined(n);
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t r = 0; r < p; ++r) scratch[r] = out[r * m + k];
      for (std::size_t q = 0; q < p; ++q) {
        const std::size_t bin = k + q * m;
        Complex acc = scratch[0];
        for (std::size_t r = 1; r < p; ++r) {
          acc += twiddle_[((r * bin) % n) * tw_stride] * scratch[r];
        }
        combined[bin] = acc;
      }
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = combined[i];
  }

  std::size_t n_;
  std::vector<Complex> twiddle_;
};

}  // namespace spoofshap::dsp

#endif  // SPOOFSHAP_DSP_FFT_HPP_
