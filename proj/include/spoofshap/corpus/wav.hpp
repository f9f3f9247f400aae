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

#ifndef SPOOFSHAP_CORPUS_WAV_HPP_
#define SPOOFSHAP_CORPUS_WAV_HPP_

#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "spoofshap/error.hpp"
#include "spoofshap/io.hpp"

namespace spoofshap::corpus {

inline constexpr int kDefaultSampleRate = 16000;

// Mono audio, amplitudes nominally in [-1, 1].
struct Waveform {
  std::vector<float> samples;
  int sample_rate = kDefaultSampleRate;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

inline void ValidateWaveform(const Waveform& w) {
  Require(w.sample_rate > 0, "sample rate must be positive");
  Require(!w.samples.empty(), "waveform is empty");
  for (float s : w.samples) Require(std::isfinite(s), "waveform has non-finite samples");
}

namespace internal {

inline std::uint32_t ReadU32(const std::string& b, std::size_t at) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(b[at])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 3])) << 24;
}

inline std::uint16_t ReadU16(const std::string& b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                    static_cast<unsigned char>(b[at + 1]) << 8);
}

inline void PutU32(std::string& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void PutU16(std::string& b, std::uint16_t v) {
  b.push_back(static_cast<char>(v & 0xff));
  b.push_back(static_cast<char>(v >> 8));
}

}  // namespace internal

// Parses a RIFF/WAVE PCM16 mono byte string. Unknown chunks are skipped.
inline Waveform DecodeWav(const std::string& bytes, const std::string& name = "<memory>") {
  using internal::ReadU16;
  using internal::ReadU32;
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 ||
      bytes.compare(8, 4, "WAVE") != 0) {
    Fail(ErrorCode::kFormat, name + ": truncated header or not a RIFF/WAVE file");
  }
  std::size_t pos = 12;
  bool have_fmt = false;
  int channels = 0, bits = 0, format = 0;
  int sample_rate = 0;
  while (pos + 8 <= bytes.size()) {
    const std::string id = bytes.substr(pos, 4);
    const std::uint32_t size = ReadU32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (id == "fmt ") {
      if (size < 16 || body + 16 > bytes.size()) {
        Fail(ErrorCode::kFormat, name + ": truncated header (fmt chunk)");
      }
      format = ReadU16(bytes, body);
      channels = ReadU16(bytes, body + 2);
      sample_rate = static_cast<int>(ReadU32(bytes, body + 4));
      bits = ReadU16(bytes, body + 14);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) Fail(ErrorCode::kFormat, name + ": truncated header (data before fmt)");
      if (channels != 1) {
        Fail(ErrorCode::kFormat, name + ": unsupported channel count " + std::to_string(channels));
      }
      if (format != 1 || bits != 16) {
        Fail(ErrorCode::kFormat, name + ": unsupported encoding (PCM16 required)");
      }
      if (sample_rate <= 0) Fail(ErrorCode::kFormat, name + ": invalid sample rate");
      const std::size_t available = std::min<std::size_t>(size, bytes.size() - body);
      Waveform w;
      w.sample_rate = sample_rate;
      w.samples.resize(available / 2);
      for (std::size_t i = 0; i < w.samples.size(); ++i) {
        const auto q = static_cast<std::int16_t>(ReadU16(bytes, body + 2 * i));
        w.samples[i] = static_cast<float>(q) / 32768.0f;
      }
      return w;
    }
    pos = body + size + (size & 1);
  }
  Fail(ErrorCode::kFormat, name + ": truncated header (no data chunk)");
}

inline Waveform LoadWav(const fs::path& path) {
  if (!fs::exists(path)) Fail(ErrorCode::kIo, "missing file: " + path.string());
  return DecodeWav(ReadFileBytes(path), path.string());
}

inline std::string EncodeWav(const Waveform& w) {
  using internal::PutU16;
  using internal::PutU32;
  Require(!w.samples.empty(), "cannot write an empty waveform");
  Require(w.sample_rate > 0, "sample rate must be positive");
  const auto data_bytes = static_cast<std::uint32_t>(w.samples.size() * 2);
  std::string b;
  b.reserve(44 + data_bytes);
  b += "RIFF";
  PutU32(b, 36 + data_bytes);
  b += "WAVEfmt ";
  PutU32(b, 16);
  PutU16(b, 1);  // PCM
  PutU16(b, 1);  // mono
  PutU32(b, static_cast<std::uint32_t>(w.sample_rate));
  PutU32(b, static_cast<std::uint32_t>(w.sample_rate) * 2);
  PutU16(b, 2);
  PutU16(b, 16);
  b += "data";
  PutU32(b, data_bytes);
  for (float s : w.samples) {
    if (!(s >= -1.0f && s <= 1.0f)) Fail(ErrorCode::kInvalidArgument, "sample out of range");
    const long q = std::lround(static_cast<double>(s) * 32768.0);
    PutU16(b, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::clamp(q, -32768L, 32767L))));
  }
  return b;
}

inline void WriteWav(const Waveform& w, const fs::path& path) {
  WriteFileBytes(path, EncodeWav(w));
}

}  // namespace spoofshap::corpus

#endif  // SPOOFSHAP_CORPUS_WAV_HPP_
