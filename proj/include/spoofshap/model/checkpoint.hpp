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

#ifndef SPOOFSHAP_MODEL_CHECKPOINT_HPP_
#define SPOOFSHAP_MODEL_CHECKPOINT_HPP_

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spoofshap/error.hpp"
#include "spoofshap/io.hpp"
#include "spoofshap/model/model.hpp"

namespace spoofshap::model {

inline constexpr char kCheckpointMagic[8] = {'S', 'P', 'S', 'H', 'C', 'K', 'P', 'T'};
inline constexpr int kCheckpointFormatVersion = 1;

struct TrainingMetadata {
  std::uint64_t seed = 0;
  int epoch = -1;
  double val_eer = -1.0;
  Json extra = Json::object();

  Json ToJson() const {
    Json j = {{"seed", seed}, {"epoch", epoch}, {"val_eer", val_eer}};
    if (!extra.empty()) j["extra"] = extra;
    return j;
  }

  static TrainingMetadata FromJson(const Json& j) {
    TrainingMetadata m;
    m.seed = j.value("seed", std::uint64_t{0});
    m.epoch = j.value("epoch", -1);
    m.val_eer = j.value("val_eer", -1.0);
    if (j.contains("extra")) m.extra = j["extra"];
    return m;
  }
};

struct Checkpoint {
  ModelConfig config;
  std::vector<float> params;  // flattened in graph parameter order
  TrainingMetadata metadata;
};

inline std::vector<float> FlattenParams(const ParamSet<float>& params) {
  std::vector<float> flat;
  for (const auto& p : params) flat.insert(flat.end(), p.data.begin(), p.data.end());
  return flat;
}

inline ParamSet<float> UnflattenParams(const Graph& g, const std::vector<float>& flat) {
  if (flat.size() != g.NumParameters()) {
    Fail(ErrorCode::kFormat, "parameter count mismatch: file has " + std::to_string(flat.size()) +
                                 ", config requires " + std::to_string(g.NumParameters()));
  }
  ParamSet<float> out;
  std::size_t pos = 0;
  for (const auto& spec : g.params()) {
    Tensor<float> t(spec.shape);
    std::copy(flat.begin() + pos, flat.begin() + pos + t.size(), t.data.begin());
    pos += t.size();
    out.push_back(std::move(t));
  }
  return out;
}

inline Checkpoint MakeCheckpoint(const Model<float>& m, TrainingMetadata metadata) {
  return {m.config(), FlattenParams(m.params()), std::move(metadata)};
}

inline Model<float> ModelFromCheckpoint(const Checkpoint& c) {
  const Graph g = BuildGraph(c.config);
  return Model<float>(c.config, UnflattenParams(g, c.params));
}

inline std::string EncodeCheckpoint(const Checkpoint& c, int format_version = kCheckpointFormatVersion) {
  Json header = {{"format_version", format_version},
                 {"config", c.config.ToJson()},
                 {"metadata", c.metadata.ToJson()},
                 {"param_count", c.params.size()}};
  const std::string text = header.dump();
  std::string out(kCheckpointMagic, 8);
  const auto len = static_cast<std::uint32_t>(text.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((len >> (8 * i)) & 0xFF));
  out += text;
  out += EncodeFloat32(std::span<const float>(c.params));
  return out;
}

inline Checkpoint DecodeCheckpoint(std::string_view bytes, int expected_version = kCheckpointFormatVersion) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kCheckpointMagic, 8) != 0) {
    Fail(ErrorCode::kFormat, "not a spoofshap checkpoint");
  }
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes[8 + i])) << (8 * i);
  if (bytes.size() < 12 + static_cast<std::size_t>(len)) Fail(ErrorCode::kFormat, "truncated checkpoint header");
  Json header;
  try {
    header = Json::parse(bytes.substr(12, len));
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kFormat, std::string("corrupt checkpoint header: ") + e.what());
  }
  const int version = header.value("format_version", -1);
  if (version != expected_version) {
    Fail(ErrorCode::kFormat, "checkpoint format version " + std::to_string(version) +
                                 " is not supported (expected " + std::to_string(expected_version) + ")");
  }
  Checkpoint c;
  c.config = ModelConfig::FromJson(header.at("config"));
  c.metadata = TrainingMetadata::FromJson(header.value("metadata", Json::object()));
  const std::size_t declared = header.at("param_count").get<std::size_t>();
  const std::size_t required = BuildGraph(c.config).NumParameters();
  const std::size_t payload = bytes.size() - 12 - len;
  if (declared != required || payload != required * 4) {
    Fail(ErrorCode::kFormat, "parameter count mismatch: config requires " + std::to_string(required) +
                                 " parameters, file holds " + std::to_string(payload / 4) +
                                 (payload % 4 ? " and a partial value" : ""));
  }
  c.params = DecodeFloat32(bytes.substr(12 + len));
  return c;
}

inline void SaveCheckpoint(const Checkpoint& c, const fs::path& path) { WriteFileBytes(path, EncodeCheckpoint(c)); }

inline void SaveCheckpoint(const Model<float>& m, const TrainingMetadata& metadata, const fs::path& path) {
  SaveCheckpoint(MakeCheckpoint(m, metadata), path);
}

inline Checkpoint LoadCheckpoint(const fs::path& path, int expected_version = kCheckpointFormatVersion) {
  return DecodeCheckpoint(ReadFileBytes(path), expected_version);
}

inline Model<float> LoadModel(const fs::path& path) { return ModelFromCheckpoint(LoadCheckpoint(path)); }

}  // namespace spoofshap::model

#endif  // SPOOFSHAP_MODEL_CHECKPOINT_HPP_
