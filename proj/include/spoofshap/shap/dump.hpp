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

#ifndef SPOOFSHAP_SHAP_DUMP_HPP_
#define SPOOFSHAP_SHAP_DUMP_HPP_

#include <string>

#include "spoofshap/error.hpp"
#include "spoofshap/io.hpp"
#include "spoofshap/shap/attribution.hpp"

namespace spoofshap::shap {

struct AttributionRecord {
  std::string utt_id;
  std::string model_checkpoint_hash;
  AttributionMap map;
};

inline Json AttributionSidecar(const AttributionRecord& r) {
  return {{"utt_id", r.utt_id},
          {"class", r.map.class_index},
          {"target", ToString(r.map.target)},
          {"phi0", r.map.phi0},
          {"n_samples", r.map.n_samples},
          {"seed", r.map.seed},
          {"shape", r.map.shape},
          {"estimator", r.map.estimator},
          {"model_checkpoint_hash", r.model_checkpoint_hash}};
}

// <path> holds float32 phi; <path>.json holds the metadata.
inline void SaveAttribution(const AttributionRecord& r, const fs::path& path) {
  WriteFileBytes(path, EncodeFloat32(std::span<const double>(r.map.phi)));
  WriteJson(fs::path(path.string() + ".json"), AttributionSidecar(r));
}

inline AttributionRecord LoadAttribution(const fs::path& path) {
  const Json meta = ReadJson(fs::path(path.string() + ".json"));
  AttributionRecord r;
  try {
    r.utt_id = meta.at("utt_id").get<std::string>();
    r.model_checkpoint_hash = meta.value("model_checkpoint_hash", "");
    r.map.class_index = meta.at("class").get<std::size_t>();
    r.map.target = TargetFromString(meta.at("target").get<std::string>());
    r.map.phi0 = meta.at("phi0").get<double>();
    r.map.n_samples = meta.value("n_samples", std::size_t{0});
    r.map.seed = meta.value("seed", std::uint64_t{0});
    r.map.shape = meta.at("shape").get<autodiff::Shape>();
    r.map.estimator = meta.value("estimator", "");
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kFormat, path.string() + ".json: " + e.what());
  }
  const auto values = DecodeFloat32(ReadFileBytes(path));
  if (values.size() != autodiff::NumElements(r.map.shape)) {
    Fail(ErrorCode::kFormat, path.string() + ": attribution size does not match its shape");
  }
  r.map.phi.assign(values.begin(), values.end());
  return r;
}

}  // namespace spoofshap::shap

#endif  // SPOOFSHAP_SHAP_DUMP_HPP_
