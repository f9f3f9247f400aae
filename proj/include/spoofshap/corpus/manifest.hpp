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

#ifndef SPOOFSHAP_CORPUS_MANIFEST_HPP_
#define SPOOFSHAP_CORPUS_MANIFEST_HPP_

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "spoofshap/error.hpp"
#include "spoofshap/io.hpp"

namespace spoofshap::corpus {

enum class Key { kBonafide, kSpoof };
enum class Partition { kTrain, kDev, kEval };

inline const char* ToString(Key key) { return key == Key::kBonafide ? "bonafide" : "spoof"; }

inline const char* ToString(Partition p) {
  switch (p) {
    case Partition::kTrain: return "train";
    case Partition::kDev: return "dev";
    case Partition::kEval: return "eval";
  }
  return "?";
}

inline Partition PartitionFromString(const std::string& s) {
  if (s == "train") return Partition::kTrain;
  if (s == "dev") return Partition::kDev;
  if (s == "eval") return Partition::kEval;
  Fail(ErrorCode::kInvalidArgument, "unknown partition: " + s);
}

inline constexpr const char* kBonafideAttack = "-";

// Half-open sample interval [start, end) carrying an injected artefact.
struct ArtefactRegion {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string kind;

  bool operator==(const ArtefactRegion&) const = default;
};

struct UtteranceRecord {
  std::string utt_id;
  std::string speaker_id;
  std::string attack_id = kBonafideAttack;
  Key key = Key::kBonafide;
  fs::path audio_ref;
  std::vector<ArtefactRegion> artefact_regions;

  bool is_bonafide() const { return key == Key::kBonafide; }
};

struct CorpusManifest {
  std::vector<UtteranceRecord> records;
  Partition partition = Partition::kTrain;

  const UtteranceRecord* Find(const std::string& utt_id) const {
    for (const auto& r : records) {
      if (r.utt_id == utt_id) return &r;
    }
    return nullptr;
  }

  // Distinct spoof attack ids in first-seen order.
  std::vector<std::string> AttackIds() const {
    std::vector<std::string> ids;
    for (const auto& r : records) {
      if (!r.is_bonafide() &&
          std::find(ids.begin(), ids.end(), r.attack_id) == ids.end()) {
        ids.push_back(r.attack_id);
      }
    }
    return ids;
  }
};

// Protocol line: "speaker utt_id <ignored> attack key". Audio for utt_id is
// expected at <audio_dir>/<utt_id>.wav.
inline CorpusManifest ParseManifestText(const std::string& text, Partition partition,
                                        const fs::path& audio_dir,
                                        const std::string& name = "<manifest>") {
  CorpusManifest manifest;
  manifest.partition = partition;
  std::set<std::string> seen;
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::vector<std::string> cols;
    for (std::string f; fields >> f;) cols.push_back(f);
    if (cols.empty()) continue;
    const std::string where = name + ":" + std::to_string(line_no);
    if (cols.size() != 5) {
      Fail(ErrorCode::kFormat, where + ": expected 5 columns, found " +
                                   std::to_string(cols.size()));
    }
    UtteranceRecord r;
    r.speaker_id = cols[0];
    r.utt_id = cols[1];
    r.attack_id = cols[3];
    if (cols[4] == "bonafide") {
      r.key = Key::kBonafide;
    } else if (cols[4] == "spoof") {
      r.key = Key::kSpoof;
    } else {
      Fail(ErrorCode::kFormat, where + ": unknown key '" + cols[4] + "'");
    }
    if ((r.key == Key::kBonafide) != (r.attack_id == kBonafideAttack)) {
      Fail(ErrorCode::kFormat, where + ": attack/key mismatch");
    }
    if (!seen.insert(r.utt_id).second) {
      Fail(ErrorCode::kFormat, where + ": duplicate utt_id " + r.utt_id);
    }
    r.audio_ref = audio_dir / (r.utt_id + ".wav");
    manifest.records.push_back(std::move(r));
  }
  return manifest;
}

inline CorpusManifest ParseManifest(const fs::path& path, Partition partition,
                                    std::optional<fs::path> audio_dir = std::nullopt) {
  if (!fs::exists(path)) Fail(ErrorCode::kIo, "missing file: " + path.string());
  return ParseManifestText(ReadFileBytes(path), partition,
                           audio_dir.value_or(path.parent_path() / "wav"), path.string());
}

// Partition guessed from the file name ("train"/"trn", "dev", "eval").
inline CorpusManifest ParseManifest(const fs::path& path) {
  const std::string name = path.filename().string();
  Partition p = Partition::kTrain;
  if (name.find("eval") != std::string::npos) {
    p = Partition::kEval;
  } else if (name.find("dev") != std::string::npos) {
    p = Partition::kDev;
  }
  return ParseManifest(path, p);
}

// Canonical form: column 3 written as "-", LF line endings.
inline std::string SerializeManifest(const CorpusManifest& manifest) {
  std::string out;
  for (const auto& r : manifest.records) {
    out += r.speaker_id + " " + r.utt_id + " - " + r.attack_id + " " + ToString(r.key) + "\n";
  }
  return out;
}

// Ground-truth sidecar: {utt_id: [[start, end, kind], ...]}.
inline Json RegionsToJson(const CorpusManifest& manifest) {
  Json j = Json::object();
  for (const auto& r : manifest.records) {
    if (r.artefact_regions.empty()) continue;
    Json list = Json::array();
    for (const auto& reg : r.artefact_regions) list.push_back(Json::array({reg.start, reg.end, reg.kind}));
    j[r.utt_id] = std::move(list);
  }
  return j;
}

inline void AttachRegions(CorpusManifest& manifest, const Json& regions) {
  for (const auto& [utt_id, list] : regions.items()) {
    auto it = std::find_if(manifest.records.begin(), manifest.records.end(),
                           [&](const UtteranceRecord& r) { return r.utt_id == utt_id; });
    if (it == manifest.records.end()) {
      Fail(ErrorCode::kFormat, "regions reference unknown utt_id " + utt_id);
    }
    it->artefact_regions.clear();
    for (const auto& entry : list) {
      if (!entry.is_array() || entry.size() != 3) {
        Fail(ErrorCode::kFormat, "region for " + utt_id + " must be [start, end, kind]");
      }
      ArtefactRegion reg{entry[0].get<std::size_t>(), entry[1].get<std::size_t>(),
                         entry[2].get<std::string>()};
      if (reg.start >= reg.end) Fail(ErrorCode::kFormat, "empty region for " + utt_id);
      it->artefact_regions.push_back(std::move(reg));
    }
  }
}

}  // namespace spoofshap::corpus

#endif  // SPOOFSHAP_CORPUS_MANIFEST_HPP_
