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

#ifndef SPOOFSHAP_ANALYSIS_COHORT_HPP_
#define SPOOFSHAP_ANALYSIS_COHORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spoofshap/analysis/aggregate.hpp"
#include "spoofshap/analysis/prune.hpp"
#include "spoofshap/corpus/manifest.hpp"
#include "spoofshap/dsp/vad.hpp"
#include "spoofshap/error.hpp"
#include "spoofshap/io.hpp"
#include "spoofshap/random.hpp"

namespace spoofshap::analysis {

struct CohortConfig {
  double fraction = 0.002;
  std::vector<double> band_edges_hz = {kDefaultLowEdgeHz, kDefaultHighEdgeHz};
  double leading_s = 0.5;
  std::size_t n_per_attack = 100;
};

// Statistics of one utterance's pruned attribution.
struct UtteranceStats {
  std::string utt_id;
  std::string attack_id;
  double speech_mass_fraction = 0.0;
  std::optional<double> density_ratio;
  std::vector<double> band_fractions;  // empty for waveform attributions
  double leading_fraction = 0.0;
  std::optional<double> enrichment;    // set when ground-truth regions exist
  bool all_zero = false;
};

inline UtteranceStats ComputeUtteranceStats(const std::string& utt_id, const std::string& attack_id,
                                            const std::vector<double>& phi, const FeatureLayout& layout,
                                            const dsp::VadMask& vad,
                                            const std::vector<corpus::ArtefactRegion>& regions,
                                            const CohortConfig& config) {
  UtteranceStats s;
  s.utt_id = utt_id;
  s.attack_id = attack_id;
  const std::vector<double> positive = [&] {
    std::vector<double> p(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) p[i] = std::max(phi[i], 0.0);
    return p;
  }();
  const PruneMask mask = PruneTopFraction(positive, config.fraction);
  s.all_zero = mask.all_zero;
  s.density_ratio = AggregateSegments(positive, vad, layout).density_ratio;
  s.speech_mass_fraction =
      MaskedMassFraction(positive, mask, [&](std::size_t i) { return vad.speech[layout.FrameOf(i)]; });
  const auto [lead_begin, lead_end] = LeadingFrames(vad, layout, config.leading_s);
  s.leading_fraction = MaskedMassFraction(positive, mask, [&](std::size_t i) {
    const std::size_t n = layout.FrameOf(i);
    return n >= lead_begin && n < lead_end;
  });
  if (layout.spectral) s.band_fractions = BandFractions(mask, layout, config.band_edges_hz);
  if (!regions.empty()) s.enrichment = LocalizationEnrichment(mask, regions, layout);
  return s;
}

inline double Median(std::vector<double> v) {
  Require(!v.empty(), "median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct AttackSummary {
  std::size_t n = 0;
  std::vector<std::string> utt_ids;
  std::optional<double> speech_density_ratio_median;
  double speech_mass_fraction = 0.0;
  std::vector<double> band_fractions;
  double leading_fraction = 0.0;
  std::optional<double> enrichment_median;

  double low_band_fraction() const { return band_fractions.empty() ? 0.0 : band_fractions.front(); }
  double high_band_fraction() const { return band_fractions.empty() ? 0.0 : band_fractions.back(); }
};

using CohortSummary = std::map<std::string, AttackSummary>;

// Seeded sample of at most n ids, returned in id order.
inline std::vector<std::string> SampleCohort(std::vector<std::string> ids, std::size_t n, std::uint64_t seed,
                                             const std::string& attack_id) {
  std::sort(ids.begin(), ids.end());
  if (ids.size() > n) {
    Rng rng(DeriveSeed(seed, "cohort", attack_id));
    rng.Shuffle(ids);
    ids.resize(n);
    std::sort(ids.begin(), ids.end());
  }
  return ids;
}

// Fractions are averaged over the cohort; ratios are summarised by their
// median over the utterances where they are defined.
inline AttackSummary Summarize(const std::vector<const UtteranceStats*>& members) {
  Require(!members.empty(), "cohort is empty");
  AttackSummary a;
  a.n = members.size();
  std::vector<double> ratios, enrichments;
  a.band_fractions.assign(members.front()->band_fractions.size(), 0.0);
  for (const UtteranceStats* s : members) {
    a.utt_ids.push_back(s->utt_id);
    a.speech_mass_fraction += s->speech_mass_fraction;
    a.leading_fraction += s->leading_fraction;
    for (std::size_t b = 0; b < a.band_fractions.size(); ++b) a.band_fractions[b] += s->band_fractions.at(b);
    if (s->density_ratio) ratios.push_back(*s->density_ratio);
    if (s->enrichment) enrichments.push_back(*s->enrichment);
  }
  const double n = static_cast<double>(a.n);
  a.speech_mass_fraction /= n;
  a.leading_fraction /= n;
  for (double& b : a.band_fractions) b /= n;
  if (!ratios.empty()) a.speech_density_ratio_median = Median(ratios);
  if (!enrichments.empty()) a.enrichment_median = Median(enrichments);
  return a;
}

inline CohortSummary MakeCohortSummary(const std::vector<UtteranceStats>& stats,
                                       const std::vector<std::string>& attacks, std::size_t n_per_attack,
                                       std::uint64_t seed) {
  Require(n_per_attack >= 1, "n_per_attack must be at least 1");
  std::map<std::string, std::vector<const UtteranceStats*>> by_attack;
  std::map<std::string, const UtteranceStats*> by_id;
  for (const auto& s : stats) {
    by_attack[s.attack_id].push_back(&s);
    by_id[s.utt_id] = &s;
  }
  CohortSummary summary;
  for (const auto& attack : attacks) {
    const auto it = by_attack.find(attack);
    if (it == by_attack.end()) Fail(ErrorCode::kInvalidArgument, "attack " + attack + " absent from attribution set");
    std::vector<std::string> ids;
    for (const auto* s : it->second) ids.push_back(s->utt_id);
    std::vector<const UtteranceStats*> members;
    for (const auto& id : SampleCohort(ids, n_per_attack, seed, attack)) members.push_back(by_id.at(id));
    summary[attack] = Summarize(members);
  }
  return summary;
}

inline Json OptionalJson(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (std::isinf(*v)) return "inf";
  return *v;
}

inline Json CohortToJson(const CohortSummary& summary, const std::vector<double>& band_edges_hz) {
  Json out = Json::object();
  for (const auto& [attack, a] : summary) {
    Json j;
    j["n"] = a.n;
    j["speech_density_ratio_median"] = OptionalJson(a.speech_density_ratio_median);
    j["speech_mass_fraction"] = a.speech_mass_fraction;
    Json bands = Json::object();
    for (std::size_t b = 0; b < a.band_fractions.size(); ++b) {
      const std::string lo = b == 0 ? "0" : std::to_string(static_cast<long>(band_edges_hz[b - 1]));
      const std::string hi = b < band_edges_hz.size() ? std::to_string(static_cast<long>(band_edges_hz[b])) : "nyquist";
      bands[lo + "-" + hi] = a.band_fractions[b];
    }
    j["band_fractions"] = bands;
    j["leading_0.5s_fraction"] = a.leading_fraction;
    j["enrichment_median"] = OptionalJson(a.enrichment_median);
    j["utt_ids"] = a.utt_ids;
    out[attack] = j;
  }
  return out;
}

}  // namespace spoofshap::analysis

#endif  // SPOOFSHAP_ANALYSIS_COHORT_HPP_
