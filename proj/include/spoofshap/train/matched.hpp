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

#ifndef SPOOFSHAP_TRAIN_MATCHED_HPP_
#define SPOOFSHAP_TRAIN_MATCHED_HPP_

#include <map>
#include <string>
#include <vector>

#include "spoofshap/error.hpp"
#include "spoofshap/parallel.hpp"
#include "spoofshap/train/trainer.hpp"

namespace spoofshap::train {

// All bona fide examples plus those of one attack.
inline std::vector<Example> SelectMatched(const std::vector<Example>& examples, const std::string& attack_id) {
  std::vector<Example> out;
  for (const auto& e : examples) {
    if (e.label == model::kBonafideClass || e.attack_id == attack_id) out.push_back(e);
  }
  return out;
}

inline std::vector<std::string> AttackIdsOf(const std::vector<Example>& examples) {
  std::vector<std::string> ids;
  for (const auto& e : examples) {
    if (e.label == model::kSpoofClass && std::find(ids.begin(), ids.end(), e.attack_id) == ids.end()) {
      ids.push_back(e.attack_id);
    }
  }
  return ids;
}

// Trains one fresh model per attack on matched data only, validating on the
// matching subset of the held-out partition. Trainings are independent, so
// they may run concurrently; each derives its seed from the attack id.
inline std::map<std::string, TrainResult> MatchedAttackProtocol(const std::vector<Example>& train_set,
                                                                 const std::vector<Example>& val_set,
                                                                 const ModelConfig& model_config,
                                                                 const TrainConfig& cfg,
                                                                 std::vector<std::string> attacks = {},
                                                                 std::size_t threads = 1) {
  if (attacks.empty()) attacks = AttackIdsOf(train_set);
  Require(!attacks.empty(), "matched-attack protocol needs at least one attack");
  std::vector<std::vector<Example>> train_parts, val_parts;
  for (const auto& a : attacks) {
    train_parts.push_back(SelectMatched(train_set, a));
    val_parts.push_back(SelectMatched(val_set, a));
    auto has_attack = [&](const std::vector<Example>& v) {
      return std::any_of(v.begin(), v.end(), [&](const Example& e) { return e.attack_id == a; });
    };
    if (!has_attack(train_parts.back()) || !has_attack(val_parts.back())) {
      Fail(ErrorCode::kInvalidArgument, "attack " + a + " has zero utterances");
    }
  }
  std::vector<TrainResult> results(attacks.size());
  ParallelFor(attacks.size(), threads, [&](std::size_t i) {
    TrainConfig c = cfg;
    c.seed = DeriveSeed(cfg.seed, "matched", attacks[i]);
    results[i] = Train(train_parts[i], val_parts[i], model_config, c);
  });
  std::map<std::string, TrainResult> out;
  for (std::size_t i = 0; i < attacks.size(); ++i) out.emplace(attacks[i], std::move(results[i]));
  return out;
}

}  // namespace spoofshap::train

#endif  // SPOOFSHAP_TRAIN_MATCHED_HPP_
