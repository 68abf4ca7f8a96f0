// Copyright 2026 The csrover Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// ROVER system combination. Hypotheses from several systems are merged one
// at a time into a word transition network (an ordered list of
// correspondence sets holding one slot per system) and each set is then
// decided by a vote mixing slot frequency with a confidence statistic.

#ifndef CSROVER_ROVER_H_
#define CSROVER_ROVER_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "csrover/core_model.h"
#include "csrover/scoring.h"

namespace csrover {

struct ScoredToken {
  Token token;
  double confidence = 1.0;  // in [0, 1]

  friend bool operator==(const ScoredToken&, const ScoredToken&) = default;
};

struct Hypothesis {
  std::string utt_id;
  std::vector<ScoredToken> tokens;

  std::vector<Token> PlainTokens() const;
  friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
};

struct SystemOutput {
  std::string system_id;
  std::map<std::string, Hypothesis> hypotheses;

  HypothesisMap ToHypothesisMap() const;
  friend bool operator==(const SystemOutput&, const SystemOutput&) = default;
};

// One column of the network. slots[k] belongs to the k-th merged system;
// nullopt is NULL.
struct CorrespondenceSet {
  std::vector<std::optional<ScoredToken>> slots;
};

struct WordTransitionNetwork {
  std::string utt_id;
  std::vector<CorrespondenceSet> sets;
  std::vector<std::string> merged_systems;

  // The token sequence contributed by the k-th merged system.
  std::vector<ScoredToken> SystemPath(std::size_t k) const;
};

enum class VoteStat { kMaxConf, kAvgConf, kFrequencyOnly };

std::string_view VoteStatName(VoteStat stat);
// "max-conf" / "avg-conf" / "frequency"; nullopt otherwise.
std::optional<VoteStat> ParseVoteStat(std::string_view name);

struct VoteConfig {
  double alpha = 0.0;
  double null_conf = 0.7;
  VoteStat stat = VoteStat::kMaxConf;

  // alpha after applying the kFrequencyOnly override.
  double EffectiveAlpha() const {
    return stat == VoteStat::kFrequencyOnly ? 1.0 : alpha;
  }
  // Throws ValidationError for values outside [0, 1].
  void Validate() const;
};

// Merges hypotheses in the given order. Throws ValidationError for an empty
// input, mismatched utterance ids, duplicate system ids, or confidences
// outside [0, 1].
WordTransitionNetwork BuildWtn(
    std::span<const std::pair<std::string, Hypothesis>> hyps);

// Per set, candidate w scores
//   alpha * N(w) / Ns + (1 - alpha) * C(w)
// where C is the max or mean confidence of w's occurrences, and null_conf
// for NULL. Exact ties go to the candidate first seen in merge order; NULL
// never wins a tie. Winners are emitted with their score as confidence.
Hypothesis Vote(const WordTransitionNetwork& wtn, const VoteConfig& cfg);

// Sorts members by system_id, then builds and votes a network per
// utterance. Throws ValidationError when members disagree on utterance ids.
SystemOutput Combine(std::span<const SystemOutput> outputs,
                     const VoteConfig& cfg);

std::string CombinedSystemId(std::span<const std::string> member_ids);

}  // namespace csrover

#endif  // CSROVER_ROVER_H_
