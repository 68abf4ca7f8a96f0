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

#include "csrover/rover.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "csrover/error.h"

namespace csrover {

std::vector<Token> Hypothesis::PlainTokens() const {
  std::vector<Token> out;
  out.reserve(tokens.size());
  for (const ScoredToken& t : tokens) out.push_back(t.token);
  return out;
}

HypothesisMap SystemOutput::ToHypothesisMap() const {
  HypothesisMap out;
  for (const auto& [id, hyp] : hypotheses) out.emplace(id, hyp.PlainTokens());
  return out;
}

std::vector<ScoredToken> WordTransitionNetwork::SystemPath(std::size_t k) const {
  std::vector<ScoredToken> path;
  for (const CorrespondenceSet& set : sets) {
    if (set.slots.at(k)) path.push_back(*set.slots[k]);
  }
  return path;
}

std::string_view VoteStatName(VoteStat stat) {
  switch (stat) {
    case VoteStat::kMaxConf: return "max-conf";
    case VoteStat::kAvgConf: return "avg-conf";
    case VoteStat::kFrequencyOnly: return "frequency";
  }
  return "?";
}

std::optional<VoteStat> ParseVoteStat(std::string_view name) {
  if (name == "max-conf") return VoteStat::kMaxConf;
  if (name == "avg-conf") return VoteStat::kAvgConf;
  if (name == "frequency") return VoteStat::kFrequencyOnly;
  return std::nullopt;
}

void VoteConfig::Validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ValidationError("vote alpha must be in [0, 1]");
  }
  if (!(null_conf >= 0.0 && null_conf <= 1.0)) {
    throw ValidationError("vote null_conf must be in [0, 1]");
  }
}

namespace {

void CheckConfidences(const std::string& system_id, const Hypothesis& hyp) {
  for (const ScoredToken& t : hyp.tokens) {
    if (!(t.confidence >= 0.0 && t.confidence <= 1.0)) {
      throw ValidationError("system '" + system_id + "' utterance '" +
                            hyp.utt_id + "': confidence outside [0, 1]");
    }
  }
}

bool SetContains(const CorrespondenceSet& set, const Token& token) {
  return std::any_of(set.slots.begin(), set.slots.end(),
                     [&](const auto& slot) { return slot && slot->token == token; });
}

// Aligns one more hypothesis against the network built so far, using the
// same forward-trace preference as Align: consume both, then delete (NULL
// for the incoming system), then insert (a new set NULL for earlier
// systems).
void MergeInto(WordTransitionNetwork& wtn, const Hypothesis& hyp) {
  const auto& sets = wtn.sets;
  const auto& tokens = hyp.tokens;
  const std::size_t n = sets.size();
  const std::size_t m = tokens.size();
  const std::size_t prior = wtn.merged_systems.size();
  const std::size_t stride = m + 1;
  std::vector<std::size_t> cost((n + 1) * stride);
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& {
    return cost[i * stride + j];
  };
  auto sub_cost = [&](std::size_t i, std::size_t j) -> std::size_t {
    return SetContains(sets[i], tokens[j].token) ? 0 : 1;
  };
  for (std::size_t i = n + 1; i-- > 0;) {
    for (std::size_t j = m + 1; j-- > 0;) {
      if (i == n) {
        at(i, j) = m - j;
      } else if (j == m) {
        at(i, j) = n - i;
      } else {
        at(i, j) = std::min({at(i + 1, j + 1) + sub_cost(i, j),
                             at(i + 1, j) + 1, at(i, j + 1) + 1});
      }
    }
  }

  std::vector<CorrespondenceSet> merged;
  merged.reserve(std::max(n, m));
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && at(i, j) == at(i + 1, j + 1) + sub_cost(i, j)) {
      merged.push_back(sets[i]);
      merged.back().slots.push_back(tokens[j]);
      ++i;
      ++j;
    } else if (i < n && at(i, j) == at(i + 1, j) + 1) {
      merged.push_back(sets[i]);
      merged.back().slots.push_back(std::nullopt);
      ++i;
    } else {
      CorrespondenceSet fresh;
      fresh.slots.assign(prior, std::nullopt);
      fresh.slots.push_back(tokens[j]);
      merged.push_back(std::move(fresh));
      ++j;
    }
  }
  wtn.sets = std::move(merged);
}

}  // namespace

WordTransitionNetwork BuildWtn(
    std::span<const std::pair<std::string, Hypothesis>> hyps) {
  if (hyps.empty()) throw ValidationError("BuildWtn needs at least one hypothesis");
  WordTransitionNetwork wtn;
  wtn.utt_id = hyps.front().second.utt_id;
  std::set<std::string_view> seen;
  for (const auto& [system_id, hyp] : hyps) {
    if (hyp.utt_id != wtn.utt_id) {
      throw ValidationError("mismatched utterance ids in network: '" +
                            wtn.utt_id + "' vs '" + hyp.utt_id + "'");
    }
    if (!seen.insert(system_id).second) {
      throw ValidationError("duplicate system id '" + system_id + "'");
    }
    CheckConfidences(system_id, hyp);
    MergeInto(wtn, hyp);
    wtn.merged_systems.push_back(system_id);
  }
  return wtn;
}

Hypothesis Vote(const WordTransitionNetwork& wtn, const VoteConfig& cfg) {
  cfg.Validate();
  const double alpha = cfg.EffectiveAlpha();
  Hypothesis out{wtn.utt_id, {}};

  struct Candidate {
    const Token* token;  // nullptr for NULL
    std::size_t count = 0;
    double conf_max = 0.0;
    double conf_sum = 0.0;
  };

  for (const CorrespondenceSet& set : wtn.sets) {
    const double total_slots = static_cast<double>(set.slots.size());
    if (set.slots.empty()) throw InvariantError("correspondence set without slots");
    // Candidates in order of first appearance in merge order.
    std::vector<Candidate> candidates;
    Candidate null_candidate{nullptr};
    for (const auto& slot : set.slots) {
      if (!slot) {
        ++null_candidate.count;
        continue;
      }
      auto it = std::find_if(candidates.begin(), candidates.end(),
                             [&](const Candidate& c) { return *c.token == slot->token; });
      if (it == candidates.end()) {
        candidates.push_back({&slot->token, 0, slot->confidence, 0.0});
        it = candidates.end() - 1;
      }
      ++it->count;
      it->conf_max = std::max(it->conf_max, slot->confidence);
      it->conf_sum += slot->confidence;
    }
    if (candidates.empty()) throw InvariantError("correspondence set of only NULLs");

    auto score = [&](const Candidate& c) {
      double conf = 0.0;
      if (c.token == nullptr) {
        conf = cfg.null_conf;
      } else if (cfg.stat == VoteStat::kMaxConf) {
        conf = c.conf_max;
      } else if (cfg.stat == VoteStat::kAvgConf) {
        conf = c.conf_sum / static_cast<double>(c.count);
      }
      return alpha * static_cast<double>(c.count) / total_slots +
             (1.0 - alpha) * conf;
    };

    const Candidate* best = &candidates.front();
    double best_score = score(*best);
    for (std::size_t k = 1; k < candidates.size(); ++k) {
      const double s = score(candidates[k]);
      if (s > best_score) {
        best = &candidates[k];
        best_score = s;
      }
    }
    if (null_candidate.count > 0 && score(null_candidate) > best_score) continue;
    out.tokens.push_back({*best->token, std::clamp(best_score, 0.0, 1.0)});
  }
  return out;
}

std::string CombinedSystemId(std::span<const std::string> member_ids) {
  std::string id = "ROVER(";
  for (std::size_t k = 0; k < member_ids.size(); ++k) {
    if (k > 0) id += ",";
    id += member_ids[k];
  }
  return id + ")";
}

SystemOutput Combine(std::span<const SystemOutput> outputs,
                     const VoteConfig& cfg) {
  if (outputs.empty()) throw ValidationError("Combine needs at least one system");
  cfg.Validate();
  std::vector<const SystemOutput*> members;
  for (const SystemOutput& o : outputs) members.push_back(&o);
  std::stable_sort(members.begin(), members.end(),
                   [](const SystemOutput* a, const SystemOutput* b) {
                     return a->system_id < b->system_id;
                   });

  std::vector<std::string> ids;
  for (const SystemOutput* m : members) ids.push_back(m->system_id);
  for (std::size_t k = 1; k < ids.size(); ++k) {
    if (ids[k] == ids[k - 1]) {
      throw ValidationError("duplicate system id '" + ids[k] + "' in combination");
    }
  }
  const auto& keys = members.front()->hypotheses;
  for (const SystemOutput* m : members) {
    bool same = m->hypotheses.size() == keys.size() &&
                std::equal(keys.begin(), keys.end(), m->hypotheses.begin(),
                           [](const auto& a, const auto& b) { return a.first == b.first; });
    if (!same) {
      throw ValidationError("system '" + m->system_id + "' covers a different utterance set than '" +
                            members.front()->system_id + "'");
    }
  }

  SystemOutput combined{CombinedSystemId(ids), {}};
  std::vector<std::pair<std::string, Hypothesis>> column;
  for (const auto& [utt_id, unused] : keys) {
    column.clear();
    for (const SystemOutput* m : members) {
      const Hypothesis& hyp = m->hypotheses.at(utt_id);
      if (hyp.utt_id != utt_id) {
        throw ValidationError("system '" + m->system_id + "' stores utterance '" +
                              hyp.utt_id + "' under key '" + utt_id + "'");
      }
      column.emplace_back(m->system_id, hyp);
    }
    combined.hypotheses.emplace(utt_id, Vote(BuildWtn(column), cfg));
  }
  return combined;
}

}  // namespace csrover
