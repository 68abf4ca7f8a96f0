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

// Reference implementations shared by the unit and acceptance tests. They
// are deliberately naive.

#ifndef CSROVER_TESTS_ORACLES_H_
#define CSROVER_TESTS_ORACLES_H_

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "csrover/core_model.h"
#include "csrover/random.h"
#include "csrover/rover.h"
#include "csrover/scoring.h"

namespace csrover::testing {

// The four-symbol alphabet of the alignment oracle: two English words and
// two Mandarin characters.
inline std::vector<Token> OracleVocabulary() {
  return {{"a", LanguageTag::kEng}, {"b", LanguageTag::kEng},
          {"我", LanguageTag::kMan}, {"是", LanguageTag::kMan}};
}

// Every sequence over vocab of length <= max_len.
inline std::vector<std::vector<Token>> AllSequences(const std::vector<Token>& vocab,
                                                    std::size_t max_len) {
  std::vector<std::vector<Token>> out = {{}};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (const Token& t : vocab) {
        std::vector<Token> next = out[i];
        next.push_back(t);
        out.push_back(std::move(next));
      }
    }
    begin = end;
  }
  return out;
}

// Depth-first enumeration of every edit script, steps tried in the order
// consume-both, delete, insert. A branch is abandoned only once it cannot
// beat the best complete script found so far, so the first script reaching
// the optimum is also the lexicographically first optimal one.
class BruteForceAligner {
 public:
  BruteForceAligner(std::span<const Token> ref, std::span<const Token> hyp)
      : ref_(ref), hyp_(hyp) {
    Search(0, 0, 0);
    std::size_t i = 0, j = 0;
    for (const EditKind kind : best_kinds_) {
      switch (kind) {
        case EditKind::kMatch:
        case EditKind::kSub: best_.push_back({kind, ref_[i++], hyp_[j++]}); break;
        case EditKind::kDel: best_.push_back({kind, ref_[i++], std::nullopt}); break;
        case EditKind::kIns: best_.push_back({kind, std::nullopt, hyp_[j++]}); break;
      }
    }
  }

  std::size_t cost() const { return best_cost_; }
  const std::vector<AlignmentOp>& script() const { return best_; }

 private:
  // Only op kinds are tracked during the search; tokens are filled in once.
  void Search(std::size_t i, std::size_t j, std::size_t cost) {
    const std::size_t rest_i = ref_.size() - i;
    const std::size_t rest_j = hyp_.size() - j;
    const std::size_t bound = rest_i > rest_j ? rest_i - rest_j : rest_j - rest_i;
    if (cost + bound >= best_cost_) return;
    if (rest_i == 0 && rest_j == 0) {
      best_cost_ = cost;
      best_kinds_ = current_;
      return;
    }
    if (rest_i > 0 && rest_j > 0) {
      const bool same = ref_[i] == hyp_[j];
      current_.push_back(same ? EditKind::kMatch : EditKind::kSub);
      Search(i + 1, j + 1, cost + (same ? 0 : 1));
      current_.pop_back();
    }
    if (rest_i > 0) {
      current_.push_back(EditKind::kDel);
      Search(i + 1, j, cost + 1);
      current_.pop_back();
    }
    if (rest_j > 0) {
      current_.push_back(EditKind::kIns);
      Search(i, j + 1, cost + 1);
      current_.pop_back();
    }
  }

  std::span<const Token> ref_;
  std::span<const Token> hyp_;
  std::vector<EditKind> current_;
  std::vector<EditKind> best_kinds_;
  std::vector<AlignmentOp> best_;
  std::size_t best_cost_ = std::numeric_limits<std::size_t>::max();
};

// Applies an edit script to ref. Returns nullopt if the script does not fit
// ref or carries an inconsistent op.
inline std::optional<std::vector<Token>> ReplayScript(std::span<const Token> ref,
                                                      std::span<const AlignmentOp> ops) {
  std::vector<Token> out;
  std::size_t i = 0;
  for (const AlignmentOp& op : ops) {
    switch (op.kind) {
      case EditKind::kMatch:
        if (i >= ref.size() || !op.ref || !op.hyp || *op.ref != ref[i] || *op.hyp != ref[i]) {
          return std::nullopt;
        }
        out.push_back(ref[i++]);
        break;
      case EditKind::kSub:
        if (i >= ref.size() || !op.ref || !op.hyp || *op.ref != ref[i] || *op.hyp == ref[i]) {
          return std::nullopt;
        }
        out.push_back(*op.hyp);
        ++i;
        break;
      case EditKind::kDel:
        if (i >= ref.size() || !op.ref || op.hyp || *op.ref != ref[i]) return std::nullopt;
        ++i;
        break;
      case EditKind::kIns:
        if (!op.hyp || op.ref) return std::nullopt;
        out.push_back(*op.hyp);
        break;
    }
  }
  if (i != ref.size()) return std::nullopt;
  return out;
}

// A random hypothesis over a small mixed vocabulary, so that merges see
// plenty of both matches and mismatches.
inline Hypothesis RandomHypothesis(Rng& rng, const std::string& utt_id, std::size_t max_len) {
  static const std::vector<Token> vocab = {
      {"a", LanguageTag::kEng}, {"b", LanguageTag::kEng}, {"c", LanguageTag::kEng},
      {"我", LanguageTag::kMan}, {"是", LanguageTag::kMan}, {"茶", LanguageTag::kMan}};
  Hypothesis h{utt_id, {}};
  const std::size_t len = rng.Index(max_len + 1);
  for (std::size_t k = 0; k < len; ++k) {
    h.tokens.push_back({vocab[rng.Index(vocab.size())], rng.Uniform()});
  }
  return h;
}

// True if every merged system's non-NULL slots, read in set order, give back
// exactly its input tokens and confidences.
inline bool PathsPreserved(const WordTransitionNetwork& wtn,
                           std::span<const std::pair<std::string, Hypothesis>> inputs) {
  if (wtn.merged_systems.size() != inputs.size()) return false;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    std::vector<ScoredToken> path;
    for (const CorrespondenceSet& set : wtn.sets) {
      if (set.slots.size() != inputs.size()) return false;
      if (set.slots[k]) path.push_back(*set.slots[k]);
    }
    if (path != inputs[k].second.tokens) return false;
  }
  return true;
}

}  // namespace csrover::testing

#endif  // CSROVER_TESTS_ORACLES_H_
