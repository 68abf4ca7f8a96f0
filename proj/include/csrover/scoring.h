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

// Levenshtein alignment of token sequences and the mixed-language error
// metrics built on it: CER over Mandarin, WER over English, MER over
// code-switched and all utterances, and the cross-language substitution
// matrix.

#ifndef CSROVER_SCORING_H_
#define CSROVER_SCORING_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csrover/core_model.h"

namespace csrover {

enum class EditKind { kMatch, kSub, kIns, kDel };

struct AlignmentOp {
  EditKind kind;
  std::optional<Token> ref;  // absent for kIns
  std::optional<Token> hyp;  // absent for kDel

  friend bool operator==(const AlignmentOp&, const AlignmentOp&) = default;
};

// Minimum unit-cost edit script turning ref into hyp. A match requires equal
// surface and language. Among optimal scripts the one returned is the first
// in lexicographic order when each step is ranked consume-both < delete <
// insert, reading from the start of the sequences.
std::vector<AlignmentOp> Align(std::span<const Token> ref,
                               std::span<const Token> hyp);

// Number of non-match operations in a script.
std::size_t AlignmentCost(std::span<const AlignmentOp> ops);

using HypothesisMap = std::map<std::string, std::vector<Token>>;

enum class ScoringScope { kByUtteranceCategory, kByTokenLanguage };

std::string_view ScopeName(ScoringScope scope);
// "category" / "token-language"; nullopt otherwise.
std::optional<ScoringScope> ParseScope(std::string_view name);

struct ErrorCounts {
  std::uint64_t ref_tokens = 0;
  std::uint64_t subs = 0;
  std::uint64_t ins = 0;
  std::uint64_t dels = 0;

  std::uint64_t errors() const { return subs + ins + dels; }
  // 100 * errors / ref_tokens; nullopt when there are no reference tokens.
  std::optional<double> Rate() const;

  ErrorCounts& operator+=(const ErrorCounts& other);
  friend bool operator==(const ErrorCounts&, const ErrorCounts&) = default;
};

struct ErrorReport {
  ScoringScope scope = ScoringScope::kByUtteranceCategory;
  std::optional<double> cer_man;
  std::optional<double> wer_eng;
  std::optional<double> mer_cs;
  std::optional<double> mer_all;
  // Indexed by UtteranceCategory.
  std::array<ErrorCounts, 4> by_category{};
  // Indexed by LanguageTag. Deletions and substitutions go to the reference
  // token's language, insertions to the hypothesis token's language.
  std::array<ErrorCounts, 2> by_language{};
  ErrorCounts total;
};

struct SubstitutionMatrix {
  std::uint64_t eng_refs = 0;
  std::uint64_t eng_refs_subbed_by_man = 0;
  std::uint64_t man_refs = 0;
  std::uint64_t man_refs_subbed_by_eng = 0;

  // Both cells are denominated by reference tokens of the source language.
  std::optional<double> pct_eng_as_man() const;
  std::optional<double> pct_man_as_eng() const;
};

// Throws MissingHypothesisError if a reference id has no hypothesis.
ErrorReport ScoreCorpus(
    const Corpus& refs, const HypothesisMap& hyps,
    ScoringScope scope = ScoringScope::kByUtteranceCategory);

SubstitutionMatrix ComputeSubstitutionMatrix(const Corpus& refs,
                                             const HypothesisMap& hyps);

// One-decimal rendering used in reports; "n/a" for an undefined rate.
std::string FormatRate(const std::optional<double>& rate);

}  // namespace csrover

#endif  // CSROVER_SCORING_H_
