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

#include "csrover/scoring.h"

#include <algorithm>
#include <cstdio>

#include "csrover/error.h"

namespace csrover {

std::vector<AlignmentOp> Align(std::span<const Token> ref,
                               std::span<const Token> hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  const std::size_t stride = m + 1;
  // cost[i * stride + j] = cost of aligning ref[i..] with hyp[j..]. Working
  // on suffixes lets the trace run forward from (0, 0), which is where the
  // preference order is applied.
  std::vector<std::size_t> cost((n + 1) * stride);
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& {
    return cost[i * stride + j];
  };
  for (std::size_t i = n + 1; i-- > 0;) {
    for (std::size_t j = m + 1; j-- > 0;) {
      if (i == n) {
        at(i, j) = m - j;
      } else if (j == m) {
        at(i, j) = n - i;
      } else {
        const std::size_t diag = at(i + 1, j + 1) + (ref[i] == hyp[j] ? 0 : 1);
        at(i, j) = std::min({diag, at(i + 1, j) + 1, at(i, j + 1) + 1});
      }
    }
  }

  std::vector<AlignmentOp> ops;
  ops.reserve(std::max(n, m));
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n || j < m) {
    if (i < n && j < m) {
      const bool same = ref[i] == hyp[j];
      if (at(i, j) == at(i + 1, j + 1) + (same ? 0 : 1)) {
        ops.push_back({same ? EditKind::kMatch : EditKind::kSub, ref[i], hyp[j]});
        ++i;
        ++j;
        continue;
      }
    }
    if (i < n && at(i, j) == at(i + 1, j) + 1) {
      ops.push_back({EditKind::kDel, ref[i], std::nullopt});
      ++i;
    } else {
      ops.push_back({EditKind::kIns, std::nullopt, hyp[j]});
      ++j;
    }
  }
  return ops;
}

std::size_t AlignmentCost(std::span<const AlignmentOp> ops) {
  return static_cast<std::size_t>(
      std::count_if(ops.begin(), ops.end(), [](const AlignmentOp& op) {
        return op.kind != EditKind::kMatch;
      }));
}

std::string_view ScopeName(ScoringScope scope) {
  return scope == ScoringScope::kByUtteranceCategory ? "category"
                                                     : "token-language";
}

std::optional<ScoringScope> ParseScope(std::string_view name) {
  if (name == "category") return ScoringScope::kByUtteranceCategory;
  if (name == "token-language") return ScoringScope::kByTokenLanguage;
  return std::nullopt;
}

std::optional<double> ErrorCounts::Rate() const {
  if (ref_tokens == 0) return std::nullopt;
  return 100.0 * static_cast<double>(errors()) /
         static_cast<double>(ref_tokens);
}

ErrorCounts& ErrorCounts::operator+=(const ErrorCounts& other) {
  ref_tokens += other.ref_tokens;
  subs += other.subs;
  ins += other.ins;
  dels += other.dels;
  return *this;
}

namespace {

const std::vector<Token>& LookupHypothesis(const HypothesisMap& hyps,
                                           const std::string& id) {
  auto it = hyps.find(id);
  if (it == hyps.end()) throw MissingHypothesisError(id);
  return it->second;
}

std::size_t LangIndex(LanguageTag lang) { return static_cast<std::size_t>(lang); }

}  // namespace

ErrorReport ScoreCorpus(const Corpus& refs, const HypothesisMap& hyps,
                        ScoringScope scope) {
  ErrorReport report;
  report.scope = scope;
  for (const Utterance& ref : refs.utterances()) {
    const auto& hyp = LookupHypothesis(hyps, ref.id);
    ErrorCounts utt;
    utt.ref_tokens = ref.tokens.size();
    for (const Token& t : ref.tokens) {
      ++report.by_language[LangIndex(t.lang)].ref_tokens;
    }
    for (const AlignmentOp& op : Align(ref.tokens, hyp)) {
      switch (op.kind) {
        case EditKind::kMatch:
          break;
        case EditKind::kSub:
          ++utt.subs;
          ++report.by_language[LangIndex(op.ref->lang)].subs;
          break;
        case EditKind::kDel:
          ++utt.dels;
          ++report.by_language[LangIndex(op.ref->lang)].dels;
          break;
        case EditKind::kIns:
          ++utt.ins;
          ++report.by_language[LangIndex(op.hyp->lang)].ins;
          break;
      }
    }
    report.by_category[static_cast<std::size_t>(CategorizeUtterance(ref))] +=
        utt;
    report.total += utt;
  }

  auto category_rate = [&](UtteranceCategory c) {
    return report.by_category[static_cast<std::size_t>(c)].Rate();
  };
  if (scope == ScoringScope::kByUtteranceCategory) {
    report.cer_man = category_rate(UtteranceCategory::kManOnly);
    report.wer_eng = category_rate(UtteranceCategory::kEngOnly);
  } else {
    report.cer_man = report.by_language[LangIndex(LanguageTag::kMan)].Rate();
    report.wer_eng = report.by_language[LangIndex(LanguageTag::kEng)].Rate();
  }
  report.mer_cs = category_rate(UtteranceCategory::kCodeSwitched);
  report.mer_all = report.total.Rate();
  return report;
}

std::optional<double> SubstitutionMatrix::pct_eng_as_man() const {
  if (eng_refs == 0) return std::nullopt;
  return 100.0 * static_cast<double>(eng_refs_subbed_by_man) /
         static_cast<double>(eng_refs);
}

std::optional<double> SubstitutionMatrix::pct_man_as_eng() const {
  if (man_refs == 0) return std::nullopt;
  return 100.0 * static_cast<double>(man_refs_subbed_by_eng) /
         static_cast<double>(man_refs);
}

SubstitutionMatrix ComputeSubstitutionMatrix(const Corpus& refs,
                                             const HypothesisMap& hyps) {
  SubstitutionMatrix matrix;
  for (const Utterance& ref : refs.utterances()) {
    const auto& hyp = LookupHypothesis(hyps, ref.id);
    for (const Token& t : ref.tokens) {
      ++(t.lang == LanguageTag::kEng ? matrix.eng_refs : matrix.man_refs);
    }
    for (const AlignmentOp& op : Align(ref.tokens, hyp)) {
      if (op.kind != EditKind::kSub || op.ref->lang == op.hyp->lang) continue;
      ++(op.ref->lang == LanguageTag::kEng ? matrix.eng_refs_subbed_by_man
                                           : matrix.man_refs_subbed_by_eng);
    }
  }
  return matrix;
}

std::string FormatRate(const std::optional<double>& rate) {
  if (!rate) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", *rate);
  return buf;
}

}  // namespace csrover
