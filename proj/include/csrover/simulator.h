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

// Seeded stand-ins for recognizers trained on data that matches the target
// domain better in one language than the other. Each reference token is
// kept, substituted within its language, substituted by the other
// language, or deleted, with probabilities derived from the per-language
// match levels; insertions happen between positions.

#ifndef CSROVER_SIMULATOR_H_
#define CSROVER_SIMULATOR_H_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "csrover/core_model.h"
#include "csrover/lm.h"
#include "csrover/rover.h"

namespace csrover {

struct SystemProfile {
  std::string name;
  double match_eng = 1.0;
  double match_man = 1.0;
  std::uint64_t seed = 0;
  double kappa = 0.8;     // share of the residual that crosses languages
  double delta = 0.15;    // share of the residual that is deleted
  double ins_rate = 0.03; // per-position insertion probability
  int nbest_size = 4;

  double Match(LanguageTag lang) const {
    return lang == LanguageTag::kEng ? match_eng : match_man;
  }
  // Throws ValidationError naming the offending field.
  void Validate() const;
};

enum class NoiseEvent { kCorrect, kCrossSub, kSameSub, kDel };

std::string_view NoiseEventName(NoiseEvent event);

struct EventProbs {
  double p_correct = 1.0;
  double p_cross_sub = 0.0;
  double p_same_sub = 0.0;
  double p_del = 0.0;

  double Get(NoiseEvent event) const;
};

// With m own-language match and o other-language match:
//   correct = m, cross = (1-m) kappa o/(m+o), del = (1-m) delta,
//   same = the rest; cross and del shrink together if the rest would be
//   negative. The ratio o/(m+o) is 0.5 when both are zero.
EventProbs DeriveEventProbs(const SystemProfile& profile, LanguageTag lang);

// Substitution and insertion draws come from these, per language.
struct VocabPools {
  std::vector<Token> eng;
  std::vector<Token> man;

  const std::vector<Token>& For(LanguageTag lang) const {
    return lang == LanguageTag::kEng ? eng : man;
  }
  // Sorted distinct tokens of each language.
  static VocabPools FromCorpus(const Corpus& corpus);
};

// Optional bookkeeping for calibration tests. Event counts are indexed
// [LanguageTag][NoiseEvent] over top-1 reference positions.
struct SimulationTrace {
  std::array<std::array<std::uint64_t, 4>, 2> events{};
  std::uint64_t insertions = 0;
  double correct_conf_sum = 0.0;
  std::uint64_t correct_tokens = 0;
  double error_conf_sum = 0.0;
  std::uint64_t error_tokens = 0;
};

struct SimulationResult {
  SystemOutput output;                     // top-1 hypotheses
  std::map<std::string, NBestList> nbest;  // entry 0 is the top-1
};

// Deterministic in (profile.seed, utterance index); utterance k draws from
// substream k only. Correct tokens get confidence 0.5 + 0.5 Beta(8,2),
// erroneous ones 0.7 Beta(2,5). Deleted positions draw an error confidence
// too; it only enters the acoustic score, which is the sum of log
// confidences of the entry. N-best entries after the first re-sample every
// position the top-1 got wrong. Throws ValidationError for an empty pool.
SimulationResult SimulateSystem(const SystemProfile& profile, const Corpus& refs,
                                const VocabPools& pools,
                                SimulationTrace* trace = nullptr);

// Reference corpus generator. Each language has a fixed vocabulary and a
// sparse first-order transition table so that n-gram models have structure
// to learn.
struct SyntheticCorpusSpec {
  std::string name = "synthetic";
  std::size_t utterances = 2000;
  double frac_code_switched = 0.5;
  double frac_man_only = 0.25;  // the remainder is English-only
  std::size_t man_vocab = 300;
  std::size_t eng_vocab = 300;
  std::size_t successors = 6;
  std::size_t min_mono_length = 3;
  std::size_t max_mono_length = 12;
  std::size_t min_runs = 2;
  std::size_t max_runs = 4;
  std::size_t max_run_length = 5;
  std::uint64_t seed = 1;

  void Validate() const;
};

Corpus GenerateSyntheticCorpus(const SyntheticCorpusSpec& spec);

}  // namespace csrover

#endif  // CSROVER_SIMULATOR_H_
