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

// Witten-Bell trigram language models, linear interpolation of several of
// them, perplexity, and n-best rescoring.

#ifndef CSROVER_LM_H_
#define CSROVER_LM_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "csrover/core_model.h"
#include "csrover/rover.h"

namespace csrover {

inline constexpr double kDefaultUnkProb = 1e-6;

// Common query interface. Distributions are over Vocabulary() plus the end
// symbol plus one unknown-word class; any token outside the vocabulary is
// scored as the unknown class.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  // P(next | history). Only the last two history tokens matter; shorter
  // histories are padded with sentence-start symbols. next == nullptr asks
  // for the end symbol.
  virtual double Prob(std::span<const Token> history,
                      const Token* next) const = 0;
  // Mass of the unknown class given the history.
  virtual double UnkProb(std::span<const Token> history) const = 0;
  // Sorted.
  virtual const std::vector<Token>& Vocabulary() const = 0;
};

// Sum of log P over the tokens and the closing end symbol.
double SequenceLogProb(const LanguageModel& lm, std::span<const Token> tokens);
// exp(-total logprob / predicted symbols), end symbols included.
double Perplexity(const LanguageModel& lm, const Corpus& corpus);

class TrigramLM : public LanguageModel {
 public:
  // Throws ValidationError for an empty corpus or unk_prob outside (0, 1).
  static TrigramLM Train(const Corpus& corpus,
                         double unk_prob = kDefaultUnkProb);
  // Reads the format written by Save. Throws ValidationError on bad input.
  static TrigramLM Load(std::istream& in, std::string name = "");

  // Sorted n-gram count listing with a header line per setting.
  void Save(std::ostream& out) const;

  double Prob(std::span<const Token> history, const Token* next) const override;
  double UnkProb(std::span<const Token> history) const override;
  const std::vector<Token>& Vocabulary() const override { return vocab_; }

  const std::string& name() const { return name_; }
  double unk_prob() const { return unk_prob_; }
  bool Contains(const Token& token) const;

 private:
  using SymbolId = std::uint32_t;
  static constexpr SymbolId kBos = 0;
  static constexpr SymbolId kEos = 1;
  static constexpr SymbolId kUnk = 2;
  static constexpr SymbolId kFirstWord = 3;

  struct HistoryStats {
    std::uint64_t total = 0;
    std::uint64_t distinct = 0;
  };

  TrigramLM() = default;
  // Builds vocab_ and index_ from the (unsorted) token set.
  void SetVocabulary(std::vector<Token> tokens);
  SymbolId Lookup(const Token& token) const;
  void LastTwo(std::span<const Token> history, SymbolId& u, SymbolId& v) const;
  double ProbIds(SymbolId u, SymbolId v, SymbolId w) const;
  double UnigramProb(SymbolId w) const;
  std::string SymbolText(SymbolId id) const;
  void FinalizeCounts();

  static std::uint64_t Key2(SymbolId a, SymbolId b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }
  static std::uint64_t Key3(SymbolId a, SymbolId b, SymbolId c) {
    return (static_cast<std::uint64_t>(a) << 42) |
           (static_cast<std::uint64_t>(b) << 21) | c;
  }

  std::string name_;
  double unk_prob_ = kDefaultUnkProb;
  std::vector<Token> vocab_;
  std::unordered_map<std::string, SymbolId> index_;

  std::vector<std::uint64_t> unigram_;  // by SymbolId
  std::uint64_t unigram_total_ = 0;
  std::unordered_map<std::uint64_t, std::uint64_t> bigram_;
  std::unordered_map<std::uint64_t, std::uint64_t> trigram_;
  std::unordered_map<SymbolId, HistoryStats> bigram_history_;
  std::unordered_map<std::uint64_t, HistoryStats> trigram_history_;
};

// P(w|h) = sum_i weight_i * P_i(w|h) over the union vocabulary. A component
// spreads its unknown mass evenly over the union tokens it does not know
// plus the remaining unknown class, so each component stays normalized on
// the union.
class InterpolatedLM : public LanguageModel {
 public:
  struct Component {
    std::string name;
    std::shared_ptr<const LanguageModel> lm;
  };

  // Throws ValidationError for no components, a length mismatch, negative
  // weights, or weights not summing to 1 within 1e-9. Weights are then
  // renormalized. Omitted weights are uniform.
  InterpolatedLM(std::vector<Component> components,
                 std::optional<std::vector<double>> weights = std::nullopt);

  double Prob(std::span<const Token> history, const Token* next) const override;
  double UnkProb(std::span<const Token> history) const override;
  const std::vector<Token>& Vocabulary() const override { return vocab_; }

  const std::vector<Component>& components() const { return components_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  double ComponentProb(std::size_t i, std::span<const Token> history,
                       const Token* next) const;

  std::vector<Component> components_;
  std::vector<double> weights_;
  std::vector<Token> vocab_;
  // Per component: vocabulary as a sorted list, and how many union tokens
  // plus one share its unknown mass.
  std::vector<std::vector<Token>> component_vocab_;
  std::vector<double> unk_share_;
};

// Convenience: interpolate trained trigram models, named after their corpora.
InterpolatedLM Interpolate(std::span<const TrigramLM> lms,
                           std::optional<std::vector<double>> weights = std::nullopt);

struct NBestEntry {
  std::vector<Token> tokens;
  double acoustic_score = 0.0;  // log domain

  friend bool operator==(const NBestEntry&, const NBestEntry&) = default;
};

struct NBestList {
  std::string utt_id;
  std::vector<NBestEntry> entries;

  friend bool operator==(const NBestList&, const NBestList&) = default;
};

// Picks the entry maximizing acoustic_score + lm_scale * logprob (earliest
// wins ties). Every emitted token carries the winner's softmax weight over
// all entry totals. Throws ValidationError for an empty list or a negative
// lm_scale.
Hypothesis DecodeNBest(const NBestList& nbest, const LanguageModel& lm,
                       double lm_scale);

}  // namespace csrover

#endif  // CSROVER_LM_H_
