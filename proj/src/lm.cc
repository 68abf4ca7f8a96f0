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

#include "csrover/lm.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "csrover/error.h"

namespace csrover {

double SequenceLogProb(const LanguageModel& lm, std::span<const Token> tokens) {
  double total = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    total += std::log(lm.Prob(tokens.first(i), &tokens[i]));
  }
  return total + std::log(lm.Prob(tokens, nullptr));
}

double Perplexity(const LanguageModel& lm, const Corpus& corpus) {
  double total = 0.0;
  std::uint64_t predicted = 0;
  for (const Utterance& u : corpus.utterances()) {
    total += SequenceLogProb(lm, u.tokens);
    predicted += u.tokens.size() + 1;
  }
  if (predicted == 0) throw ValidationError("perplexity of an empty corpus");
  return std::exp(-total / static_cast<double>(predicted));
}

// --- TrigramLM ------------------------------------------------------------

void TrigramLM::SetVocabulary(std::vector<Token> tokens) {
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  vocab_ = std::move(tokens);
  index_.clear();
  for (std::size_t k = 0; k < vocab_.size(); ++k) {
    index_.emplace(vocab_[k].surface, static_cast<SymbolId>(kFirstWord + k));
  }
  if (vocab_.size() + kFirstWord >= (1u << 21)) {
    throw ValidationError("vocabulary too large for trigram keys");
  }
}

TrigramLM::SymbolId TrigramLM::Lookup(const Token& token) const {
  auto it = index_.find(token.surface);
  if (it == index_.end() || vocab_[it->second - kFirstWord].lang != token.lang) {
    return kUnk;
  }
  return it->second;
}

bool TrigramLM::Contains(const Token& token) const {
  return Lookup(token) != kUnk;
}

void TrigramLM::FinalizeCounts() {
  unigram_total_ = std::accumulate(unigram_.begin(), unigram_.end(),
                                   std::uint64_t{0});
  bigram_history_.clear();
  trigram_history_.clear();
  for (const auto& [key, count] : bigram_) {
    auto& stats = bigram_history_[static_cast<SymbolId>(key >> 32)];
    stats.total += count;
    ++stats.distinct;
  }
  for (const auto& [key, count] : trigram_) {
    auto& stats = trigram_history_[key >> 21];
    stats.total += count;
    ++stats.distinct;
  }
}

TrigramLM TrigramLM::Train(const Corpus& corpus, double unk_prob) {
  if (corpus.empty()) {
    throw ValidationError("cannot train a language model on empty corpus '" +
                          corpus.name() + "'");
  }
  if (!(unk_prob > 0.0 && unk_prob < 1.0)) {
    throw ValidationError("unk_prob must be in (0, 1)");
  }
  TrigramLM lm;
  lm.name_ = corpus.name();
  lm.unk_prob_ = unk_prob;
  std::vector<Token> tokens;
  for (const Utterance& u : corpus.utterances()) {
    tokens.insert(tokens.end(), u.tokens.begin(), u.tokens.end());
  }
  lm.SetVocabulary(std::move(tokens));
  lm.unigram_.assign(kFirstWord + lm.vocab_.size(), 0);

  std::vector<SymbolId> ids;
  for (const Utterance& u : corpus.utterances()) {
    ids.assign({kBos, kBos});
    for (const Token& t : u.tokens) ids.push_back(lm.Lookup(t));
    ids.push_back(kEos);
    for (std::size_t k = 2; k < ids.size(); ++k) {
      ++lm.unigram_[ids[k]];
      ++lm.bigram_[Key2(ids[k - 1], ids[k])];
      ++lm.trigram_[Key3(ids[k - 2], ids[k - 1], ids[k])];
    }
  }
  lm.FinalizeCounts();
  return lm;
}

double TrigramLM::UnigramProb(SymbolId w) const {
  if (w == kUnk) return unk_prob_;
  return (1.0 - unk_prob_) * static_cast<double>(unigram_[w]) /
         static_cast<double>(unigram_total_);
}

double TrigramLM::ProbIds(SymbolId u, SymbolId v, SymbolId w) const {
  double p = UnigramProb(w);
  auto interpolate = [&](const HistoryStats& stats, std::uint64_t count) {
    const double t = static_cast<double>(stats.distinct);
    return (static_cast<double>(count) + t * p) /
           (static_cast<double>(stats.total) + t);
  };
  if (auto h = bigram_history_.find(v); h != bigram_history_.end()) {
    auto c = bigram_.find(Key2(v, w));
    p = interpolate(h->second, c == bigram_.end() ? 0 : c->second);
  }
  const std::uint64_t history_key = Key3(u, v, 0) >> 21;
  if (auto h = trigram_history_.find(history_key); h != trigram_history_.end()) {
    auto c = trigram_.find(Key3(u, v, w));
    p = interpolate(h->second, c == trigram_.end() ? 0 : c->second);
  }
  return p;
}

void TrigramLM::LastTwo(std::span<const Token> history, SymbolId& u,
                        SymbolId& v) const {
  const std::size_t n = history.size();
  u = n >= 2 ? Lookup(history[n - 2]) : kBos;
  v = n >= 1 ? Lookup(history[n - 1]) : kBos;
}

double TrigramLM::Prob(std::span<const Token> history, const Token* next) const {
  SymbolId u;
  SymbolId v;
  LastTwo(history, u, v);
  return ProbIds(u, v, next == nullptr ? kEos : Lookup(*next));
}

double TrigramLM::UnkProb(std::span<const Token> history) const {
  SymbolId u;
  SymbolId v;
  LastTwo(history, u, v);
  return ProbIds(u, v, kUnk);
}

std::string TrigramLM::SymbolText(SymbolId id) const {
  switch (id) {
    case kBos: return "<s>";
    case kEos: return "</s>";
    case kUnk: return "<unk>";
    default: return vocab_[id - kFirstWord].surface;
  }
}

void TrigramLM::Save(std::ostream& out) const {
  std::vector<std::pair<std::string, std::uint64_t>> lines;
  auto add = [&](int order, std::initializer_list<SymbolId> ids,
                 std::uint64_t count) {
    std::string key = std::to_string(order);
    for (SymbolId id : ids) key += " " + SymbolText(id);
    lines.emplace_back(std::move(key), count);
  };
  for (SymbolId w = 0; w < unigram_.size(); ++w) {
    if (unigram_[w] > 0) add(1, {w}, unigram_[w]);
  }
  for (const auto& [key, count] : bigram_) {
    add(2, {static_cast<SymbolId>(key >> 32), static_cast<SymbolId>(key & 0xFFFFFFFFu)},
        count);
  }
  constexpr std::uint64_t kMask = (1u << 21) - 1;
  for (const auto& [key, count] : trigram_) {
    add(3, {static_cast<SymbolId>(key >> 42), static_cast<SymbolId>((key >> 21) & kMask),
            static_cast<SymbolId>(key & kMask)},
        count);
  }
  std::sort(lines.begin(), lines.end());

  char unk[40];
  std::snprintf(unk, sizeof(unk), "%.17g", unk_prob_);
  out << "# csrover trigram counts\n"
      << "smoothing witten-bell\n"
      << "order 3\n"
      << "unk_prob " << unk << "\n"
      << "ngrams " << lines.size() << "\n";
  for (const auto& [key, count] : lines) {
    // "<order> <count> <w...>"
    const auto space = key.find(' ');
    out << key.substr(0, space) << ' ' << count << key.substr(space) << '\n';
  }
}

TrigramLM TrigramLM::Load(std::istream& in, std::string name) {
  TrigramLM lm;
  lm.name_ = std::move(name);
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) -> ValidationError {
    return ValidationError("language model line " + std::to_string(line_no) +
                           ": " + why);
  };
  std::optional<std::size_t> expected;
  bool smoothing_ok = false;
  struct Raw {
    int order;
    std::uint64_t count;
    std::vector<std::string> words;
  };
  std::vector<Raw> raw;
  std::set<std::string> surfaces;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string head;
    fields >> head;
    if (head == "smoothing") {
      std::string value;
      fields >> value;
      if (value != "witten-bell") throw fail("unsupported smoothing '" + value + "'");
      smoothing_ok = true;
    } else if (head == "order") {
      int order = 0;
      fields >> order;
      if (order != 3) throw fail("only order 3 is supported");
    } else if (head == "unk_prob") {
      if (!(fields >> lm.unk_prob_) || !(lm.unk_prob_ > 0.0 && lm.unk_prob_ < 1.0)) {
        throw fail("bad unk_prob");
      }
    } else if (head == "ngrams") {
      std::size_t n = 0;
      if (!(fields >> n)) throw fail("bad ngrams count");
      expected = n;
    } else if (head == "1" || head == "2" || head == "3") {
      Raw r{head[0] - '0', 0, {}};
      if (!(fields >> r.count) || r.count == 0) throw fail("bad count");
      std::string w;
      while (fields >> w) r.words.push_back(w);
      if (r.words.size() != static_cast<std::size_t>(r.order)) {
        throw fail("expected " + head + " words");
      }
      for (const std::string& s : r.words) {
        if (s != "<s>" && s != "</s>" && s != "<unk>") surfaces.insert(s);
      }
      raw.push_back(std::move(r));
    } else {
      throw fail("unrecognized field '" + head + "'");
    }
  }
  if (!smoothing_ok) throw ValidationError("language model header lacks smoothing");
  if (expected && *expected != raw.size()) {
    throw ValidationError("language model declares " + std::to_string(*expected) +
                          " n-grams but lists " + std::to_string(raw.size()));
  }
  std::vector<Token> tokens;
  for (const std::string& s : surfaces) tokens.push_back(MakeToken(s));
  lm.SetVocabulary(std::move(tokens));
  lm.unigram_.assign(kFirstWord + lm.vocab_.size(), 0);

  auto id_of = [&](const std::string& s) -> SymbolId {
    if (s == "<s>") return kBos;
    if (s == "</s>") return kEos;
    if (s == "<unk>") return kUnk;
    return lm.index_.at(s);
  };
  for (const Raw& r : raw) {
    if (r.order == 1) {
      lm.unigram_[id_of(r.words[0])] += r.count;
    } else if (r.order == 2) {
      lm.bigram_[Key2(id_of(r.words[0]), id_of(r.words[1]))] += r.count;
    } else {
      lm.trigram_[Key3(id_of(r.words[0]), id_of(r.words[1]), id_of(r.words[2]))] +=
          r.count;
    }
  }
  if (lm.unigram_[kBos] != 0) throw ValidationError("<s> cannot be predicted");
  lm.FinalizeCounts();
  if (lm.unigram_total_ == 0) throw ValidationError("language model has no unigrams");
  return lm;
}

// --- InterpolatedLM -------------------------------------------------------

InterpolatedLM::InterpolatedLM(std::vector<Component> components,
                               std::optional<std::vector<double>> weights)
    : components_(std::move(components)) {
  if (components_.empty()) {
    throw ValidationError("interpolation needs at least one language model");
  }
  const std::size_t n = components_.size();
  if (weights) {
    if (weights->size() != n) {
      throw ValidationError("got " + std::to_string(weights->size()) +
                            " interpolation weights for " + std::to_string(n) +
                            " models");
    }
    double sum = 0.0;
    for (double w : *weights) {
      if (!(w >= 0.0)) throw ValidationError("interpolation weights must be non-negative");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw ValidationError("interpolation weights must sum to 1");
    }
    weights_ = *weights;
    for (double& w : weights_) w /= sum;
  } else {
    weights_.assign(n, 1.0 / static_cast<double>(n));
  }

  std::set<Token> all;
  for (const Component& c : components_) {
    if (!c.lm) throw ValidationError("null language model component '" + c.name + "'");
    const auto& v = c.lm->Vocabulary();
    all.insert(v.begin(), v.end());
    component_vocab_.emplace_back(v.begin(), v.end());
    std::sort(component_vocab_.back().begin(), component_vocab_.back().end());
  }
  vocab_.assign(all.begin(), all.end());
  for (const auto& v : component_vocab_) {
    unk_share_.push_back(1.0 / static_cast<double>(vocab_.size() - v.size() + 1));
  }
}

double InterpolatedLM::ComponentProb(std::size_t i, std::span<const Token> history,
                                     const Token* next) const {
  const LanguageModel& lm = *components_[i].lm;
  if (next == nullptr ||
      std::binary_search(component_vocab_[i].begin(), component_vocab_[i].end(), *next)) {
    return lm.Prob(history, next);
  }
  return lm.UnkProb(history) * unk_share_[i];
}

double InterpolatedLM::Prob(std::span<const Token> history, const Token* next) const {
  double p = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    p += weights_[i] * ComponentProb(i, history, next);
  }
  return p;
}

double InterpolatedLM::UnkProb(std::span<const Token> history) const {
  double p = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    p += weights_[i] * components_[i].lm->UnkProb(history) * unk_share_[i];
  }
  return p;
}

InterpolatedLM Interpolate(std::span<const TrigramLM> lms,
                           std::optional<std::vector<double>> weights) {
  std::vector<InterpolatedLM::Component> components;
  for (const TrigramLM& lm : lms) {
    components.push_back({lm.name(), std::make_shared<const TrigramLM>(lm)});
  }
  return InterpolatedLM(std::move(components), std::move(weights));
}

// --- n-best ----------------------------------------------------------------

Hypothesis DecodeNBest(const NBestList& nbest, const LanguageModel& lm,
                       double lm_scale) {
  if (nbest.entries.empty()) {
    throw ValidationError("empty n-best list for utterance '" + nbest.utt_id + "'");
  }
  if (!(lm_scale >= 0.0)) throw ValidationError("lm_scale must be non-negative");
  std::vector<double> totals;
  totals.reserve(nbest.entries.size());
  for (const NBestEntry& e : nbest.entries) {
    const double lm_part = lm_scale == 0.0 ? 0.0 : lm_scale * SequenceLogProb(lm, e.tokens);
    totals.push_back(e.acoustic_score + lm_part);
  }
  const auto best = static_cast<std::size_t>(
      std::max_element(totals.begin(), totals.end()) - totals.begin());
  double norm = 0.0;
  for (double t : totals) norm += std::exp(t - totals[best]);
  const double confidence = std::clamp(1.0 / norm, 0.0, 1.0);

  Hypothesis out{nbest.utt_id, {}};
  for (const Token& t : nbest.entries[best].tokens) {
    out.tokens.push_back({t, confidence});
  }
  return out;
}

}  // namespace csrover
