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

#include "csrover/simulator.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <set>

#include "csrover/error.h"
#include "csrover/random.h"

namespace csrover {

namespace {

void CheckUnit(double value, const std::string& field) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ValidationError(field + " must be in [0, 1]");
  }
}

}  // namespace

void SystemProfile::Validate() const {
  const std::string where = "profile '" + name + "': ";
  CheckUnit(match_eng, where + "match_eng");
  CheckUnit(match_man, where + "match_man");
  CheckUnit(kappa, where + "kappa");
  CheckUnit(delta, where + "delta");
  CheckUnit(ins_rate, where + "ins_rate");
  if (nbest_size < 1) throw ValidationError(where + "nbest_size must be >= 1");
}

std::string_view NoiseEventName(NoiseEvent event) {
  switch (event) {
    case NoiseEvent::kCorrect: return "correct";
    case NoiseEvent::kCrossSub: return "cross_sub";
    case NoiseEvent::kSameSub: return "same_sub";
    case NoiseEvent::kDel: return "del";
  }
  return "?";
}

double EventProbs::Get(NoiseEvent event) const {
  switch (event) {
    case NoiseEvent::kCorrect: return p_correct;
    case NoiseEvent::kCrossSub: return p_cross_sub;
    case NoiseEvent::kSameSub: return p_same_sub;
    case NoiseEvent::kDel: return p_del;
  }
  return 0.0;
}

EventProbs DeriveEventProbs(const SystemProfile& profile, LanguageTag lang) {
  const double own = profile.Match(lang);
  const double other = profile.Match(OtherLanguage(lang));
  const double ratio = own + other == 0.0 ? 0.5 : other / (own + other);
  EventProbs p;
  p.p_correct = own;
  const double residual = 1.0 - own;
  p.p_cross_sub = residual * profile.kappa * ratio;
  p.p_del = residual * profile.delta;
  p.p_same_sub = residual - p.p_cross_sub - p.p_del;
  if (p.p_same_sub < 0.0) {
    const double scale = residual / (p.p_cross_sub + p.p_del);
    p.p_cross_sub *= scale;
    p.p_del *= scale;
    p.p_same_sub = 0.0;
  }
  return p;
}

VocabPools VocabPools::FromCorpus(const Corpus& corpus) {
  std::set<Token> eng;
  std::set<Token> man;
  for (const Utterance& u : corpus.utterances()) {
    for (const Token& t : u.tokens) {
      (t.lang == LanguageTag::kEng ? eng : man).insert(t);
    }
  }
  return VocabPools{{eng.begin(), eng.end()}, {man.begin(), man.end()}};
}

namespace {

// What happened at one reference position, plus an optional insertion in
// the gap after it.
struct Position {
  LanguageTag ref_lang;
  NoiseEvent event;
  std::optional<Token> emitted;
  double confidence;  // also drawn for deletions
  std::optional<ScoredToken> inserted;
};

class Channel {
 public:
  Channel(const SystemProfile& profile, const VocabPools& pools)
      : profile_(profile),
        pools_(pools),
        probs_{DeriveEventProbs(profile, LanguageTag::kEng),
               DeriveEventProbs(profile, LanguageTag::kMan)} {
    const double total = profile.match_eng + profile.match_man;
    p_insert_eng_ = total == 0.0 ? 0.5 : profile.match_eng / total;
  }

  double CorrectConfidence(Rng& rng) const { return 0.5 + 0.5 * rng.BetaInt(8, 2); }
  double ErrorConfidence(Rng& rng) const { return 0.7 * rng.BetaInt(2, 5); }

  // Draws the event, the emitted token and its confidence for one position.
  void DrawEvent(const Token& truth, Rng& rng, Position& pos) const {
    const EventProbs& p = probs_[static_cast<std::size_t>(truth.lang)];
    const double u = rng.Uniform();
    if (u < p.p_correct) {
      pos.event = NoiseEvent::kCorrect;
    } else if (u < p.p_correct + p.p_cross_sub) {
      pos.event = NoiseEvent::kCrossSub;
    } else if (u < p.p_correct + p.p_cross_sub + p.p_same_sub) {
      pos.event = NoiseEvent::kSameSub;
    } else {
      pos.event = NoiseEvent::kDel;
    }
    pos.emitted.reset();
    switch (pos.event) {
      case NoiseEvent::kCorrect:
        pos.emitted = truth;
        break;
      case NoiseEvent::kCrossSub: {
        const auto& pool = pools_.For(OtherLanguage(truth.lang));
        pos.emitted = pool[rng.Index(pool.size())];
        break;
      }
      case NoiseEvent::kSameSub:
        pos.emitted = DrawExcluding(pools_.For(truth.lang), truth, rng);
        if (!pos.emitted) pos.event = NoiseEvent::kDel;
        break;
      case NoiseEvent::kDel:
        break;
    }
    pos.confidence = pos.event == NoiseEvent::kCorrect ? CorrectConfidence(rng)
                                                       : ErrorConfidence(rng);
  }

  void DrawInsertion(Rng& rng, Position& pos) const {
    pos.inserted.reset();
    if (!rng.Bernoulli(profile_.ins_rate)) return;
    const LanguageTag lang =
        rng.Uniform() < p_insert_eng_ ? LanguageTag::kEng : LanguageTag::kMan;
    const auto& pool = pools_.For(lang);
    Token token = pool[rng.Index(pool.size())];
    pos.inserted = ScoredToken{std::move(token), ErrorConfidence(rng)};
  }

 private:
  // Uniform over pool \ {excluded}; nullopt if nothing is left.
  static std::optional<Token> DrawExcluding(const std::vector<Token>& pool,
                                            const Token& excluded, Rng& rng) {
    auto it = std::lower_bound(pool.begin(), pool.end(), excluded);
    const bool present = it != pool.end() && *it == excluded;
    const std::size_t available = pool.size() - (present ? 1 : 0);
    if (available == 0) return std::nullopt;
    std::size_t k = rng.Index(available);
    if (present && k >= static_cast<std::size_t>(it - pool.begin())) ++k;
    return pool[k];
  }

  const SystemProfile& profile_;
  const VocabPools& pools_;
  std::array<EventProbs, 2> probs_;
  double p_insert_eng_;
};

NBestEntry RenderEntry(const std::vector<Position>& positions,
                       std::vector<ScoredToken>* scored) {
  NBestEntry entry;
  for (const Position& pos : positions) {
    entry.acoustic_score += std::log(pos.confidence);
    if (pos.emitted) {
      entry.tokens.push_back(*pos.emitted);
      if (scored) scored->push_back({*pos.emitted, pos.confidence});
    }
    if (pos.inserted) {
      entry.acoustic_score += std::log(pos.inserted->confidence);
      entry.tokens.push_back(pos.inserted->token);
      if (scored) scored->push_back(*pos.inserted);
    }
  }
  return entry;
}

}  // namespace

SimulationResult SimulateSystem(const SystemProfile& profile, const Corpus& refs,
                                const VocabPools& pools, SimulationTrace* trace) {
  profile.Validate();
  if (pools.eng.empty() || pools.man.empty()) {
    throw ValidationError("profile '" + profile.name +
                          "': substitution pools must be non-empty for both languages");
  }
  for (const auto* pool : {&pools.eng, &pools.man}) {
    if (!std::is_sorted(pool->begin(), pool->end())) {
      throw ValidationError("substitution pools must be sorted");
    }
  }
  const Channel channel(profile, pools);
  SimulationResult result;
  result.output.system_id = profile.name;

  std::vector<Position> top;
  std::vector<Position> alt;
  const auto& utterances = refs.utterances();
  for (std::size_t index = 0; index < utterances.size(); ++index) {
    const Utterance& ref = utterances[index];
    Rng rng(SubstreamSeed(profile.seed, index));

    top.assign(ref.tokens.size(), Position{});
    for (std::size_t k = 0; k < ref.tokens.size(); ++k) {
      top[k].ref_lang = ref.tokens[k].lang;
      channel.DrawEvent(ref.tokens[k], rng, top[k]);
      channel.DrawInsertion(rng, top[k]);
    }

    Hypothesis hyp{ref.id, {}};
    NBestList nbest{ref.id, {RenderEntry(top, &hyp.tokens)}};
    for (int n = 1; n < profile.nbest_size; ++n) {
      alt = top;
      for (std::size_t k = 0; k < alt.size(); ++k) {
        if (alt[k].event != NoiseEvent::kCorrect) {
          channel.DrawEvent(ref.tokens[k], rng, alt[k]);
        }
        if (alt[k].inserted) channel.DrawInsertion(rng, alt[k]);
      }
      nbest.entries.push_back(RenderEntry(alt, nullptr));
    }

    if (trace) {
      for (const Position& pos : top) {
        ++trace->events[static_cast<std::size_t>(pos.ref_lang)]
                       [static_cast<std::size_t>(pos.event)];
        if (pos.event == NoiseEvent::kCorrect) {
          trace->correct_conf_sum += pos.confidence;
          ++trace->correct_tokens;
        } else if (pos.emitted) {
          trace->error_conf_sum += pos.confidence;
          ++trace->error_tokens;
        }
        if (pos.inserted) {
          ++trace->insertions;
          trace->error_conf_sum += pos.inserted->confidence;
          ++trace->error_tokens;
        }
      }
    }
    result.output.hypotheses.emplace(ref.id, std::move(hyp));
    result.nbest.emplace(ref.id, std::move(nbest));
  }
  return result;
}

// --- synthetic references ---------------------------------------------------

void SyntheticCorpusSpec::Validate() const {
  if (utterances == 0) throw ValidationError("synthetic corpus needs utterances > 0");
  CheckUnit(frac_code_switched, "synthetic.frac_code_switched");
  CheckUnit(frac_man_only, "synthetic.frac_man_only");
  if (frac_code_switched + frac_man_only > 1.0) {
    throw ValidationError("synthetic fractions exceed 1");
  }
  if (man_vocab < 2 || eng_vocab < 2) {
    throw ValidationError("synthetic vocabularies need at least 2 tokens");
  }
  if (man_vocab > 20000) throw ValidationError("synthetic.man_vocab too large");
  if (successors == 0) throw ValidationError("synthetic.successors must be >= 1");
  if (min_mono_length == 0 || min_mono_length > max_mono_length) {
    throw ValidationError("synthetic mono length range is empty");
  }
  if (min_runs < 2 || min_runs > max_runs) {
    throw ValidationError("synthetic run count range must start at 2 or more");
  }
  if (max_run_length == 0) throw ValidationError("synthetic.max_run_length must be >= 1");
}

namespace {

std::vector<Token> SyntheticVocabulary(LanguageTag lang, std::size_t size) {
  std::vector<Token> vocab;
  if (lang == LanguageTag::kMan) {
    for (std::size_t k = 0; k < size; ++k) {
      vocab.push_back({EncodeUtf8(static_cast<char32_t>(0x4E00 + k)), LanguageTag::kMan});
    }
    return vocab;
  }
  static constexpr std::string_view kOnsets = "bdfgklmnprstvz";
  static constexpr std::string_view kVowels = "aeiou";
  const std::size_t syllables = kOnsets.size() * kVowels.size();
  auto syllable = [&](std::size_t s) {
    return std::string{kOnsets[s / kVowels.size()], kVowels[s % kVowels.size()]};
  };
  for (std::size_t k = 0; k < size; ++k) {
    std::string word = syllable(k % syllables) + syllable((k / syllables) % syllables);
    for (std::size_t rest = k / (syllables * syllables); rest > 0; rest /= syllables) {
      word += syllable(rest % syllables);
    }
    vocab.push_back({std::move(word), LanguageTag::kEng});
  }
  return vocab;
}

// Sparse first-order chain over one vocabulary.
class MarkovSource {
 public:
  MarkovSource(std::vector<Token> vocab, std::size_t successors, Rng& rng)
      : vocab_(std::move(vocab)) {
    next_.resize(vocab_.size());
    for (auto& row : next_) {
      for (std::size_t s = 0; s < successors; ++s) row.push_back(rng.Index(vocab_.size()));
    }
    double total = 0.0;
    for (std::size_t r = 0; r < successors; ++r) {
      total += 1.0 / static_cast<double>(r + 1);
      cumulative_.push_back(total);
    }
    for (double& c : cumulative_) c /= total;
  }

  std::size_t Start(Rng& rng) const { return rng.Index(vocab_.size()); }

  std::size_t Next(std::size_t current, Rng& rng) const {
    if (rng.Bernoulli(0.1)) return rng.Index(vocab_.size());
    const double u = rng.Uniform();
    const auto rank = static_cast<std::size_t>(
        std::lower_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin());
    return next_[current][std::min(rank, next_[current].size() - 1)];
  }

  const Token& At(std::size_t k) const { return vocab_[k]; }

 private:
  std::vector<Token> vocab_;
  std::vector<std::vector<std::size_t>> next_;
  std::vector<double> cumulative_;  // Zipf-like successor weights
};

std::size_t UniformBetween(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + rng.Index(hi - lo + 1);
}

}  // namespace

Corpus GenerateSyntheticCorpus(const SyntheticCorpusSpec& spec) {
  spec.Validate();
  Rng table_rng(SplitMix64(spec.seed ^ 0x7AB1E5EEDull));
  const MarkovSource man(SyntheticVocabulary(LanguageTag::kMan, spec.man_vocab),
                         spec.successors, table_rng);
  const MarkovSource eng(SyntheticVocabulary(LanguageTag::kEng, spec.eng_vocab),
                         spec.successors, table_rng);

  auto emit_run = [](const MarkovSource& src, std::size_t length, Rng& rng,
                     std::vector<Token>& out) {
    std::size_t state = src.Start(rng);
    for (std::size_t k = 0; k < length; ++k) {
      if (k > 0) state = src.Next(state, rng);
      out.push_back(src.At(state));
    }
  };

  std::vector<Utterance> utterances;
  utterances.reserve(spec.utterances);
  for (std::size_t i = 0; i < spec.utterances; ++i) {
    Rng rng(SubstreamSeed(spec.seed, i));
    char id[64];
    std::snprintf(id, sizeof(id), "%s-%05zu", spec.name.c_str(), i);
    Utterance u{id, {}};
    const double kind = rng.Uniform();
    if (kind < spec.frac_code_switched) {
      const std::size_t runs = UniformBetween(rng, spec.min_runs, spec.max_runs);
      bool mandarin = rng.Bernoulli(0.5);
      for (std::size_t r = 0; r < runs; ++r, mandarin = !mandarin) {
        emit_run(mandarin ? man : eng, UniformBetween(rng, 1, spec.max_run_length), rng,
                 u.tokens);
      }
    } else {
      const bool mandarin = kind < spec.frac_code_switched + spec.frac_man_only;
      emit_run(mandarin ? man : eng,
               UniformBetween(rng, spec.min_mono_length, spec.max_mono_length), rng,
               u.tokens);
    }
    utterances.push_back(std::move(u));
  }
  return Corpus(spec.name, std::move(utterances));
}

}  // namespace csrover
