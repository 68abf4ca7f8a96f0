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

#include <gtest/gtest.h>

#include "csrover/error.h"
#include "csrover/random.h"
#include "oracles.h"

namespace csrover {
namespace {

Token E(const char* s) { return {s, LanguageTag::kEng}; }

Hypothesis Hyp(std::vector<std::pair<const char*, double>> words) {
  Hypothesis h{"u1", {}};
  for (auto [w, c] : words) h.tokens.push_back({MakeToken(w), c});
  return h;
}

std::vector<std::optional<std::string>> SetSurfaces(const CorrespondenceSet& set) {
  std::vector<std::optional<std::string>> out;
  for (const auto& slot : set.slots) {
    out.push_back(slot ? std::optional<std::string>(slot->token.surface) : std::nullopt);
  }
  return out;
}

using Slots = std::vector<std::optional<std::string>>;

TEST(BuildWtnTest, InsertionOpensNullSet) {
  const std::vector<std::pair<std::string, Hypothesis>> in = {
      {"S1", Hyp({{"a", .5}, {"b", .5}})}, {"S2", Hyp({{"a", .5}, {"x", .5}, {"b", .5}})}};
  const auto wtn = BuildWtn(in);
  ASSERT_EQ(wtn.sets.size(), 3u);
  EXPECT_EQ(SetSurfaces(wtn.sets[0]), (Slots{"a", "a"}));
  EXPECT_EQ(SetSurfaces(wtn.sets[1]), (Slots{std::nullopt, "x"}));
  EXPECT_EQ(SetSurfaces(wtn.sets[2]), (Slots{"b", "b"}));
}

TEST(BuildWtnTest, SingleAndIdenticalSystems) {
  const std::vector<std::pair<std::string, Hypothesis>> one = {{"S1", Hyp({{"a", .5}, {"b", .5}})}};
  const auto wtn = BuildWtn(one);
  ASSERT_EQ(wtn.sets.size(), 2u);
  EXPECT_EQ(SetSurfaces(wtn.sets[1]), (Slots{"b"}));

  const std::vector<std::pair<std::string, Hypothesis>> two = {{"S1", Hyp({{"a", .5}})},
                                                               {"S2", Hyp({{"a", .9}})}};
  const auto wtn2 = BuildWtn(two);
  ASSERT_EQ(wtn2.sets.size(), 1u);
  EXPECT_EQ(SetSurfaces(wtn2.sets[0]), (Slots{"a", "a"}));
}

TEST(BuildWtnTest, RejectsBadInput) {
  Hypothesis other = Hyp({{"a", .5}});
  other.utt_id = "u2";
  const std::vector<std::pair<std::string, Hypothesis>> mismatched = {{"S1", Hyp({{"a", .5}})},
                                                                      {"S2", other}};
  EXPECT_THROW(BuildWtn(mismatched), ValidationError);
  const std::vector<std::pair<std::string, Hypothesis>> dup = {{"S1", Hyp({})}, {"S1", Hyp({})}};
  EXPECT_THROW(BuildWtn(dup), ValidationError);
  const std::vector<std::pair<std::string, Hypothesis>> bad_conf = {{"S1", Hyp({{"a", 1.5}})}};
  EXPECT_THROW(BuildWtn(bad_conf), ValidationError);
  EXPECT_THROW(BuildWtn({}), ValidationError);
}

// With two systems the network is exactly the alignment of the second
// hypothesis to the first.
TEST(BuildWtnTest, TwoSystemsMatchBruteForceAlignment) {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const std::vector<std::pair<std::string, Hypothesis>> in = {
        {"S1", testing::RandomHypothesis(rng, "u", 5)},
        {"S2", testing::RandomHypothesis(rng, "u", 5)}};
    const auto a = in[0].second.PlainTokens();
    const auto b = in[1].second.PlainTokens();
    testing::BruteForceAligner oracle(a, b);
    const auto wtn = BuildWtn(in);
    ASSERT_EQ(wtn.sets.size(), oracle.script().size());
    for (std::size_t k = 0; k < wtn.sets.size(); ++k) {
      const AlignmentOp& op = oracle.script()[k];
      const auto& slots = wtn.sets[k].slots;
      ASSERT_EQ(slots[0].has_value(), op.ref.has_value());
      ASSERT_EQ(slots[1].has_value(), op.hyp.has_value());
      if (op.ref) ASSERT_EQ(slots[0]->token, *op.ref);
      if (op.hyp) ASSERT_EQ(slots[1]->token, *op.hyp);
    }
  }
}

TEST(BuildWtnTest, PathPreservationAndSetCountBounds) {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::pair<std::string, Hypothesis>> in;
    const std::size_t n = 1 + rng.Index(5);
    std::size_t longest = 0, total = 0;
    for (std::size_t k = 0; k < n; ++k) {
      in.push_back({"S" + std::to_string(k), testing::RandomHypothesis(rng, "u", 8)});
      longest = std::max(longest, in.back().second.tokens.size());
      total += in.back().second.tokens.size();
    }
    const auto wtn = BuildWtn(in);
    ASSERT_TRUE(testing::PathsPreserved(wtn, in));
    ASSERT_GE(wtn.sets.size(), longest);
    ASSERT_LE(wtn.sets.size(), total);
  }
}

WordTransitionNetwork OneSet(std::vector<std::optional<ScoredToken>> slots) {
  WordTransitionNetwork wtn;
  wtn.utt_id = "u1";
  wtn.sets.push_back({std::move(slots)});
  for (std::size_t k = 0; k < wtn.sets[0].slots.size(); ++k) {
    wtn.merged_systems.push_back("S" + std::to_string(k + 1));
  }
  return wtn;
}

TEST(VoteTest, MaxConfidence) {
  const auto out = Vote(OneSet({ScoredToken{E("cat"), .9}, ScoredToken{E("cap"), .4}}), {});
  ASSERT_EQ(out.tokens.size(), 1u);
  EXPECT_EQ(out.tokens[0].token, E("cat"));
  EXPECT_DOUBLE_EQ(out.tokens[0].confidence, 0.9);
}

TEST(VoteTest, PluralityAtAlphaOne) {
  VoteConfig cfg;
  cfg.alpha = 1.0;
  const auto out = Vote(OneSet({ScoredToken{E("a"), .1}, ScoredToken{E("b"), .9},
                                ScoredToken{E("a"), .1}}),
                        cfg);
  ASSERT_EQ(out.tokens.size(), 1u);
  EXPECT_EQ(out.tokens[0].token, E("a"));
  EXPECT_NEAR(out.tokens[0].confidence, 2.0 / 3.0, 1e-15);
}

TEST(VoteTest, NullWinsAndDropsToken) {
  VoteConfig cfg;
  cfg.null_conf = 0.5;
  const auto out = Vote(OneSet({std::nullopt, ScoredToken{E("x"), .3}}), cfg);
  EXPECT_TRUE(out.tokens.empty());
}

TEST(VoteTest, TiesGoToEarliestSystemAndNullLosesTies) {
  const auto out = Vote(OneSet({ScoredToken{E("p"), .6}, ScoredToken{E("q"), .6}}), {});
  EXPECT_EQ(out.tokens.at(0).token, E("p"));
  VoteConfig cfg;
  cfg.null_conf = 0.6;
  const auto kept = Vote(OneSet({std::nullopt, ScoredToken{E("q"), .6}}), cfg);
  EXPECT_EQ(kept.tokens.at(0).token, E("q"));
}

TEST(VoteTest, AverageAndFrequencyStats) {
  VoteConfig avg;
  avg.stat = VoteStat::kAvgConf;
  // a: mean 0.5, b: 0.6.
  auto out = Vote(OneSet({ScoredToken{E("a"), .9}, ScoredToken{E("b"), .6},
                          ScoredToken{E("a"), .1}}),
                  avg);
  EXPECT_EQ(out.tokens.at(0).token, E("b"));
  VoteConfig freq;
  freq.stat = VoteStat::kFrequencyOnly;
  EXPECT_EQ(freq.EffectiveAlpha(), 1.0);
  out = Vote(OneSet({ScoredToken{E("a"), .1}, ScoredToken{E("b"), .9},
                     ScoredToken{E("a"), .1}}),
             freq);
  EXPECT_EQ(out.tokens.at(0).token, E("a"));
}

TEST(VoteConfigTest, Validation) {
  VoteConfig cfg;
  cfg.alpha = 1.5;
  EXPECT_THROW(cfg.Validate(), ValidationError);
  cfg = {};
  cfg.null_conf = -0.1;
  EXPECT_THROW(cfg.Validate(), ValidationError);
  for (auto s : {VoteStat::kMaxConf, VoteStat::kAvgConf, VoteStat::kFrequencyOnly}) {
    EXPECT_EQ(ParseVoteStat(VoteStatName(s)), s);
  }
}

SystemOutput RandomOutput(Rng& rng, const std::string& id, std::size_t utts) {
  SystemOutput out{id, {}};
  for (std::size_t u = 0; u < utts; ++u) {
    const std::string utt = "u" + std::to_string(u);
    out.hypotheses[utt] = testing::RandomHypothesis(rng, utt, 8);
  }
  return out;
}

TEST(CombineTest, IdentityAndIdempotence) {
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const SystemOutput x = RandomOutput(rng, "X", 5);
    const std::vector<SystemOutput> single = {x};
    EXPECT_EQ(Combine(single, {}).ToHypothesisMap(), x.ToHypothesisMap());
    SystemOutput copy = x;
    copy.system_id = "Y";
    const std::vector<SystemOutput> twice = {x, copy};
    EXPECT_EQ(Combine(twice, {}).ToHypothesisMap(), x.ToHypothesisMap());
  }
}

TEST(CombineTest, SystemIdAndOrderIndependence) {
  Rng rng(10);
  const SystemOutput b = RandomOutput(rng, "B", 10);
  const SystemOutput a = RandomOutput(rng, "A", 10);
  const std::vector<SystemOutput> ba = {b, a};
  const std::vector<SystemOutput> ab = {a, b};
  const SystemOutput combined = Combine(ba, {});
  EXPECT_EQ(combined.system_id, "ROVER(A,B)");
  EXPECT_EQ(combined, Combine(ab, {}));
}

TEST(CombineTest, RejectsMismatchedUtterances) {
  Rng rng(1);
  SystemOutput a = RandomOutput(rng, "A", 3);
  SystemOutput b = RandomOutput(rng, "B", 2);
  const std::vector<SystemOutput> in = {a, b};
  EXPECT_THROW(Combine(in, {}), ValidationError);
  EXPECT_THROW(Combine({}, {}), ValidationError);
}

}  // namespace
}  // namespace csrover
