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

#include "csrover/io.h"

#include <gtest/gtest.h>

#include <sstream>

#include "csrover/error.h"
#include "csrover/simulator.h"

namespace csrover {
namespace {

TEST(TranscriptTest, ReadWriteRoundTrip) {
  std::istringstream in("u1\t我 like 喝茶!\r\nu2\t\n\nu3\tHello World\n");
  const Corpus c = ReadTranscript(in, "refs");
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c.utterances()[0].tokens.size(), 4u);
  EXPECT_TRUE(c.utterances()[1].tokens.empty());
  std::ostringstream out;
  WriteTranscript(out, c);
  EXPECT_EQ(out.str(), "u1\t我 like 喝茶\nu2\t\nu3\thello world\n");
}

TEST(TranscriptTest, ErrorsCarryLineNumbers) {
  std::istringstream in("u1\tok\nu2\tПривет\n");
  try {
    ReadTranscript(in, "x");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::istringstream dup("u1\ta\nu1\tb\n");
  EXPECT_THROW(ReadTranscript(dup, "x"), ValidationError);
}

TEST(HypothesisTest, RoundTripIncludingEmpty) {
  SystemOutput out{"sys", {}};
  out.hypotheses["a"] = {"a", {{MakeToken("我"), 0.5}, {MakeToken("ok"), 0.25}}};
  out.hypotheses["b"] = {"b", {}};
  std::ostringstream text;
  WriteHypotheses(text, out);
  EXPECT_EQ(text.str(), "a 我 man 0.500000\na ok eng 0.250000\nb\n");
  std::istringstream in(text.str());
  EXPECT_EQ(ReadHypotheses(in, "sys"), out);
}

TEST(HypothesisTest, RejectsBadLines) {
  std::istringstream bad_lang("a x fr 0.5\n");
  EXPECT_THROW(ReadHypotheses(bad_lang, "s"), ValidationError);
  std::istringstream bad_conf("a x eng 1.5\n");
  EXPECT_THROW(ReadHypotheses(bad_conf, "s"), ValidationError);
  std::istringstream mismatch("a 我 eng 0.5\n");
  EXPECT_THROW(ReadHypotheses(mismatch, "s"), ValidationError);
  std::istringstream short_line("a x eng\n");
  EXPECT_THROW(ReadHypotheses(short_line, "s"), ValidationError);
}

TEST(HypothesisTest, TokenFieldIsCaseFolded) {
  std::istringstream in("a OK eng 0.5\n");
  EXPECT_EQ(ReadHypotheses(in, "s").hypotheses.at("a").tokens[0].token.surface, "ok");
}

TEST(NBestTest, RoundTrip) {
  SyntheticCorpusSpec spec;
  spec.utterances = 30;
  const Corpus refs = GenerateSyntheticCorpus(spec);
  SystemProfile p;
  p.name = "p";
  p.match_eng = 0.5;
  p.match_man = 0.6;
  const auto sim = SimulateSystem(p, refs, VocabPools::FromCorpus(refs));
  std::ostringstream text;
  WriteNBest(text, sim.nbest);
  std::istringstream in(text.str());
  EXPECT_EQ(ReadNBest(in), sim.nbest);
}

TEST(NBestTest, RejectsOutOfOrderEntries) {
  std::istringstream in("u 1 -2.0\n");
  EXPECT_THROW(ReadNBest(in), ValidationError);
}

TEST(ManifestTest, Rendering) {
  std::ostringstream out;
  WriteManifest(out, {{"u1", {MakeToken("我"), MakeToken("like"), MakeToken("茶")}}, {"u2", {}}});
  EXPECT_EQ(out.str(), "u1\t我 like 茶\nu2\t\n");
}

TEST(FileTest, MissingFileIsIoError) {
  EXPECT_THROW(ReadTranscriptFile("/nonexistent/refs.txt"), IoError);
}

}  // namespace
}  // namespace csrover
