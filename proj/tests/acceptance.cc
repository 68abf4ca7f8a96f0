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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
//
// Usage: acceptance [config]   (default: the shipped ROVER analogue config)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "csrover/core_model.h"
#include "csrover/error.h"
#include "csrover/io.h"
#include "csrover/lm.h"
#include "csrover/pipeline.h"
#include "csrover/random.h"
#include "csrover/rover.h"
#include "csrover/scoring.h"
#include "csrover/simulator.h"
#include "oracles.h"

#ifndef CSROVER_SOURCE_DIR
#define CSROVER_SOURCE_DIR "."
#endif

namespace csrover {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

// Criterion 9 accumulates over every combined output produced by the other
// criteria.
struct RoundTrip {
  std::size_t utterances = 0;
  std::size_t mismatches = 0;

  void Check(const SystemOutput& combined) {
    std::ostringstream text;
    std::map<std::string, std::vector<Token>> manifest;
    for (const auto& [id, hyp] : combined.hypotheses) manifest[id] = hyp.PlainTokens();
    WriteManifest(text, manifest);
    std::istringstream lines(text.str());
    for (std::string line; std::getline(lines, line);) {
      const auto tab = line.find('\t');
      const std::string id = line.substr(0, tab);
      ++utterances;
      if (TokenizeMixed(std::string_view(line).substr(tab + 1)) != manifest.at(id)) ++mismatches;
    }
  }
} round_trip;

Outcome AlignmentOracle() {
  const auto start = Clock::now();
  const auto seqs = testing::AllSequences(testing::OracleVocabulary(), 5);
  std::size_t pairs = 0, cost_mismatch = 0, script_mismatch = 0;
  for (const auto& ref : seqs) {
    for (const auto& hyp : seqs) {
      ++pairs;
      const testing::BruteForceAligner oracle(ref, hyp);
      const auto ops = Align(ref, hyp);
      if (AlignmentCost(ops) != oracle.cost()) ++cost_mismatch;
      if (ops != oracle.script()) ++script_mismatch;
    }
  }
  const double secs = Seconds(start);
  return {cost_mismatch == 0 && script_mismatch == 0 && secs < 10.0,
          Format("%zu pairs, %zu cost mismatches, %zu tie-break mismatches, %.1f s", pairs,
                 cost_mismatch, script_mismatch, secs)};
}

Outcome WtnProperties() {
  std::size_t path_violations = 0, identity_violations = 0, bound_violations = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(SubstreamSeed(0xACCE, seed));
    const std::size_t systems = 1 + rng.Index(6);
    std::vector<std::pair<std::string, Hypothesis>> in;
    std::size_t longest = 0, total = 0;
    for (std::size_t k = 0; k < systems; ++k) {
      in.push_back({"S" + std::to_string(k), testing::RandomHypothesis(rng, "u", 10)});
      longest = std::max(longest, in.back().second.tokens.size());
      total += in.back().second.tokens.size();
    }
    const WordTransitionNetwork wtn = BuildWtn(in);
    if (!testing::PathsPreserved(wtn, in)) ++path_violations;
    if (wtn.sets.size() < longest || wtn.sets.size() > total) ++bound_violations;

    // combine([X]) and combine([X, ..., X]) give back X's tokens.
    const SystemOutput x{"X", {{"u", in[0].second}}};
    std::vector<SystemOutput> copies;
    for (std::size_t k = 0; k < systems; ++k) {
      copies.push_back(x);
      copies.back().system_id = "X" + std::to_string(k);
    }
    const std::vector<SystemOutput> single = {x};
    const std::vector<SystemOutput>* groups[] = {&single, &copies};
    for (const auto* group : groups) {
      if (Combine(*group, {}).ToHypothesisMap() != x.ToHypothesisMap()) ++identity_violations;
    }
  }
  const std::size_t violations = path_violations + identity_violations + bound_violations;
  return {violations == 0,
          Format("1000 cases, %zu path, %zu idempotence, %zu set-count violations",
                 path_violations, identity_violations, bound_violations)};
}

// Profiles A and B, their element-wise mean, and two ensembles over a
// fully code-switched corpus.
PipelineConfig OpposedBiasConfig(std::uint64_t seed) {
  PipelineConfig c;
  c.seed = seed;
  SyntheticCorpusSpec corpus;
  corpus.name = "cs";
  corpus.utterances = 2000;
  corpus.frac_code_switched = 1.0;
  corpus.frac_man_only = 0.0;
  c.corpus.synthetic = corpus;
  auto profile = [](const char* name, double eng, double man) {
    SystemProfile p;
    p.name = name;
    p.match_eng = eng;
    p.match_man = man;
    return p;
  };
  c.profiles = {profile("A", 0.45, 0.85), profile("B", 0.85, 0.45),
                profile("pooled", 0.65, 0.65)};
  EnsembleSpec ab;
  ab.name = "A+B";
  ab.members = {{"A", "A", std::nullopt, 0.0}, {"B", "B", std::nullopt, 0.0}};
  EnsembleSpec pooled;
  pooled.name = "pooled-only";
  pooled.members = {{"pooled", "pooled", std::nullopt, 0.0}};
  c.ensembles = {ab, pooled};
  return c;
}

double Gap(const SubstitutionMatrix& m) {
  return std::abs(m.pct_eng_as_man().value_or(0.0) - m.pct_man_as_eng().value_or(0.0));
}

struct OpposedBiasRuns {
  int mer_and_gap_ok = 0;
  int pooled_worse = 0;
  double seconds = 0.0;
};

OpposedBiasRuns RunOpposedBias() {
  OpposedBiasRuns out;
  const auto start = Clock::now();
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto results = RunEnsembles(OpposedBiasConfig(seed), {"A+B", "pooled-only"});
    const EnsembleResult& ab = results[0];
    const EnsembleResult& pooled = results[1];
    round_trip.Check(ab.combined);

    const double combined_mer = *ab.combined_report.errors.mer_all;
    const double combined_gap = Gap(ab.combined_report.subs);
    bool ok = true;
    for (const SystemReport& m : ab.member_reports) {
      ok = ok && combined_mer < *m.errors.mer_all && combined_gap < Gap(m.subs);
    }
    if (ok) ++out.mer_and_gap_ok;
    if (*pooled.combined_report.errors.mer_all > combined_mer) ++out.pooled_worse;
  }
  out.seconds = Seconds(start);
  return out;
}

Outcome RoverFiveVersusOne(const PipelineConfig& shipped) {
  const auto start = Clock::now();
  double sum1 = 0.0, sum5 = 0.0;
  const int seeds = 30;
  for (int seed = 1; seed <= seeds; ++seed) {
    PipelineConfig c = shipped;
    c.seed = static_cast<std::uint64_t>(seed);
    const auto results = RunEnsembles(c, {"ROVER1", "ROVER5"});
    sum1 += *results[0].combined_report.errors.mer_all;
    sum5 += *results[1].combined_report.errors.mer_all;
    round_trip.Check(results[0].combined);
    round_trip.Check(results[1].combined);
  }
  const double mean1 = sum1 / seeds, mean5 = sum5 / seeds;
  const double secs = Seconds(start);
  return {mean5 <= mean1 && mean1 - mean5 > 0.0 && secs < 120.0,
          Format("mean MER(All) ROVER1 %.2f, ROVER5 %.2f, improvement %.2f, %.1f s", mean1,
                 mean5, mean1 - mean5, secs)};
}

Outcome Calibration(const PipelineConfig& shipped) {
  SyntheticCorpusSpec spec;
  spec.name = "calibration";
  spec.utterances = 30000;
  spec.seed = 99;
  const Corpus refs = GenerateSyntheticCorpus(spec);
  const VocabPools pools = VocabPools::FromCorpus(refs);
  double worst = 0.0;
  std::uint64_t min_tokens = ~0ull;
  for (const SystemProfile& profile : shipped.Resolved().profiles) {
    SimulationTrace trace;
    SimulateSystem(profile, refs, pools, &trace);
    for (auto lang : {LanguageTag::kEng, LanguageTag::kMan}) {
      const auto& counts = trace.events[static_cast<std::size_t>(lang)];
      const std::uint64_t n = counts[0] + counts[1] + counts[2] + counts[3];
      min_tokens = std::min(min_tokens, n);
      const EventProbs probs = DeriveEventProbs(profile, lang);
      for (auto e : {NoiseEvent::kCorrect, NoiseEvent::kCrossSub, NoiseEvent::kSameSub,
                     NoiseEvent::kDel}) {
        const double freq = static_cast<double>(counts[static_cast<std::size_t>(e)]) / n;
        worst = std::max(worst, std::abs(freq - probs.Get(e)));
      }
    }
  }
  return {worst <= 0.01 && min_tokens >= 100000,
          Format("%zu profiles, >= %llu tokens per language, worst cell deviation %.4f",
                 shipped.profiles.size(), static_cast<unsigned long long>(min_tokens), worst)};
}

Outcome LanguageModelSuite() {
  SyntheticCorpusSpec spec;
  spec.utterances = 1000;
  spec.seed = 123;
  const Corpus corpus = GenerateSyntheticCorpus(spec);
  std::vector<Utterance> man, eng;
  for (const Utterance& u : corpus.utterances()) {
    for (Utterance& run : SplitAtLanguageBoundaries(u, 1)) {
      (run.tokens[0].lang == LanguageTag::kMan ? man : eng).push_back(std::move(run));
    }
  }
  auto man_lm = std::make_shared<const TrigramLM>(TrigramLM::Train(Corpus("man", man)));
  auto eng_lm = std::make_shared<const TrigramLM>(TrigramLM::Train(Corpus("eng", eng)));
  auto mix = [&](double l) {
    return InterpolatedLM({{"man", man_lm}, {"eng", eng_lm}}, std::vector<double>{l, 1.0 - l});
  };
  auto mass = [](const LanguageModel& lm, std::span<const Token> h) {
    double sum = lm.Prob(h, nullptr) + lm.UnkProb(h);
    for (const Token& t : lm.Vocabulary()) sum += lm.Prob(h, &t);
    return sum;
  };

  Rng rng(2026);
  const InterpolatedLM half = mix(0.5), lo = mix(0.2), mid = mix(0.5), hi = mix(0.9);
  double worst_norm = 0.0, worst_linear = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Utterance& u = corpus.utterances()[rng.Index(corpus.size())];
    const std::size_t end = rng.Index(u.tokens.size() + 1);
    std::vector<Token> h(u.tokens.begin(), u.tokens.begin() + end);
    for (const LanguageModel* lm :
         {static_cast<const LanguageModel*>(man_lm.get()),
          static_cast<const LanguageModel*>(eng_lm.get()),
          static_cast<const LanguageModel*>(&half)}) {
      worst_norm = std::max(worst_norm, std::abs(mass(*lm, h) - 1.0));
    }
    const Token& w = half.Vocabulary()[rng.Index(half.Vocabulary().size())];
    const double a = lo.Prob(h, &w), b = mid.Prob(h, &w), c = hi.Prob(h, &w);
    worst_linear = std::max(worst_linear, std::abs((b - a) / 0.3 - (c - a) / 0.7));
  }

  const InterpolatedLM man_only = mix(1.0), eng_only = mix(0.0);
  std::size_t onehot_mismatch = 0;
  for (const Utterance& u : man) {
    if (SequenceLogProb(man_only, u.tokens) != SequenceLogProb(*man_lm, u.tokens)) {
      ++onehot_mismatch;
    }
  }
  for (const Utterance& u : eng) {
    if (SequenceLogProb(eng_only, u.tokens) != SequenceLogProb(*eng_lm, u.tokens)) {
      ++onehot_mismatch;
    }
  }
  return {worst_norm <= 1e-9 && onehot_mismatch == 0 && worst_linear <= 1e-12,
          Format("max |sum - 1| %.2e, one-hot mismatches %zu, collinearity residual %.2e",
                 worst_norm, onehot_mismatch, worst_linear)};
}

std::vector<std::pair<std::string, std::string>> RunToFiles(const PipelineConfig& config,
                                                            const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::vector<std::string> names;
  for (const EnsembleSpec& e : config.ensembles) names.push_back(e.name);
  const Corpus refs = LoadReferenceCorpus(config.Resolved());
  for (const EnsembleResult& r : RunEnsembles(config, names)) {
    EmitReports(r, dir);
    std::ostringstream manifest;
    WriteManifest(manifest, EmitPseudoTranscripts(r, refs).manifest);
    WriteFileOrThrow(dir / (r.name + ".pseudo.tsv"), manifest.str());
    round_trip.Check(r.combined);
  }
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    files.push_back({entry.path().filename().string(), ReadFileOrThrow(entry.path())});
  }
  std::sort(files.begin(), files.end());
  return files;
}

Outcome Determinism(const PipelineConfig& shipped) {
  const fs::path base = fs::temp_directory_path() / "csrover_acceptance";
  const auto a = RunToFiles(shipped, base / "a");
  const auto b = RunToFiles(shipped, base / "b");
  fs::remove_all(base);
  std::size_t differing = a.size() == b.size() ? 0 : 1;
  for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
    if (a[k] != b[k]) ++differing;
  }
  return {differing == 0 && !a.empty(),
          Format("%zu files per run, %zu differing", a.size(), differing)};
}

int Main(int argc, char** argv) {
  const fs::path config_path =
      argc > 1 ? fs::path(argv[1]) : fs::path(CSROVER_SOURCE_DIR) / "configs/rover_analogues.json";
  const PipelineConfig shipped = LoadConfigFile(config_path);

  std::vector<std::pair<std::string, Outcome>> rows;
  auto record = [&](int n, const char* name, Outcome o) {
    std::printf("criterion %d %s %s: %s\n", n, o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    rows.push_back({name, std::move(o)});
  };

  record(1, "alignment oracle", AlignmentOracle());
  record(2, "WTN path preservation and idempotence", WtnProperties());
  const OpposedBiasRuns opposed = RunOpposedBias();
  record(3, "opposed-bias combination", {opposed.mer_and_gap_ok >= 95 && opposed.seconds < 60.0,
                                         Format("%d/100 seeds with lower MER and smaller gap, %.1f s",
                                                opposed.mer_and_gap_ok, opposed.seconds)});
  record(4, "ROVER5 versus ROVER1", RoverFiveVersusOne(shipped));
  record(5, "pooled member versus A+B",
         {opposed.pooled_worse >= 90,
          Format("%d/100 seeds where the pooled member is worse", opposed.pooled_worse)});
  record(6, "simulator calibration", Calibration(shipped));
  record(7, "language model suite", LanguageModelSuite());
  record(8, "run-ensemble determinism", Determinism(shipped));
  record(9, "pseudo-transcript round trip",
         {round_trip.mismatches == 0 && round_trip.utterances > 0,
          Format("%zu utterances, %zu mismatches", round_trip.utterances, round_trip.mismatches)});

  bool all = true;
  for (const auto& [name, o] : rows) all = all && o.pass;
  return all ? 0 : 1;
}

}  // namespace
}  // namespace csrover

int main(int argc, char** argv) {
  try {
    return csrover::Main(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance: %s\n", e.what());
    return 3;
  }
}
