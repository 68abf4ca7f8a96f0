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

// csrover command-line tool. Run "csrover --help" for the subcommands.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csrover/core_model.h"
#include "csrover/error.h"
#include "csrover/io.h"
#include "csrover/lm.h"
#include "csrover/pipeline.h"
#include "csrover/rover.h"
#include "csrover/scoring.h"
#include "csrover/simulator.h"

namespace csrover {
namespace {

namespace fs = std::filesystem;

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
  std::string scope;
  std::optional<double> alpha;
  std::optional<double> null_conf;
  std::string vote_stat;
  std::size_t min_tokens = 2;
};

ScoringScope ScopeFrom(const GlobalFlags& g, ScoringScope fallback) {
  if (g.scope.empty()) return fallback;
  auto scope = ParseScope(g.scope);
  if (!scope) throw ValidationError("--scope: expected category or token-language");
  return *scope;
}

VoteConfig VoteFrom(const GlobalFlags& g, VoteConfig vote) {
  if (g.alpha) vote.alpha = *g.alpha;
  if (g.null_conf) vote.null_conf = *g.null_conf;
  if (!g.vote_stat.empty()) {
    auto stat = ParseVoteStat(g.vote_stat);
    if (!stat) throw ValidationError("--vote-stat: expected max-conf, avg-conf or frequency");
    vote.stat = *stat;
  }
  vote.Validate();
  return vote;
}

PipelineConfig ConfigFrom(const GlobalFlags& g) {
  if (g.config.empty()) throw ValidationError("--config is required");
  PipelineConfig config = LoadConfigFile(g.config);
  if (g.seed) config.seed = *g.seed;
  config.scope = ScopeFrom(g, config.scope);
  if (g.alpha || g.null_conf || !g.vote_stat.empty()) {
    for (EnsembleSpec& e : config.ensembles) e.vote = VoteFrom(g, e.vote);
  }
  config.Validate();
  return config.Resolved();
}

// Writes to the --out file, or stdout when it is empty or "-".
void Emit(const GlobalFlags& g, const std::string& text) {
  if (g.out.empty() || g.out == "-") {
    std::cout << text;
    return;
  }
  WriteFileOrThrow(g.out, text);
}

fs::path OutDir(const GlobalFlags& g) {
  if (g.out.empty()) throw ValidationError("--out <dir> is required");
  std::error_code ec;
  fs::create_directories(g.out, ec);
  if (ec) throw IoError("cannot create '" + g.out + "': " + ec.message());
  return g.out;
}

std::string ReadInput(const std::string& path) {
  if (path.empty() || path == "-") {
    std::ostringstream buffer;
    buffer << std::cin.rdbuf();
    return buffer.str();
  }
  return ReadFileOrThrow(path);
}

int Tokenize(const std::string& input, const GlobalFlags& g) {
  std::istringstream in(ReadInput(input));
  std::ostringstream out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<Token> tokens;
    try {
      tokens = TokenizeMixed(line);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
    for (std::size_t k = 0; k < tokens.size(); ++k) {
      out << (k ? " " : "") << tokens[k].surface << '/' << LanguageName(tokens[k].lang);
    }
    out << '\n';
  }
  Emit(g, out.str());
  return 0;
}

int Split(const std::string& input, const GlobalFlags& g) {
  const Corpus corpus = ReadTranscriptFile(input);
  std::vector<Utterance> runs;
  for (const Utterance& u : corpus.utterances()) {
    for (Utterance& run : SplitAtLanguageBoundaries(u, g.min_tokens)) {
      runs.push_back(std::move(run));
    }
  }
  std::ostringstream out;
  WriteTranscript(out, Corpus(corpus.name(), std::move(runs)));
  Emit(g, out.str());
  return 0;
}

int Score(const std::string& ref_path, const std::vector<std::string>& hyp_paths,
          const GlobalFlags& g) {
  const Corpus refs = ReadTranscriptFile(ref_path);
  const ScoringScope scope = ScopeFrom(g, ScoringScope::kByUtteranceCategory);
  std::vector<SystemReport> rows;
  for (const std::string& path : hyp_paths) {
    const SystemOutput hyp = ReadHypothesisFile(path);
    const HypothesisMap map = hyp.ToHypothesisMap();
    rows.push_back({hyp.system_id, ScoreCorpus(refs, map, scope),
                    ComputeSubstitutionMatrix(refs, map)});
  }
  Emit(g, FormatReportTable(rows));
  return 0;
}

int SubsMatrix(const std::string& ref_path, const std::string& hyp_path, const GlobalFlags& g) {
  const Corpus refs = ReadTranscriptFile(ref_path);
  const SubstitutionMatrix m =
      ComputeSubstitutionMatrix(refs, ReadHypothesisFile(hyp_path).ToHypothesisMap());
  std::ostringstream out;
  out << "eng_refs " << m.eng_refs << '\n'
      << "eng_refs_subbed_by_man " << m.eng_refs_subbed_by_man << '\n'
      << "man_refs " << m.man_refs << '\n'
      << "man_refs_subbed_by_eng " << m.man_refs_subbed_by_eng << '\n'
      << "pct_eng_as_man " << FormatRate(m.pct_eng_as_man()) << '\n'
      << "pct_man_as_eng " << FormatRate(m.pct_man_as_eng()) << '\n';
  Emit(g, out.str());
  return 0;
}

int Rover(const std::vector<std::string>& hyp_paths, const GlobalFlags& g) {
  std::vector<SystemOutput> outputs;
  for (const std::string& path : hyp_paths) outputs.push_back(ReadHypothesisFile(path));
  const SystemOutput combined = Combine(outputs, VoteFrom(g, VoteConfig{}));
  std::ostringstream out;
  WriteHypotheses(out, combined);
  Emit(g, out.str());
  return 0;
}

int LmTrain(const std::string& input, double unk_prob, const GlobalFlags& g) {
  const TrigramLM lm = TrigramLM::Train(ReadTranscriptFile(input), unk_prob);
  std::ostringstream out;
  lm.Save(out);
  Emit(g, out.str());
  return 0;
}

std::pair<std::string, std::string> SplitPair(const std::string& text, const char* flag) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
    throw ValidationError(std::string(flag) + ": expected name=value, got '" + text + "'");
  }
  return {text.substr(0, eq), text.substr(eq + 1)};
}

int LmPpl(const std::string& input, const std::vector<std::string>& lm_args,
          const std::vector<std::string>& weight_args, const GlobalFlags& g) {
  if (lm_args.empty()) throw ValidationError("--lm: at least one model is required");
  std::vector<InterpolatedLM::Component> components;
  for (const std::string& arg : lm_args) {
    std::string name;
    fs::path path;
    if (arg.find('=') != std::string::npos) {
      auto [n, p] = SplitPair(arg, "--lm");
      name = n;
      path = p;
    } else {
      path = arg;
      name = path.stem().string();
    }
    std::istringstream in(ReadFileOrThrow(path));
    components.push_back({name, std::make_shared<const TrigramLM>(TrigramLM::Load(in, name))});
  }
  std::optional<std::vector<double>> weights;
  if (!weight_args.empty()) {
    std::map<std::string, double> by_name;
    for (const std::string& arg : weight_args) {
      auto [name, value] = SplitPair(arg, "--weight");
      try {
        std::size_t used = 0;
        by_name[name] = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
      } catch (const std::exception&) {
        throw ValidationError("--weight: bad number '" + value + "'");
      }
    }
    weights.emplace();
    for (const auto& c : components) {
      auto it = by_name.find(c.name);
      if (it == by_name.end()) throw ValidationError("--weight: no weight for '" + c.name + "'");
      weights->push_back(it->second);
      by_name.erase(it);
    }
    if (!by_name.empty()) {
      throw ValidationError("--weight: no model named '" + by_name.begin()->first + "'");
    }
  }
  const InterpolatedLM lm(std::move(components), weights);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f\n", Perplexity(lm, ReadTranscriptFile(input)));
  Emit(g, buf);
  return 0;
}

struct SimulateArgs {
  std::string profile;
  std::string refs;
  std::optional<double> match_eng;
  std::optional<double> match_man;
};

int Simulate(const SimulateArgs& args, const GlobalFlags& g) {
  SystemProfile profile;
  std::optional<PipelineConfig> config;
  if (!g.config.empty()) config = ConfigFrom(g);
  if (!args.profile.empty()) {
    if (!config) throw ValidationError("--profile needs --config");
    profile = config->Profile(args.profile);
  } else {
    if (!args.match_eng || !args.match_man) {
      throw ValidationError("give --profile, or both --match-eng and --match-man");
    }
    profile.name = "sim";
    profile.match_eng = *args.match_eng;
    profile.match_man = *args.match_man;
    profile.seed = g.seed.value_or(0);
  }
  if (args.match_eng) profile.match_eng = *args.match_eng;
  if (args.match_man) profile.match_man = *args.match_man;
  profile.Validate();

  Corpus refs;
  if (!args.refs.empty()) {
    refs = ReadTranscriptFile(args.refs);
  } else if (config) {
    refs = LoadReferenceCorpus(*config);
  } else {
    throw ValidationError("give --refs, or a --config with a corpus");
  }

  const SimulationResult sim = SimulateSystem(profile, refs, VocabPools::FromCorpus(refs));
  const fs::path dir = OutDir(g);
  std::ostringstream ref_text;
  std::ostringstream hyp_text;
  std::ostringstream nbest_text;
  WriteTranscript(ref_text, refs);
  WriteHypotheses(hyp_text, sim.output);
  WriteNBest(nbest_text, sim.nbest);
  WriteFileOrThrow(dir / "refs.txt", ref_text.str());
  WriteFileOrThrow(dir / (profile.name + ".hyp"), hyp_text.str());
  WriteFileOrThrow(dir / (profile.name + ".nbest"), nbest_text.str());
  return 0;
}

std::vector<std::string> EnsembleNames(const PipelineConfig& config,
                                       const std::vector<std::string>& requested) {
  if (!requested.empty()) {
    for (const std::string& name : requested) config.Ensemble(name);
    return requested;
  }
  std::vector<std::string> names;
  for (const EnsembleSpec& e : config.ensembles) names.push_back(e.name);
  return names;
}

int RunEnsembleCommand(const std::vector<std::string>& requested, const GlobalFlags& g) {
  const PipelineConfig config = ConfigFrom(g);
  const fs::path dir = OutDir(g);
  for (const EnsembleResult& result : RunEnsembles(config, EnsembleNames(config, requested))) {
    EmitReports(result, dir);
    std::cout << FormatReportTable(result) << '\n';
  }
  return 0;
}

int EmitPseudo(const std::vector<std::string>& requested, const std::string& hyp_path,
               const std::string& unlabeled_path, const GlobalFlags& g) {
  const fs::path dir = OutDir(g);
  auto write = [&](const PseudoTranscriptSet& set) {
    std::ostringstream out;
    WriteManifest(out, set.manifest);
    WriteFileOrThrow(dir / (set.source + ".pseudo.tsv"), out.str());
  };

  if (!hyp_path.empty()) {
    if (unlabeled_path.empty()) throw ValidationError("--hyp needs --unlabeled");
    SystemOutput combined = ReadHypothesisFile(hyp_path);
    write(EmitPseudoTranscripts(combined, ReadTranscriptFile(unlabeled_path)));
    return 0;
  }

  const PipelineConfig config = ConfigFrom(g);
  Corpus unlabeled;
  if (!unlabeled_path.empty()) {
    unlabeled = ReadTranscriptFile(unlabeled_path);
  } else if (config.unlabeled) {
    unlabeled = ReadTranscriptFile(*config.unlabeled);
  } else {
    unlabeled = LoadReferenceCorpus(config);
  }
  for (const EnsembleResult& result : RunEnsembles(config, EnsembleNames(config, requested))) {
    write(EmitPseudoTranscripts(result, unlabeled));
  }
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"Code-switched ASR scoring, ROVER combination and simulation"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--seed", g.seed, "Global seed; re-derives profile and corpus seeds");
  app.add_option("--config", g.config, "Pipeline config (JSON, comments allowed)");
  app.add_option("--out", g.out, "Output file or directory");
  app.add_option("--scope", g.scope, "Scoring scope: category | token-language");
  app.add_option("--alpha", g.alpha, "Vote weight of frequency versus confidence");
  app.add_option("--null-conf", g.null_conf, "Confidence of the NULL candidate");
  app.add_option("--vote-stat", g.vote_stat, "max-conf | avg-conf | frequency");
  app.add_option("--min-tokens", g.min_tokens, "Minimum run length for split")
      ->check(CLI::PositiveNumber);

  std::string input;
  auto* tokenize = app.add_subcommand("tokenize", "Tokenize raw text lines");
  tokenize->add_option("input", input, "Text file, or - for stdin");

  auto* split = app.add_subcommand("split", "Split a transcript at language boundaries");
  split->add_option("transcript", input)->required();

  std::string ref;
  std::vector<std::string> hyps;
  auto* score = app.add_subcommand("score", "Score hypothesis files against a transcript");
  score->add_option("ref", ref)->required();
  score->add_option("hyp", hyps)->required();

  std::string hyp;
  auto* subs = app.add_subcommand("subs-matrix", "Cross-language substitution counts");
  subs->add_option("ref", ref)->required();
  subs->add_option("hyp", hyp)->required();

  auto* rover = app.add_subcommand("rover", "Combine hypothesis files");
  rover->add_option("hyp", hyps)->required();

  double unk_prob = kDefaultUnkProb;
  auto* lm_train = app.add_subcommand("lm-train", "Train a Witten-Bell trigram LM");
  lm_train->add_option("transcript", input)->required();
  lm_train->add_option("--unk-prob", unk_prob);

  std::vector<std::string> lms;
  std::vector<std::string> weights;
  auto* lm_ppl = app.add_subcommand("lm-ppl", "Perplexity of a (possibly interpolated) LM");
  lm_ppl->add_option("transcript", input)->required();
  lm_ppl->add_option("--lm", lms, "Model file, or name=file; repeatable")->required();
  lm_ppl->add_option("--weight", weights, "name=weight; repeatable");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Simulate one system's output");
  simulate->add_option("--profile", sim_args.profile, "Profile name from --config");
  simulate->add_option("--refs", sim_args.refs, "Reference transcript");
  simulate->add_option("--match-eng", sim_args.match_eng);
  simulate->add_option("--match-man", sim_args.match_man);

  std::vector<std::string> ensembles;
  auto* run = app.add_subcommand("run-ensemble", "Run ensembles and write reports");
  run->add_option("--ensemble", ensembles, "Ensemble name; repeatable; default all");

  std::string unlabeled;
  auto* pseudo = app.add_subcommand("emit-pseudo", "Write pseudo-transcript manifests");
  pseudo->add_option("--ensemble", ensembles, "Ensemble name; repeatable; default all");
  pseudo->add_option("--hyp", hyp, "Use this combined hypothesis file instead of a config");
  pseudo->add_option("--unlabeled", unlabeled, "Transcript listing the utterances to emit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*tokenize) return Tokenize(input, g);
  if (*split) return Split(input, g);
  if (*score) return Score(ref, hyps, g);
  if (*subs) return SubsMatrix(ref, hyp, g);
  if (*rover) return Rover(hyps, g);
  if (*lm_train) return LmTrain(input, unk_prob, g);
  if (*lm_ppl) return LmPpl(input, lms, weights, g);
  if (*simulate) return Simulate(sim_args, g);
  if (*run) return RunEnsembleCommand(ensembles, g);
  if (*pseudo) return EmitPseudo(ensembles, hyp, unlabeled, g);
  return 1;
}

}  // namespace
}  // namespace csrover

int main(int argc, char** argv) {
  try {
    return csrover::Main(argc, argv);
  } catch (const csrover::ValidationError& e) {
    std::cerr << "csrover: " << e.what() << '\n';
    return 1;
  } catch (const csrover::IoError& e) {
    std::cerr << "csrover: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "csrover: internal error: " << e.what() << '\n';
    return 3;
  }
}
