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

// Ensemble orchestration: simulate member systems, optionally rescore their
// n-best lists with a language-biased interpolated LM, combine them with
// ROVER, score everything against the references, and write reports and
// pseudo-transcripts.

#ifndef CSROVER_PIPELINE_H_
#define CSROVER_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csrover/core_model.h"
#include "csrover/lm.h"
#include "csrover/rover.h"
#include "csrover/scoring.h"
#include "csrover/simulator.h"

namespace csrover {

// Names of the two LM components built from the monolingual stretches of
// the reference text.
inline constexpr std::string_view kManComponent = "man";
inline constexpr std::string_view kEngComponent = "eng";

struct MemberSpec {
  std::string name;     // system id of this member's output
  std::string profile;  // SystemProfile name
  // Component name -> weight. Unset means uniform.
  std::optional<std::map<std::string, double>> lm_weights;
  double lm_scale = 0.0;  // 0 keeps the simulated top-1

  friend bool operator==(const MemberSpec&, const MemberSpec&) = default;
};

enum class CombinationMode { kFlat, kCascaded };

std::string_view ModeName(CombinationMode mode);

struct EnsembleSpec {
  std::string name;
  std::vector<MemberSpec> members;
  // Other ensembles folded into this one. Flat mode votes over all their
  // leaf members at once; cascaded mode votes over their combined outputs.
  std::vector<std::string> includes;
  CombinationMode mode = CombinationMode::kFlat;
  VoteConfig vote;
};

struct SystemReport {
  std::string label;
  ErrorReport errors;
  SubstitutionMatrix subs;
};

struct EnsembleResult {
  std::string name;
  SystemOutput combined;
  std::vector<SystemOutput> members;  // leaf members, sorted by system id
  std::vector<SystemReport> member_reports;
  SystemReport combined_report;
  // Self-contained config document that replays this run.
  std::string provenance;
};

struct PseudoTranscriptSet {
  std::string source;
  std::map<std::string, std::vector<Token>> manifest;
};

// Where the reference corpus comes from.
struct CorpusSource {
  std::optional<std::filesystem::path> path;
  std::optional<SyntheticCorpusSpec> synthetic;
};

struct PipelineConfig {
  std::optional<std::uint64_t> seed;  // re-derives every seed when set
  CorpusSource corpus;
  std::optional<std::filesystem::path> unlabeled;
  double unk_prob = kDefaultUnkProb;
  ScoringScope scope = ScoringScope::kByUtteranceCategory;
  std::vector<SystemProfile> profiles;
  std::vector<EnsembleSpec> ensembles;

  // Throws ValidationError with a field path such as
  // "ensembles[1].members[0].profile".
  void Validate() const;
  // Replaces the global seed with explicit per-profile and corpus seeds:
  //   profile seed = SplitMix64(seed ^ HashName(profile name))
  //   corpus seed  = SplitMix64(seed ^ HashName("corpus"))
  PipelineConfig Resolved() const;
  const SystemProfile& Profile(std::string_view name) const;
  const EnsembleSpec& Ensemble(std::string_view name) const;
};

// JSON (comments allowed). Relative paths resolve against base_dir.
PipelineConfig ParseConfig(std::string_view text,
                           const std::filesystem::path& base_dir = {});
PipelineConfig LoadConfigFile(const std::filesystem::path& path);
// Deterministic JSON; ParseConfig(SerializeConfig(c)) == c.
std::string SerializeConfig(const PipelineConfig& config);

// Runs ensembles against one reference corpus, caching simulations and
// member outputs across ensembles. Profiles and ensembles are read-only.
class EnsembleRunner {
 public:
  EnsembleRunner(const Corpus& refs, std::vector<SystemProfile> profiles,
                 std::vector<EnsembleSpec> ensembles,
                 double unk_prob = kDefaultUnkProb,
                 ScoringScope scope = ScoringScope::kByUtteranceCategory);
  ~EnsembleRunner();

  EnsembleResult Run(const std::string& ensemble_name);
  // Output of a single member, simulated and rescored.
  const SystemOutput& MemberOutput(const MemberSpec& member);

 private:
  struct Cache;
  SystemOutput Combined(const EnsembleSpec& spec, std::vector<std::string>& stack);
  void CollectLeaves(const EnsembleSpec& spec, std::vector<MemberSpec>& leaves,
                     std::vector<std::string>& stack) const;
  const EnsembleSpec& Find(std::string_view name) const;
  const InterpolatedLM& LmFor(const MemberSpec& member);
  void Prefetch(const std::vector<MemberSpec>& members);
  SystemReport Report(const std::string& label, const SystemOutput& output) const;

  const Corpus& refs_;
  std::vector<SystemProfile> profiles_;
  std::vector<EnsembleSpec> ensembles_;
  double unk_prob_;
  ScoringScope scope_;
  std::unique_ptr<Cache> cache_;
};

// Runs one ensemble of a configuration on its (loaded or generated)
// reference corpus.
EnsembleResult RunEnsemble(const PipelineConfig& config, const std::string& name);
// Same, for several ensembles sharing one simulation cache.
std::vector<EnsembleResult> RunEnsembles(const PipelineConfig& config,
                                         const std::vector<std::string>& names);
// Loads or generates the reference corpus of a (resolved) configuration.
Corpus LoadReferenceCorpus(const PipelineConfig& config);

// Text table and JSON twin. Columns: CER(M) WER(E) MER(CS) MER(All)
// %Eng-as-Man %Man-as-Eng System. One row per member then the combined row.
std::string FormatReportTable(const EnsembleResult& result);
std::string FormatReportTable(std::span<const SystemReport> rows);
std::string FormatReportJson(const EnsembleResult& result);

// Writes <name>.report.txt, <name>.report.json, <name>.provenance.json and
// <name>.hyp into dir. Throws IoError.
std::vector<std::filesystem::path> EmitReports(const EnsembleResult& result,
                                               const std::filesystem::path& dir);

// Throws ValidationError if an unlabeled utterance has no combined output.
PseudoTranscriptSet EmitPseudoTranscripts(const EnsembleResult& result,
                                          const Corpus& unlabeled);
PseudoTranscriptSet EmitPseudoTranscripts(const SystemOutput& combined,
                                          const Corpus& unlabeled);

}  // namespace csrover

#endif  // CSROVER_PIPELINE_H_
