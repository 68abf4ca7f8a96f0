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

#include "csrover/pipeline.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <set>
#include <sstream>

#include "json.hpp"

#include "csrover/error.h"
#include "csrover/io.h"
#include "csrover/random.h"

namespace csrover {

using Json = nlohmann::ordered_json;

std::string_view ModeName(CombinationMode mode) {
  return mode == CombinationMode::kFlat ? "flat" : "cascaded";
}

// --- configuration ---------------------------------------------------------

void PipelineConfig::Validate() const {
  if (corpus.path.has_value() == corpus.synthetic.has_value()) {
    throw ValidationError("corpus: exactly one of 'path' or 'synthetic' is required");
  }
  if (corpus.synthetic) {
    try {
      corpus.synthetic->Validate();
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("corpus.synthetic: ") + e.what());
    }
  }
  if (!(unk_prob > 0.0 && unk_prob < 1.0)) {
    throw ValidationError("unk_prob: must be in (0, 1)");
  }

  std::set<std::string> profile_names;
  for (std::size_t p = 0; p < profiles.size(); ++p) {
    const std::string at = "profiles[" + std::to_string(p) + "]";
    if (profiles[p].name.empty()) throw ValidationError(at + ".name: must be non-empty");
    if (!profile_names.insert(profiles[p].name).second) {
      throw ValidationError(at + ".name: duplicate profile '" + profiles[p].name + "'");
    }
    try {
      profiles[p].Validate();
    } catch (const ValidationError& e) {
      throw ValidationError(at + ": " + e.what());
    }
  }

  std::set<std::string> ensemble_names;
  for (const EnsembleSpec& e : ensembles) {
    if (e.name.empty()) throw ValidationError("ensembles: empty ensemble name");
    if (!ensemble_names.insert(e.name).second) {
      throw ValidationError("ensembles: duplicate ensemble '" + e.name + "'");
    }
  }
  for (std::size_t k = 0; k < ensembles.size(); ++k) {
    const EnsembleSpec& e = ensembles[k];
    const std::string at = "ensembles[" + std::to_string(k) + "]";
    if (e.members.empty() && e.includes.empty()) {
      throw ValidationError(at + ": needs at least one member or include");
    }
    try {
      e.vote.Validate();
    } catch (const ValidationError& err) {
      throw ValidationError(at + ".vote: " + err.what());
    }
    std::set<std::string> member_names;
    for (std::size_t m = 0; m < e.members.size(); ++m) {
      const MemberSpec& member = e.members[m];
      const std::string mat = at + ".members[" + std::to_string(m) + "]";
      if (member.name.empty()) throw ValidationError(mat + ".name: must be non-empty");
      if (!member_names.insert(member.name).second) {
        throw ValidationError(mat + ".name: duplicate member '" + member.name + "'");
      }
      if (ensemble_names.count(member.name)) {
        throw ValidationError(mat + ".name: '" + member.name +
                              "' collides with an ensemble name");
      }
      if (!profile_names.count(member.profile)) {
        throw ValidationError(mat + ".profile: unknown profile '" + member.profile + "'");
      }
      if (!(member.lm_scale >= 0.0) || !std::isfinite(member.lm_scale)) {
        throw ValidationError(mat + ".lm_scale: must be a non-negative number");
      }
      if (member.lm_weights) {
        double sum = 0.0;
        for (const auto& [component, w] : *member.lm_weights) {
          if (component != kManComponent && component != kEngComponent) {
            throw ValidationError(mat + ".lm_weights." + component +
                                  ": unknown component (expected 'man' or 'eng')");
          }
          if (!(w >= 0.0)) {
            throw ValidationError(mat + ".lm_weights." + component + ": must be >= 0");
          }
          sum += w;
        }
        if (member.lm_weights->size() != 2) {
          throw ValidationError(mat + ".lm_weights: both 'man' and 'eng' are required");
        }
        if (std::abs(sum - 1.0) > 1e-9) {
          throw ValidationError(mat + ".lm_weights: must sum to 1");
        }
      }
    }
    for (std::size_t i = 0; i < e.includes.size(); ++i) {
      if (!ensemble_names.count(e.includes[i])) {
        throw ValidationError(at + ".includes[" + std::to_string(i) +
                              "]: unknown ensemble '" + e.includes[i] + "'");
      }
    }
  }

  // Include cycles.
  std::map<std::string, int> state;  // 1 visiting, 2 done
  std::function<void(const EnsembleSpec&)> visit = [&](const EnsembleSpec& e) {
    int& s = state[e.name];
    if (s == 2) return;
    if (s == 1) throw ValidationError("ensembles: include cycle through '" + e.name + "'");
    s = 1;
    for (const std::string& inc : e.includes) visit(Ensemble(inc));
    state[e.name] = 2;
  };
  for (const EnsembleSpec& e : ensembles) visit(e);
}

const SystemProfile& PipelineConfig::Profile(std::string_view name) const {
  for (const SystemProfile& p : profiles) {
    if (p.name == name) return p;
  }
  throw ValidationError("unknown profile '" + std::string(name) + "'");
}

const EnsembleSpec& PipelineConfig::Ensemble(std::string_view name) const {
  for (const EnsembleSpec& e : ensembles) {
    if (e.name == name) return e;
  }
  throw ValidationError("unknown ensemble '" + std::string(name) + "'");
}

PipelineConfig PipelineConfig::Resolved() const {
  PipelineConfig out = *this;
  if (!seed) return out;
  for (SystemProfile& p : out.profiles) p.seed = SplitMix64(*seed ^ HashName(p.name));
  if (out.corpus.synthetic) {
    out.corpus.synthetic->seed = SplitMix64(*seed ^ HashName("corpus"));
  }
  out.seed.reset();
  return out;
}

namespace {

// Field-path aware accessors over a JSON object.
class ObjectReader {
 public:
  ObjectReader(const Json& json, std::string path) : json_(json), path_(std::move(path)) {
    if (!json_.is_object()) throw ValidationError(path_ + ": expected an object");
  }

  std::string Path(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  bool Has(std::string_view key) const { return json_.contains(key); }
  const Json& Raw(std::string_view key) const { return json_.at(std::string(key)); }

  void RejectUnknown(std::initializer_list<std::string_view> known) const {
    for (const auto& [key, unused] : json_.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        throw ValidationError(Path(key) + ": unknown field");
      }
    }
  }

  std::string String(std::string_view key) const {
    const Json& v = Raw(key);
    if (!v.is_string()) throw ValidationError(Path(key) + ": expected a string");
    return v.get<std::string>();
  }

  double Number(std::string_view key) const {
    const Json& v = Raw(key);
    if (!v.is_number()) throw ValidationError(Path(key) + ": expected a number");
    return v.get<double>();
  }

  std::uint64_t Unsigned(std::string_view key) const {
    const Json& v = Raw(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ValidationError(Path(key) + ": expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  template <typename T>
  void Optional(std::string_view key, T& out) const {
    if (!Has(key)) return;
    if constexpr (std::is_same_v<T, double>) {
      out = Number(key);
    } else if constexpr (std::is_same_v<T, std::string>) {
      out = String(key);
    } else if constexpr (std::is_same_v<T, int>) {
      out = static_cast<int>(Unsigned(key));
    } else {
      out = static_cast<T>(Unsigned(key));
    }
  }

  const Json& Array(std::string_view key) const {
    const Json& v = Raw(key);
    if (!v.is_array()) throw ValidationError(Path(key) + ": expected an array");
    return v;
  }

 private:
  const Json& json_;
  std::string path_;
};

SyntheticCorpusSpec ParseSynthetic(const Json& json, const std::string& path) {
  ObjectReader r(json, path);
  r.RejectUnknown({"name", "utterances", "frac_code_switched", "frac_man_only",
                   "man_vocab", "eng_vocab", "successors", "min_mono_length",
                   "max_mono_length", "min_runs", "max_runs", "max_run_length", "seed"});
  SyntheticCorpusSpec s;
  r.Optional("name", s.name);
  r.Optional("utterances", s.utterances);
  r.Optional("frac_code_switched", s.frac_code_switched);
  r.Optional("frac_man_only", s.frac_man_only);
  r.Optional("man_vocab", s.man_vocab);
  r.Optional("eng_vocab", s.eng_vocab);
  r.Optional("successors", s.successors);
  r.Optional("min_mono_length", s.min_mono_length);
  r.Optional("max_mono_length", s.max_mono_length);
  r.Optional("min_runs", s.min_runs);
  r.Optional("max_runs", s.max_runs);
  r.Optional("max_run_length", s.max_run_length);
  r.Optional("seed", s.seed);
  return s;
}

SystemProfile ParseProfile(const Json& json, const std::string& path) {
  ObjectReader r(json, path);
  r.RejectUnknown({"name", "match_eng", "match_man", "seed", "kappa", "delta",
                   "ins_rate", "nbest_size", "comment"});
  SystemProfile p;
  p.name = r.String("name");
  p.match_eng = r.Number("match_eng");
  p.match_man = r.Number("match_man");
  r.Optional("seed", p.seed);
  r.Optional("kappa", p.kappa);
  r.Optional("delta", p.delta);
  r.Optional("ins_rate", p.ins_rate);
  r.Optional("nbest_size", p.nbest_size);
  return p;
}

VoteConfig ParseVote(const Json& json, const std::string& path) {
  ObjectReader r(json, path);
  r.RejectUnknown({"alpha", "null_conf", "stat"});
  VoteConfig v;
  r.Optional("alpha", v.alpha);
  r.Optional("null_conf", v.null_conf);
  if (r.Has("stat")) {
    auto stat = ParseVoteStat(r.String("stat"));
    if (!stat) throw ValidationError(r.Path("stat") + ": expected max-conf, avg-conf or frequency");
    v.stat = *stat;
  }
  return v;
}

MemberSpec ParseMember(const Json& json, const std::string& path) {
  ObjectReader r(json, path);
  r.RejectUnknown({"name", "profile", "lm_weights", "lm_scale"});
  MemberSpec m;
  m.profile = r.String("profile");
  m.name = r.Has("name") ? r.String("name") : m.profile;
  r.Optional("lm_scale", m.lm_scale);
  if (r.Has("lm_weights")) {
    ObjectReader w(r.Raw("lm_weights"), r.Path("lm_weights"));
    std::map<std::string, double> weights;
    for (const auto& [key, unused] : r.Raw("lm_weights").items()) {
      weights[key] = w.Number(key);
    }
    m.lm_weights = std::move(weights);
  }
  return m;
}

EnsembleSpec ParseEnsemble(const Json& json, const std::string& path) {
  ObjectReader r(json, path);
  r.RejectUnknown({"name", "members", "includes", "mode", "vote", "comment"});
  EnsembleSpec e;
  e.name = r.String("name");
  if (r.Has("members")) {
    const Json& members = r.Array("members");
    for (std::size_t k = 0; k < members.size(); ++k) {
      e.members.push_back(ParseMember(members[k], r.Path("members") + "[" + std::to_string(k) + "]"));
    }
  }
  if (r.Has("includes")) {
    const Json& includes = r.Array("includes");
    for (std::size_t k = 0; k < includes.size(); ++k) {
      if (!includes[k].is_string()) {
        throw ValidationError(r.Path("includes") + "[" + std::to_string(k) + "]: expected a string");
      }
      e.includes.push_back(includes[k].get<std::string>());
    }
  }
  if (r.Has("mode")) {
    const std::string mode = r.String("mode");
    if (mode == "flat") {
      e.mode = CombinationMode::kFlat;
    } else if (mode == "cascaded") {
      e.mode = CombinationMode::kCascaded;
    } else {
      throw ValidationError(r.Path("mode") + ": expected flat or cascaded");
    }
  }
  if (r.Has("vote")) e.vote = ParseVote(r.Raw("vote"), r.Path("vote"));
  return e;
}

std::filesystem::path ResolvePath(const std::string& text, const std::filesystem::path& base) {
  std::filesystem::path p(text);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal();
}

}  // namespace

PipelineConfig ParseConfig(std::string_view text, const std::filesystem::path& base_dir) {
  Json json;
  try {
    json = Json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  ObjectReader r(json, "");
  r.RejectUnknown({"seed", "corpus", "unlabeled", "unk_prob", "scope", "profiles",
                   "ensembles", "metadata", "comment"});
  PipelineConfig c;
  if (r.Has("seed")) c.seed = r.Unsigned("seed");
  if (r.Has("corpus")) {
    ObjectReader corpus(r.Raw("corpus"), "corpus");
    corpus.RejectUnknown({"path", "synthetic"});
    if (corpus.Has("path")) c.corpus.path = ResolvePath(corpus.String("path"), base_dir);
    if (corpus.Has("synthetic")) {
      c.corpus.synthetic = ParseSynthetic(corpus.Raw("synthetic"), "corpus.synthetic");
    }
  }
  if (r.Has("unlabeled")) c.unlabeled = ResolvePath(r.String("unlabeled"), base_dir);
  r.Optional("unk_prob", c.unk_prob);
  if (r.Has("scope")) {
    auto scope = ParseScope(r.String("scope"));
    if (!scope) throw ValidationError("scope: expected category or token-language");
    c.scope = *scope;
  }
  if (r.Has("profiles")) {
    const Json& profiles = r.Array("profiles");
    for (std::size_t k = 0; k < profiles.size(); ++k) {
      c.profiles.push_back(ParseProfile(profiles[k], "profiles[" + std::to_string(k) + "]"));
    }
  }
  if (r.Has("ensembles")) {
    const Json& ensembles = r.Array("ensembles");
    for (std::size_t k = 0; k < ensembles.size(); ++k) {
      c.ensembles.push_back(ParseEnsemble(ensembles[k], "ensembles[" + std::to_string(k) + "]"));
    }
  }
  c.Validate();
  return c;
}

PipelineConfig LoadConfigFile(const std::filesystem::path& path) {
  const std::filesystem::path absolute = std::filesystem::absolute(path);
  return ParseConfig(ReadFileOrThrow(absolute), absolute.parent_path());
}

namespace {

Json ToJson(const PipelineConfig& c) {
  Json j;
  if (c.seed) j["seed"] = *c.seed;
  Json corpus = Json::object();
  if (c.corpus.path) corpus["path"] = c.corpus.path->string();
  if (c.corpus.synthetic) {
    const SyntheticCorpusSpec& s = *c.corpus.synthetic;
    corpus["synthetic"] = {
        {"name", s.name},
        {"utterances", s.utterances},
        {"frac_code_switched", s.frac_code_switched},
        {"frac_man_only", s.frac_man_only},
        {"man_vocab", s.man_vocab},
        {"eng_vocab", s.eng_vocab},
        {"successors", s.successors},
        {"min_mono_length", s.min_mono_length},
        {"max_mono_length", s.max_mono_length},
        {"min_runs", s.min_runs},
        {"max_runs", s.max_runs},
        {"max_run_length", s.max_run_length},
        {"seed", s.seed},
    };
  }
  j["corpus"] = corpus;
  if (c.unlabeled) j["unlabeled"] = c.unlabeled->string();
  j["unk_prob"] = c.unk_prob;
  j["scope"] = std::string(ScopeName(c.scope));
  j["profiles"] = Json::array();
  for (const SystemProfile& p : c.profiles) {
    j["profiles"].push_back({{"name", p.name},
                             {"match_eng", p.match_eng},
                             {"match_man", p.match_man},
                             {"seed", p.seed},
                             {"kappa", p.kappa},
                             {"delta", p.delta},
                             {"ins_rate", p.ins_rate},
                             {"nbest_size", p.nbest_size}});
  }
  j["ensembles"] = Json::array();
  for (const EnsembleSpec& e : c.ensembles) {
    Json members = Json::array();
    for (const MemberSpec& m : e.members) {
      Json mj = {{"name", m.name}, {"profile", m.profile}, {"lm_scale", m.lm_scale}};
      if (m.lm_weights) {
        Json w = Json::object();
        for (const auto& [k, v] : *m.lm_weights) w[k] = v;
        mj["lm_weights"] = w;
      }
      members.push_back(mj);
    }
    j["ensembles"].push_back({{"name", e.name},
                              {"mode", std::string(ModeName(e.mode))},
                              {"members", members},
                              {"includes", e.includes},
                              {"vote",
                               {{"alpha", e.vote.alpha},
                                {"null_conf", e.vote.null_conf},
                                {"stat", std::string(VoteStatName(e.vote.stat))}}}});
  }
  return j;
}

}  // namespace

std::string SerializeConfig(const PipelineConfig& config) {
  return ToJson(config).dump(2) + "\n";
}

Corpus LoadReferenceCorpus(const PipelineConfig& config) {
  if (config.corpus.path) return ReadTranscriptFile(*config.corpus.path);
  if (config.corpus.synthetic) return GenerateSyntheticCorpus(*config.corpus.synthetic);
  throw ValidationError("corpus: no source configured");
}

// --- running ensembles -------------------------------------------------------

struct EnsembleRunner::Cache {
  VocabPools pools;
  std::map<std::string, SimulationResult> simulations;  // by profile name
  std::map<std::string, SystemOutput> members;          // by member key
  std::shared_ptr<const TrigramLM> man_lm;
  std::shared_ptr<const TrigramLM> eng_lm;
  std::map<std::pair<double, double>, std::unique_ptr<InterpolatedLM>> lms;
};

namespace {

std::string MemberKey(const MemberSpec& m) {
  std::ostringstream key;
  key.precision(17);
  key << m.name << '\x1f' << m.profile << '\x1f' << m.lm_scale;
  if (m.lm_weights) {
    for (const auto& [k, v] : *m.lm_weights) key << '\x1f' << k << '=' << v;
  }
  return key.str();
}

}  // namespace

EnsembleRunner::EnsembleRunner(const Corpus& refs, std::vector<SystemProfile> profiles,
                               std::vector<EnsembleSpec> ensembles, double unk_prob,
                               ScoringScope scope)
    : refs_(refs),
      profiles_(std::move(profiles)),
      ensembles_(std::move(ensembles)),
      unk_prob_(unk_prob),
      scope_(scope),
      cache_(std::make_unique<Cache>()) {
  if (refs_.empty()) throw ValidationError("reference corpus is empty");
  cache_->pools = VocabPools::FromCorpus(refs_);
}

EnsembleRunner::~EnsembleRunner() = default;

const EnsembleSpec& EnsembleRunner::Find(std::string_view name) const {
  for (const EnsembleSpec& e : ensembles_) {
    if (e.name == name) return e;
  }
  throw ValidationError("unknown ensemble '" + std::string(name) + "'");
}

const InterpolatedLM& EnsembleRunner::LmFor(const MemberSpec& member) {
  if (!cache_->man_lm) {
    std::vector<Utterance> man;
    std::vector<Utterance> eng;
    for (const Utterance& u : refs_.utterances()) {
      for (Utterance& run : SplitAtLanguageBoundaries(u, 1)) {
        (run.tokens.front().lang == LanguageTag::kMan ? man : eng).push_back(std::move(run));
      }
    }
    if (man.empty() || eng.empty()) {
      throw ValidationError("member '" + member.name +
                            "': LM rescoring needs reference text in both languages");
    }
    cache_->man_lm = std::make_shared<const TrigramLM>(
        TrigramLM::Train(Corpus(std::string(kManComponent), std::move(man)), unk_prob_));
    cache_->eng_lm = std::make_shared<const TrigramLM>(
        TrigramLM::Train(Corpus(std::string(kEngComponent), std::move(eng)), unk_prob_));
  }
  std::pair<double, double> weights{0.5, 0.5};
  if (member.lm_weights) {
    weights = {member.lm_weights->at(std::string(kManComponent)),
               member.lm_weights->at(std::string(kEngComponent))};
  }
  auto& slot = cache_->lms[weights];
  if (!slot) {
    slot = std::make_unique<InterpolatedLM>(
        std::vector<InterpolatedLM::Component>{
            {std::string(kManComponent), cache_->man_lm},
            {std::string(kEngComponent), cache_->eng_lm}},
        std::vector<double>{weights.first, weights.second});
  }
  return *slot;
}

void EnsembleRunner::Prefetch(const std::vector<MemberSpec>& members) {
  auto profile_of = [&](const std::string& name) -> const SystemProfile& {
    for (const SystemProfile& p : profiles_) {
      if (p.name == name) return p;
    }
    throw ValidationError("unknown profile '" + name + "'");
  };

  // Simulations are independent per profile.
  std::vector<std::string> pending;
  for (const MemberSpec& m : members) {
    if (!cache_->simulations.count(m.profile) &&
        std::find(pending.begin(), pending.end(), m.profile) == pending.end()) {
      pending.push_back(m.profile);
    }
  }
  std::vector<std::future<SimulationResult>> sims;
  for (const std::string& name : pending) {
    const SystemProfile& profile = profile_of(name);
    sims.push_back(std::async(std::launch::async, [this, &profile] {
      return SimulateSystem(profile, refs_, cache_->pools);
    }));
  }
  for (std::size_t k = 0; k < pending.size(); ++k) {
    cache_->simulations.emplace(pending[k], sims[k].get());
  }

  // LMs are built serially; rescoring then runs per member.
  struct Job {
    std::string key;
    const MemberSpec* member;
    const InterpolatedLM* lm;
  };
  std::vector<Job> jobs;
  for (const MemberSpec& m : members) {
    std::string key = MemberKey(m);
    if (cache_->members.count(key) ||
        std::any_of(jobs.begin(), jobs.end(), [&](const Job& j) { return j.key == key; })) {
      continue;
    }
    jobs.push_back({std::move(key), &m, m.lm_scale > 0.0 ? &LmFor(m) : nullptr});
  }
  std::vector<std::future<SystemOutput>> outputs;
  for (const Job& job : jobs) {
    const SimulationResult& sim = cache_->simulations.at(job.member->profile);
    outputs.push_back(std::async(std::launch::async, [&sim, job] {
      SystemOutput out;
      out.system_id = job.member->name;
      if (job.lm == nullptr) {
        out.hypotheses = sim.output.hypotheses;
        return out;
      }
      for (const auto& [id, nbest] : sim.nbest) {
        out.hypotheses.emplace(id, DecodeNBest(nbest, *job.lm, job.member->lm_scale));
      }
      return out;
    }));
  }
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    cache_->members.emplace(jobs[k].key, outputs[k].get());
  }
}

const SystemOutput& EnsembleRunner::MemberOutput(const MemberSpec& member) {
  const std::string key = MemberKey(member);
  if (!cache_->members.count(key)) Prefetch({member});
  return cache_->members.at(key);
}

void EnsembleRunner::CollectLeaves(const EnsembleSpec& spec, std::vector<MemberSpec>& leaves,
                                   std::vector<std::string>& stack) const {
  if (std::find(stack.begin(), stack.end(), spec.name) != stack.end()) {
    throw ValidationError("include cycle through ensemble '" + spec.name + "'");
  }
  stack.push_back(spec.name);
  for (const MemberSpec& m : spec.members) {
    auto same_name = std::find_if(leaves.begin(), leaves.end(),
                                  [&](const MemberSpec& l) { return l.name == m.name; });
    if (same_name == leaves.end()) {
      leaves.push_back(m);
    } else if (!(*same_name == m)) {
      throw ValidationError("ensemble '" + spec.name + "': member '" + m.name +
                            "' is defined differently elsewhere in the combination");
    }
  }
  for (const std::string& inc : spec.includes) CollectLeaves(Find(inc), leaves, stack);
  stack.pop_back();
}

SystemOutput EnsembleRunner::Combined(const EnsembleSpec& spec, std::vector<std::string>& stack) {
  std::vector<SystemOutput> inputs;
  if (spec.mode == CombinationMode::kFlat) {
    std::vector<MemberSpec> leaves;
    CollectLeaves(spec, leaves, stack);
    Prefetch(leaves);
    for (const MemberSpec& m : leaves) inputs.push_back(MemberOutput(m));
  } else {
    if (std::find(stack.begin(), stack.end(), spec.name) != stack.end()) {
      throw ValidationError("include cycle through ensemble '" + spec.name + "'");
    }
    Prefetch(spec.members);
    for (const MemberSpec& m : spec.members) inputs.push_back(MemberOutput(m));
    stack.push_back(spec.name);
    for (const std::string& inc : spec.includes) {
      SystemOutput inner = Combined(Find(inc), stack);
      inner.system_id = inc;
      inputs.push_back(std::move(inner));
    }
    stack.pop_back();
  }
  return Combine(inputs, spec.vote);
}

SystemReport EnsembleRunner::Report(const std::string& label, const SystemOutput& output) const {
  const HypothesisMap hyps = output.ToHypothesisMap();
  return SystemReport{label, ScoreCorpus(refs_, hyps, scope_),
                      ComputeSubstitutionMatrix(refs_, hyps)};
}

EnsembleResult EnsembleRunner::Run(const std::string& ensemble_name) {
  const EnsembleSpec& spec = Find(ensemble_name);
  std::vector<MemberSpec> leaves;
  std::vector<std::string> stack;
  CollectLeaves(spec, leaves, stack);
  Prefetch(leaves);

  EnsembleResult result;
  result.name = spec.name;
  result.combined = Combined(spec, stack);
  for (const MemberSpec& m : leaves) result.members.push_back(MemberOutput(m));
  std::sort(result.members.begin(), result.members.end(),
            [](const SystemOutput& a, const SystemOutput& b) { return a.system_id < b.system_id; });
  for (const SystemOutput& m : result.members) {
    result.member_reports.push_back(Report(m.system_id, m));
  }
  result.combined_report = Report(spec.name, result.combined);
  return result;
}

EnsembleResult RunEnsemble(const PipelineConfig& config, const std::string& name) {
  return std::move(RunEnsembles(config, {name}).front());
}

std::vector<EnsembleResult> RunEnsembles(const PipelineConfig& config,
                                         const std::vector<std::string>& names) {
  config.Validate();
  const PipelineConfig resolved = config.Resolved();
  const Corpus refs = LoadReferenceCorpus(resolved);
  EnsembleRunner runner(refs, resolved.profiles, resolved.ensembles, resolved.unk_prob,
                        resolved.scope);
  std::vector<EnsembleResult> results;
  for (const std::string& name : names) {
    EnsembleResult result = runner.Run(name);
    Json provenance = ToJson(resolved);
    provenance["metadata"] = {
        {"ensemble", name},
        {"merge_order", "lexicographic system_id"},
        {"substitution_denominator", "reference tokens"},
        {"scope", std::string(ScopeName(resolved.scope))},
        {"mode", std::string(ModeName(resolved.Ensemble(name).mode))},
    };
    result.provenance = provenance.dump(2) + "\n";
    results.push_back(std::move(result));
  }
  return results;
}

// --- reports -------------------------------------------------------------------

namespace {

constexpr std::array<std::string_view, 7> kColumns = {
    "CER(M)", "WER(E)", "MER(CS)", "MER(All)", "%Eng-as-Man", "%Man-as-Eng", "System"};

std::vector<std::string> RowCells(const SystemReport& r) {
  return {FormatRate(r.errors.cer_man), FormatRate(r.errors.wer_eng),
          FormatRate(r.errors.mer_cs), FormatRate(r.errors.mer_all),
          FormatRate(r.subs.pct_eng_as_man()), FormatRate(r.subs.pct_man_as_eng()),
          r.label};
}

Json RateJson(const std::optional<double>& rate) {
  return rate ? Json(*rate) : Json(nullptr);
}

Json CountsJson(const ErrorCounts& c) {
  return {{"ref_tokens", c.ref_tokens}, {"subs", c.subs}, {"ins", c.ins}, {"dels", c.dels}};
}

Json RowJson(const SystemReport& r, std::string_view role) {
  Json categories = Json::object();
  for (auto c : {UtteranceCategory::kEngOnly, UtteranceCategory::kManOnly,
                 UtteranceCategory::kCodeSwitched, UtteranceCategory::kEmpty}) {
    categories[std::string(CategoryName(c))] =
        CountsJson(r.errors.by_category[static_cast<std::size_t>(c)]);
  }
  return {{"system", r.label},
          {"role", role},
          {"cer_man", RateJson(r.errors.cer_man)},
          {"wer_eng", RateJson(r.errors.wer_eng)},
          {"mer_cs", RateJson(r.errors.mer_cs)},
          {"mer_all", RateJson(r.errors.mer_all)},
          {"pct_eng_as_man", RateJson(r.subs.pct_eng_as_man())},
          {"pct_man_as_eng", RateJson(r.subs.pct_man_as_eng())},
          {"counts", categories},
          {"substitutions",
           {{"eng_refs", r.subs.eng_refs},
            {"eng_refs_subbed_by_man", r.subs.eng_refs_subbed_by_man},
            {"man_refs", r.subs.man_refs},
            {"man_refs_subbed_by_eng", r.subs.man_refs_subbed_by_eng}}}};
}

}  // namespace

std::string FormatReportTable(const EnsembleResult& result) {
  std::vector<SystemReport> rows = result.member_reports;
  rows.push_back(result.combined_report);
  return FormatReportTable(rows);
}

std::string FormatReportTable(std::span<const SystemReport> reports) {
  std::vector<std::vector<std::string>> rows;
  for (const SystemReport& r : reports) rows.push_back(RowCells(r));

  std::array<std::size_t, kColumns.size()> width{};
  for (std::size_t c = 0; c < kColumns.size(); ++c) width[c] = kColumns[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c + 1 < kColumns.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  auto line = [&](const auto& cells) {
    std::string out;
    for (std::size_t c = 0; c < kColumns.size(); ++c) {
      const std::string cell(cells[c]);
      if (c + 1 < kColumns.size()) {
        out += std::string(width[c] - cell.size(), ' ') + cell + "  ";
      } else {
        out += cell;
      }
    }
    return out + "\n";
  };
  std::string table = line(kColumns);
  for (const auto& row : rows) table += line(row);
  return table;
}

std::string FormatReportJson(const EnsembleResult& result) {
  Json j;
  j["ensemble"] = result.name;
  j["combined_system"] = result.combined.system_id;
  j["columns"] = Json::array();
  for (auto c : kColumns) j["columns"].push_back(std::string(c));
  j["scope"] = std::string(ScopeName(result.combined_report.errors.scope));
  j["substitution_denominator"] = "reference tokens";
  j["rows"] = Json::array();
  for (const SystemReport& r : result.member_reports) j["rows"].push_back(RowJson(r, "member"));
  j["rows"].push_back(RowJson(result.combined_report, "combined"));
  return j.dump(2) + "\n";
}

std::vector<std::filesystem::path> EmitReports(const EnsembleResult& result,
                                               const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  std::ostringstream hyp;
  WriteHypotheses(hyp, result.combined);
  const std::vector<std::pair<std::string, std::string>> files = {
      {result.name + ".report.txt", FormatReportTable(result)},
      {result.name + ".report.json", FormatReportJson(result)},
      {result.name + ".provenance.json", result.provenance},
      {result.name + ".hyp", hyp.str()},
  };
  std::vector<std::filesystem::path> written;
  for (const auto& [file, contents] : files) {
    written.push_back(dir / file);
    WriteFileOrThrow(written.back(), contents);
  }
  return written;
}

PseudoTranscriptSet EmitPseudoTranscripts(const SystemOutput& combined, const Corpus& unlabeled) {
  PseudoTranscriptSet set{combined.system_id, {}};
  for (const Utterance& u : unlabeled.utterances()) {
    auto it = combined.hypotheses.find(u.id);
    if (it == combined.hypotheses.end()) {
      throw ValidationError("combined output has no hypothesis for unlabeled utterance '" +
                            u.id + "'");
    }
    set.manifest.emplace(u.id, it->second.PlainTokens());
  }
  return set;
}

PseudoTranscriptSet EmitPseudoTranscripts(const EnsembleResult& result, const Corpus& unlabeled) {
  PseudoTranscriptSet set = EmitPseudoTranscripts(result.combined, unlabeled);
  set.source = result.name;
  return set;
}

}  // namespace csrover
