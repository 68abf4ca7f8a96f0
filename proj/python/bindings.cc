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

// Python bindings. Tokens cross the boundary as (surface, lang) tuples and
// scored tokens as (surface, lang, confidence); a str anywhere a token list
// is expected is tokenized first.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "csrover/core_model.h"
#include "csrover/error.h"
#include "csrover/io.h"
#include "csrover/lm.h"
#include "csrover/pipeline.h"
#include "csrover/rover.h"
#include "csrover/scoring.h"
#include "csrover/simulator.h"

namespace py = pybind11;

namespace csrover {
namespace {

using TokenTuple = std::tuple<std::string, std::string>;
using ScoredTuple = std::tuple<std::string, std::string, double>;

Token FromTuple(const TokenTuple& t) {
  const auto lang = ParseLanguage(std::get<1>(t));
  if (!lang) throw ValidationError("unknown language tag '" + std::get<1>(t) + "'");
  Token token{std::get<0>(t), *lang};
  ValidateToken(token);
  return token;
}

TokenTuple ToTuple(const Token& t) {
  return {t.surface, std::string(LanguageName(t.lang))};
}

std::vector<Token> TokensOf(const py::handle& obj) {
  if (py::isinstance<py::str>(obj)) return TokenizeMixed(obj.cast<std::string>());
  std::vector<Token> out;
  for (const auto& t : obj.cast<std::vector<TokenTuple>>()) out.push_back(FromTuple(t));
  return out;
}

std::vector<TokenTuple> Tuples(std::span<const Token> tokens) {
  std::vector<TokenTuple> out;
  for (const Token& t : tokens) out.push_back(ToTuple(t));
  return out;
}

std::vector<ScoredTuple> ScoredTuples(const Hypothesis& h) {
  std::vector<ScoredTuple> out;
  for (const ScoredToken& t : h.tokens) {
    out.emplace_back(t.token.surface, std::string(LanguageName(t.token.lang)), t.confidence);
  }
  return out;
}

Corpus CorpusOf(const py::dict& utterances, std::string name = "refs") {
  std::vector<Utterance> us;
  for (const auto& [id, value] : utterances) {
    us.push_back({id.cast<std::string>(), TokensOf(value)});
  }
  return Corpus(std::move(name), std::move(us));
}

Hypothesis HypothesisOf(const std::string& utt_id, const py::handle& obj) {
  Hypothesis h{utt_id, {}};
  if (py::isinstance<py::str>(obj)) {
    for (Token& t : TokenizeMixed(obj.cast<std::string>())) h.tokens.push_back({std::move(t), 1.0});
    return h;
  }
  for (const auto& t : obj.cast<std::vector<ScoredTuple>>()) {
    h.tokens.push_back({FromTuple({std::get<0>(t), std::get<1>(t)}), std::get<2>(t)});
  }
  return h;
}

ScoringScope ScopeOf(const std::string& name) {
  const auto scope = ParseScope(name);
  if (!scope) throw ValidationError("unknown scope '" + name + "'");
  return *scope;
}

py::object Rate(const std::optional<double>& r) {
  return r ? py::object(py::float_(*r)) : py::none();
}

py::dict ReportDict(const ErrorReport& e, const SubstitutionMatrix& s) {
  py::dict d;
  d["cer_man"] = Rate(e.cer_man);
  d["wer_eng"] = Rate(e.wer_eng);
  d["mer_cs"] = Rate(e.mer_cs);
  d["mer_all"] = Rate(e.mer_all);
  d["pct_eng_as_man"] = Rate(s.pct_eng_as_man());
  d["pct_man_as_eng"] = Rate(s.pct_man_as_eng());
  d["ref_tokens"] = e.total.ref_tokens;
  d["subs"] = e.total.subs;
  d["ins"] = e.total.ins;
  d["dels"] = e.total.dels;
  return d;
}

py::dict Score(const py::dict& refs, const py::dict& hyps, const std::string& scope) {
  const Corpus corpus = CorpusOf(refs);
  HypothesisMap map;
  for (const auto& [id, value] : hyps) map[id.cast<std::string>()] = TokensOf(value);
  return ReportDict(ScoreCorpus(corpus, map, ScopeOf(scope)),
                    ComputeSubstitutionMatrix(corpus, map));
}

std::vector<std::tuple<std::string, py::object, py::object>> AlignPy(const py::object& ref,
                                                                     const py::object& hyp) {
  static constexpr const char* kNames[] = {"match", "sub", "ins", "del"};
  const auto r = TokensOf(ref), h = TokensOf(hyp);
  std::vector<std::tuple<std::string, py::object, py::object>> out;
  for (const AlignmentOp& op : Align(r, h)) {
    auto side = [](const std::optional<Token>& t) {
      return t ? py::cast(ToTuple(*t)) : py::none();
    };
    out.emplace_back(kNames[static_cast<int>(op.kind)], side(op.ref), side(op.hyp));
  }
  return out;
}

VoteConfig VoteOf(double alpha, double null_conf, const std::string& stat) {
  VoteConfig cfg;
  cfg.alpha = alpha;
  cfg.null_conf = null_conf;
  const auto s = ParseVoteStat(stat);
  if (!s) throw ValidationError("unknown vote statistic '" + stat + "'");
  cfg.stat = *s;
  cfg.Validate();
  return cfg;
}

std::map<std::string, std::vector<ScoredTuple>> CombinePy(const py::dict& systems, double alpha,
                                                          double null_conf,
                                                          const std::string& stat) {
  std::vector<SystemOutput> outputs;
  for (const auto& [sid, hyps] : systems) {
    SystemOutput out{sid.cast<std::string>(), {}};
    for (const auto& [uid, value] : hyps.cast<py::dict>()) {
      const std::string id = uid.cast<std::string>();
      out.hypotheses[id] = HypothesisOf(id, value);
    }
    outputs.push_back(std::move(out));
  }
  const SystemOutput combined = Combine(outputs, VoteOf(alpha, null_conf, stat));
  std::map<std::string, std::vector<ScoredTuple>> result;
  for (const auto& [id, h] : combined.hypotheses) result[id] = ScoredTuples(h);
  return result;
}

py::dict SimulatePy(const py::dict& refs, double match_eng, double match_man,
                    std::uint64_t seed, const std::string& name) {
  SystemProfile p;
  p.name = name;
  p.match_eng = match_eng;
  p.match_man = match_man;
  p.seed = seed;
  p.Validate();
  const Corpus corpus = CorpusOf(refs);
  const SimulationResult sim = SimulateSystem(p, corpus, VocabPools::FromCorpus(corpus));
  py::dict out;
  for (const auto& [id, h] : sim.output.hypotheses) out[py::str(id)] = ScoredTuples(h);
  return out;
}

py::dict ResultDict(const EnsembleResult& r) {
  py::dict d;
  d["name"] = r.name;
  d["system_id"] = r.combined.system_id;
  d["table"] = FormatReportTable(r);
  d["report_json"] = FormatReportJson(r);
  d["provenance"] = r.provenance;
  d["report"] = ReportDict(r.combined_report.errors, r.combined_report.subs);
  py::dict members;
  for (const SystemReport& m : r.member_reports) {
    members[py::str(m.label)] = ReportDict(m.errors, m.subs);
  }
  d["members"] = members;
  py::dict hyps;
  for (const auto& [id, h] : r.combined.hypotheses) hyps[py::str(id)] = ScoredTuples(h);
  d["hypotheses"] = hyps;
  return d;
}

PipelineConfig ConfigOf(const std::string& text_or_path, std::optional<std::uint64_t> seed) {
  PipelineConfig c = text_or_path.find('{') == std::string::npos
                         ? LoadConfigFile(text_or_path)
                         : ParseConfig(text_or_path);
  if (seed) c.seed = seed;
  return c;
}

}  // namespace
}  // namespace csrover

PYBIND11_MODULE(_csrover, m) {
  using namespace csrover;
  m.doc() = "Code-switched ASR scoring, ROVER combination and simulation.";

  auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<UnsupportedScriptError>(m, "UnsupportedScriptError", validation.ptr());
  py::register_exception<MissingHypothesisError>(m, "MissingHypothesisError", validation.ptr());
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("tokenize", [](const std::string& text) { return Tuples(TokenizeMixed(text)); },
        py::arg("text"));
  m.def("render", [](const py::object& tokens) { return RenderTokens(TokensOf(tokens)); },
        py::arg("tokens"));
  m.def("category", [](const py::object& tokens) {
    return std::string(CategoryName(CategorizeUtterance({"u", TokensOf(tokens)})));
  }, py::arg("tokens"));
  m.def("split", [](const py::object& tokens, std::size_t min_tokens) {
    std::vector<std::vector<TokenTuple>> out;
    for (const Utterance& u : SplitAtLanguageBoundaries({"u", TokensOf(tokens)}, min_tokens)) {
      out.push_back(Tuples(u.tokens));
    }
    return out;
  }, py::arg("tokens"), py::arg("min_tokens") = 2);

  m.def("align", &AlignPy, py::arg("ref"), py::arg("hyp"));
  m.def("score", &Score, py::arg("refs"), py::arg("hyps"), py::arg("scope") = "category");
  m.def("combine", &CombinePy, py::arg("systems"), py::arg("alpha") = 0.0,
        py::arg("null_conf") = 0.7, py::arg("vote_stat") = "max-conf");
  m.def("simulate", &SimulatePy, py::arg("refs"), py::arg("match_eng"), py::arg("match_man"),
        py::arg("seed") = 0, py::arg("name") = "sim");

  py::class_<TrigramLM>(m, "TrigramLM")
      .def_static("train", [](const py::dict& texts, double unk_prob) {
        return TrigramLM::Train(CorpusOf(texts, "lm"), unk_prob);
      }, py::arg("texts"), py::arg("unk_prob") = kDefaultUnkProb)
      .def_static("load", [](const std::string& path) {
        std::istringstream in(ReadFileOrThrow(path));
        return TrigramLM::Load(in);
      }, py::arg("path"))
      .def("save", [](const TrigramLM& lm, const std::string& path) {
        std::ostringstream out;
        lm.Save(out);
        WriteFileOrThrow(path, out.str());
      }, py::arg("path"))
      .def("prob", [](const TrigramLM& lm, const py::object& history, py::object next) {
        const std::vector<Token> h = TokensOf(history);
        if (next.is_none()) return lm.Prob(h, nullptr);
        const Token t = FromTuple(next.cast<TokenTuple>());
        return lm.Prob(h, &t);
      }, py::arg("history"), py::arg("next") = py::none())
      .def("perplexity", [](const TrigramLM& lm, const py::dict& texts) {
        return Perplexity(lm, CorpusOf(texts));
      }, py::arg("texts"))
      .def_property_readonly("vocabulary", [](const TrigramLM& lm) {
        return Tuples(lm.Vocabulary());
      });

  m.def("run_ensemble", [](const std::string& config, const std::string& name,
                           std::optional<std::uint64_t> seed) {
    return ResultDict(RunEnsemble(ConfigOf(config, seed), name));
  }, py::arg("config"), py::arg("name"), py::arg("seed") = py::none(),
     "config is a JSON document or a path to one.");
  m.def("resolve_config", [](const std::string& config, std::optional<std::uint64_t> seed) {
    return SerializeConfig(ConfigOf(config, seed).Resolved());
  }, py::arg("config"), py::arg("seed") = py::none());
}
