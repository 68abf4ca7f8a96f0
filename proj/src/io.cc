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

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "csrover/error.h"

namespace csrover {

namespace {

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos == line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

void StripCr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::string AtLine(std::size_t line_no) {
  return "line " + std::to_string(line_no) + ": ";
}

double ParseDouble(std::string_view field, const std::string& where) {
  std::string text(field);
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
    throw ValidationError(where + "bad number '" + text + "'");
  }
  return value;
}

LanguageTag ParseLanguageField(std::string_view field, const std::string& where) {
  auto lang = ParseLanguage(field);
  if (!lang) throw ValidationError(where + "bad language '" + std::string(field) + "'");
  return *lang;
}

}  // namespace

Token ParseTokenField(std::string_view surface, LanguageTag lang) {
  const std::vector<Token> parsed = TokenizeMixed(surface);
  if (parsed.size() != 1 || parsed[0].lang != lang) {
    throw ValidationError("'" + std::string(surface) + "' is not a single " +
                          std::string(LanguageName(lang)) + " token");
  }
  return parsed[0];
}

std::string FormatConfidence(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

std::string ReadFileOrThrow(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return buffer.str();
}

void WriteFileOrThrow(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

Corpus ReadTranscript(std::istream& in, std::string name) {
  std::vector<Utterance> utterances;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    StripCr(line);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto tab = line.find('\t');
    std::string id = line.substr(0, tab);
    if (id.empty() || id.find(' ') != std::string::npos) {
      throw ValidationError(AtLine(line_no) + "bad utterance id '" + id + "'");
    }
    std::vector<Token> tokens;
    if (tab != std::string::npos) {
      try {
        tokens = TokenizeMixed(std::string_view(line).substr(tab + 1));
      } catch (const ValidationError& e) {
        throw ValidationError(AtLine(line_no) + e.what());
      }
    }
    utterances.push_back({std::move(id), std::move(tokens)});
  }
  return Corpus(std::move(name), std::move(utterances));
}

Corpus ReadTranscriptFile(const std::filesystem::path& path) {
  std::istringstream in(ReadFileOrThrow(path));
  return ReadTranscript(in, path.stem().string());
}

void WriteTranscript(std::ostream& out, const Corpus& corpus) {
  for (const Utterance& u : corpus.utterances()) {
    out << u.id << '\t' << RenderTokens(u.tokens) << '\n';
  }
}

SystemOutput ReadHypotheses(std::istream& in, std::string system_id) {
  SystemOutput output{std::move(system_id), {}};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    StripCr(line);
    const auto fields = SplitFields(line);
    if (fields.empty()) continue;
    const std::string where = AtLine(line_no);
    const std::string id(fields[0]);
    auto& hyp = output.hypotheses[id];
    hyp.utt_id = id;
    if (fields.size() == 1) continue;
    if (fields.size() != 4) {
      throw ValidationError(where + "expected 'utt_id token lang confidence'");
    }
    const LanguageTag lang = ParseLanguageField(fields[2], where);
    Token token;
    try {
      token = ParseTokenField(fields[1], lang);
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
    const double conf = ParseDouble(fields[3], where);
    if (!(conf >= 0.0 && conf <= 1.0)) {
      throw ValidationError(where + "confidence outside [0, 1]");
    }
    hyp.tokens.push_back({std::move(token), conf});
  }
  return output;
}

SystemOutput ReadHypothesisFile(const std::filesystem::path& path) {
  std::istringstream in(ReadFileOrThrow(path));
  return ReadHypotheses(in, path.stem().string());
}

void WriteHypotheses(std::ostream& out, const SystemOutput& output) {
  for (const auto& [id, hyp] : output.hypotheses) {
    if (hyp.tokens.empty()) {
      out << id << '\n';
      continue;
    }
    for (const ScoredToken& t : hyp.tokens) {
      out << id << ' ' << t.token.surface << ' ' << LanguageName(t.token.lang) << ' '
          << FormatConfidence(t.confidence) << '\n';
    }
  }
}

std::map<std::string, NBestList> ReadNBest(std::istream& in) {
  std::map<std::string, NBestList> lists;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    StripCr(line);
    const auto fields = SplitFields(line);
    if (fields.empty()) continue;
    const std::string where = AtLine(line_no);
    if (fields.size() != 3 && fields.size() != 4) {
      throw ValidationError(where + "expected an n-best header or token line");
    }
    const std::string id(fields[0]);
    const double k_value = ParseDouble(fields[1], where);
    const auto k = static_cast<std::size_t>(k_value);
    if (k_value < 0 || static_cast<double>(k) != k_value) {
      throw ValidationError(where + "bad entry index");
    }
    NBestList& list = lists[id];
    list.utt_id = id;
    if (fields.size() == 3) {
      if (k != list.entries.size()) {
        throw ValidationError(where + "entry " + std::to_string(k) + " out of order");
      }
      list.entries.push_back({{}, ParseDouble(fields[2], where)});
      continue;
    }
    if (list.entries.empty() || k + 1 != list.entries.size()) {
      throw ValidationError(where + "token line outside its entry block");
    }
    try {
      list.entries.back().tokens.push_back(
          ParseTokenField(fields[2], ParseLanguageField(fields[3], where)));
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
  }
  return lists;
}

void WriteNBest(std::ostream& out, const std::map<std::string, NBestList>& nbest) {
  char score[40];
  for (const auto& [id, list] : nbest) {
    for (std::size_t k = 0; k < list.entries.size(); ++k) {
      const NBestEntry& entry = list.entries[k];
      std::snprintf(score, sizeof(score), "%.17g", entry.acoustic_score);
      out << id << ' ' << k << ' ' << score << '\n';
      for (const Token& t : entry.tokens) {
        out << id << ' ' << k << ' ' << t.surface << ' ' << LanguageName(t.lang) << '\n';
      }
    }
  }
}

void WriteManifest(std::ostream& out,
                   const std::map<std::string, std::vector<Token>>& manifest) {
  for (const auto& [id, tokens] : manifest) {
    out << id << '\t' << RenderTokens(tokens) << '\n';
  }
}

}  // namespace csrover
