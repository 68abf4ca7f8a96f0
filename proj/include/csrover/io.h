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

// Text formats.
//
//   transcript   "utt_id<TAB>raw text", one utterance per line
//   hypothesis   "utt_id token lang confidence", one token per line; a line
//                holding only "utt_id" declares an empty hypothesis
//   n-best       per entry, a header "utt_id k acoustic_score" followed by
//                "utt_id k token lang" lines
//   manifest     "utt_id<TAB>rendered text"

#ifndef CSROVER_IO_H_
#define CSROVER_IO_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

#include "csrover/core_model.h"
#include "csrover/lm.h"
#include "csrover/rover.h"

namespace csrover {

Corpus ReadTranscript(std::istream& in, std::string name);
// Corpus name is the file stem. Throws IoError if unreadable.
Corpus ReadTranscriptFile(const std::filesystem::path& path);
void WriteTranscript(std::ostream& out, const Corpus& corpus);

SystemOutput ReadHypotheses(std::istream& in, std::string system_id);
SystemOutput ReadHypothesisFile(const std::filesystem::path& path);
void WriteHypotheses(std::ostream& out, const SystemOutput& output);

std::map<std::string, NBestList> ReadNBest(std::istream& in);
void WriteNBest(std::ostream& out, const std::map<std::string, NBestList>& nbest);

// One manifest line per utterance, in map order.
void WriteManifest(std::ostream& out,
                   const std::map<std::string, std::vector<Token>>& manifest);

// Parses a hypothesis-file token field, folding case the way the
// tokenizer does. Throws ValidationError if the field is not exactly one
// token of the given language.
Token ParseTokenField(std::string_view surface, LanguageTag lang);

// %.6f.
std::string FormatConfidence(double value);

// Whole-file helpers that throw IoError.
std::string ReadFileOrThrow(const std::filesystem::path& path);
void WriteFileOrThrow(const std::filesystem::path& path, std::string_view contents);

}  // namespace csrover

#endif  // CSROVER_IO_H_
