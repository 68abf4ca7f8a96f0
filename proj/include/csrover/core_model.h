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

// Language-tagged tokens, utterances and corpora shared by every other
// module, plus mixed Mandarin/English tokenization.

#ifndef CSROVER_CORE_MODEL_H_
#define CSROVER_CORE_MODEL_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace csrover {

enum class LanguageTag { kEng, kMan };

inline LanguageTag OtherLanguage(LanguageTag lang) {
  return lang == LanguageTag::kEng ? LanguageTag::kMan : LanguageTag::kEng;
}

// "eng" / "man".
std::string_view LanguageName(LanguageTag lang);
// Case-insensitive inverse of LanguageName; nullopt for anything else.
std::optional<LanguageTag> ParseLanguage(std::string_view name);

// A scoring unit: one Mandarin character or one English word.
//
// Token is a plain value; the surface/lang agreement is enforced at the
// boundaries (tokenizer, file readers) through ValidateToken, not in the
// constructor, so that scoring can be exercised on abstract symbols.
struct Token {
  std::string surface;
  LanguageTag lang = LanguageTag::kEng;

  friend bool operator==(const Token&, const Token&) = default;
  friend auto operator<=>(const Token&, const Token&) = default;
};

// Throws ValidationError unless the surface matches the tag: exactly one CJK
// ideograph for kMan, a run of Latin letters/digits/'/- for kEng.
void ValidateToken(const Token& token);
// Builds a token whose tag is inferred from the surface.
Token MakeToken(std::string_view surface);

struct Utterance {
  std::string id;
  std::vector<Token> tokens;

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

enum class UtteranceCategory { kEngOnly, kManOnly, kCodeSwitched, kEmpty };

std::string_view CategoryName(UtteranceCategory category);

// Utterance ids are unique; the constructor-style factory enforces it.
class Corpus {
 public:
  Corpus() = default;
  // Throws ValidationError on duplicate ids.
  Corpus(std::string name, std::vector<Utterance> utterances);

  const std::string& name() const { return name_; }
  const std::vector<Utterance>& utterances() const { return utterances_; }
  std::size_t size() const { return utterances_.size(); }
  bool empty() const { return utterances_.empty(); }
  // nullptr if absent.
  const Utterance* Find(std::string_view id) const;

 private:
  std::string name_;
  std::vector<Utterance> utterances_;
};

// UTF-8 helpers.
bool IsCjkIdeograph(char32_t cp);
std::u32string DecodeUtf8(std::string_view text);
std::string EncodeUtf8(char32_t cp);
std::string EncodeUtf8(std::u32string_view text);

// Splits raw text into Mandarin character tokens and lower-cased English word
// tokens. Punctuation is dropped. Throws UnsupportedScriptError for code
// points of any other script, and ValidationError on malformed UTF-8.
std::vector<Token> TokenizeMixed(std::string_view raw);

// Inverse of TokenizeMixed: English tokens are space separated, adjacent
// Mandarin tokens are written without spaces, and a language change is a
// single space.
std::string RenderTokens(std::span<const Token> tokens);

UtteranceCategory CategorizeUtterance(const Utterance& utterance);

// Partitions the utterance into maximal monolingual runs with ids
// "<parent>#<k>". Returns nothing at all if any run is shorter than
// min_tokens. Throws ValidationError for min_tokens == 0.
std::vector<Utterance> SplitAtLanguageBoundaries(const Utterance& utterance,
                                                 std::size_t min_tokens = 2);

}  // namespace csrover

#endif  // CSROVER_CORE_MODEL_H_
