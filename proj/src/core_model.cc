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

#include "csrover/core_model.h"

#include <algorithm>
#include <cstdio>
#include <unordered_set>

#include "csrover/error.h"

namespace csrover {

namespace {

std::string FormatCodePoint(char32_t cp) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "U+%04X", static_cast<unsigned>(cp));
  return buf;
}

bool IsWhitespace(char32_t cp) {
  switch (cp) {
    case ' ': case '\t': case '\n': case '\r': case '\f': case '\v':
    case 0x00A0: case 0x202F: case 0x205F: case 0x3000: case 0xFEFF:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200B;
  }
}

bool IsAsciiAlnum(char32_t cp) {
  return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
         (cp >= '0' && cp <= '9');
}

bool IsLatin1Letter(char32_t cp) {
  return cp >= 0x00C0 && cp <= 0x00FF && cp != 0x00D7 && cp != 0x00F7;
}

// Maps fullwidth digits/letters and the right single quotation mark onto
// their ASCII equivalents. Everything else is returned unchanged.
char32_t FoldLatin(char32_t cp) {
  if (cp >= 0xFF10 && cp <= 0xFF19) return cp - 0xFF10 + '0';
  if (cp >= 0xFF21 && cp <= 0xFF3A) return cp - 0xFF21 + 'A';
  if (cp >= 0xFF41 && cp <= 0xFF5A) return cp - 0xFF41 + 'a';
  if (cp == 0x2019) return '\'';
  return cp;
}

char32_t ToLowerLatin(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + ('a' - 'A');
  if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 0x20;
  return cp;
}

// Operates on folded code points.
bool IsLatinMaterial(char32_t cp) {
  return IsAsciiAlnum(cp) || cp == '\'' || cp == '-' || IsLatin1Letter(cp);
}

bool IsPunctuation(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
  }
  return (cp >= 0x00A1 && cp <= 0x00BF) || cp == 0x00D7 || cp == 0x00F7 ||
         (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) ||
         (cp >= 0x3001 && cp <= 0x303F) || (cp >= 0xFE30 && cp <= 0xFE6F) ||
         (cp >= 0xFF01 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20) ||
         (cp >= 0xFF3B && cp <= 0xFF40) || (cp >= 0xFF5B && cp <= 0xFF65);
}

bool IsEdgeMark(char32_t cp) { return cp == '\'' || cp == '-'; }

void FlushLatinRun(std::u32string& run, std::vector<Token>& out) {
  auto first = std::find_if_not(run.begin(), run.end(), IsEdgeMark);
  auto last = std::find_if_not(run.rbegin(), run.rend(), IsEdgeMark).base();
  if (first < last) {
    out.push_back(Token{EncodeUtf8(std::u32string_view(
                            &*first, static_cast<std::size_t>(last - first))),
                        LanguageTag::kEng});
  }
  run.clear();
}

// Decodes one code point starting at text[pos]; advances pos. Returns
// nullopt on malformed input.
std::optional<char32_t> NextCodePoint(std::string_view text, std::size_t& pos) {
  const auto b0 = static_cast<unsigned char>(text[pos]);
  std::size_t len;
  char32_t cp;
  if (b0 < 0x80) {
    ++pos;
    return b0;
  } else if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return std::nullopt;
  }
  if (pos + len > text.size()) return std::nullopt;
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(text[pos + i]);
    if ((b & 0xC0) != 0x80) return std::nullopt;
    cp = (cp << 6) | (b & 0x3F);
  }
  static constexpr char32_t kMinForLength[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMinForLength[len] || cp > 0x10FFFF ||
      (cp >= 0xD800 && cp <= 0xDFFF)) {
    return std::nullopt;
  }
  pos += len;
  return cp;
}

}  // namespace

UnsupportedScriptError::UnsupportedScriptError(std::size_t code_point_index,
                                               std::size_t byte_offset,
                                               char32_t code_point)
    : ValidationError("unsupported script: " + FormatCodePoint(code_point) +
                      " at code point " + std::to_string(code_point_index) +
                      " (byte " + std::to_string(byte_offset) + ")"),
      code_point_index_(code_point_index),
      byte_offset_(byte_offset),
      code_point_(code_point) {}

std::string_view LanguageName(LanguageTag lang) {
  return lang == LanguageTag::kEng ? "eng" : "man";
}

std::optional<LanguageTag> ParseLanguage(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "eng") return LanguageTag::kEng;
  if (lower == "man") return LanguageTag::kMan;
  return std::nullopt;
}

std::string_view CategoryName(UtteranceCategory category) {
  switch (category) {
    case UtteranceCategory::kEngOnly: return "eng-only";
    case UtteranceCategory::kManOnly: return "man-only";
    case UtteranceCategory::kCodeSwitched: return "code-switched";
    case UtteranceCategory::kEmpty: return "empty";
  }
  return "?";
}

bool IsCjkIdeograph(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF);
}

std::u32string DecodeUtf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t at = pos;
    auto cp = NextCodePoint(text, pos);
    if (!cp) {
      throw ValidationError("malformed UTF-8 at byte " + std::to_string(at));
    }
    out.push_back(*cp);
  }
  return out;
}

std::string EncodeUtf8(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

std::string EncodeUtf8(std::u32string_view text) {
  std::string out;
  for (char32_t cp : text) out += EncodeUtf8(cp);
  return out;
}

std::vector<Token> TokenizeMixed(std::string_view raw) {
  std::vector<Token> out;
  std::u32string latin_run;
  std::size_t pos = 0;
  std::size_t index = 0;
  while (pos < raw.size()) {
    const std::size_t byte_offset = pos;
    auto decoded = NextCodePoint(raw, pos);
    if (!decoded) {
      throw ValidationError("malformed UTF-8 at byte " +
                            std::to_string(byte_offset));
    }
    const char32_t cp = FoldLatin(*decoded);
    if (IsLatinMaterial(cp)) {
      latin_run.push_back(ToLowerLatin(cp));
    } else if (IsCjkIdeograph(cp)) {
      FlushLatinRun(latin_run, out);
      out.push_back(Token{EncodeUtf8(cp), LanguageTag::kMan});
    } else if (IsWhitespace(cp) || IsPunctuation(cp)) {
      FlushLatinRun(latin_run, out);
    } else {
      throw UnsupportedScriptError(index, byte_offset, *decoded);
    }
    ++index;
  }
  FlushLatinRun(latin_run, out);
  return out;
}

void ValidateToken(const Token& token) {
  if (token.surface.empty()) throw ValidationError("empty token surface");
  const std::u32string cps = DecodeUtf8(token.surface);
  if (token.lang == LanguageTag::kMan) {
    if (cps.size() != 1 || !IsCjkIdeograph(cps[0])) {
      throw ValidationError("token '" + token.surface +
                            "' tagged man is not a single CJK ideograph");
    }
    return;
  }
  for (char32_t cp : cps) {
    if (!IsLatinMaterial(cp)) {
      throw ValidationError("token '" + token.surface +
                            "' tagged eng contains " + FormatCodePoint(cp));
    }
  }
}

Token MakeToken(std::string_view surface) {
  const std::u32string cps = DecodeUtf8(surface);
  Token token{std::string(surface),
              cps.size() == 1 && IsCjkIdeograph(cps[0]) ? LanguageTag::kMan
                                                        : LanguageTag::kEng};
  ValidateToken(token);
  return token;
}

Corpus::Corpus(std::string name, std::vector<Utterance> utterances)
    : name_(std::move(name)), utterances_(std::move(utterances)) {
  std::unordered_set<std::string_view> seen;
  for (const Utterance& u : utterances_) {
    if (!seen.insert(u.id).second) {
      throw ValidationError("duplicate utterance id '" + u.id +
                            "' in corpus '" + name_ + "'");
    }
  }
}

const Utterance* Corpus::Find(std::string_view id) const {
  for (const Utterance& u : utterances_) {
    if (u.id == id) return &u;
  }
  return nullptr;
}

std::string RenderTokens(std::span<const Token> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const bool glue = i > 0 && tokens[i].lang == LanguageTag::kMan &&
                      tokens[i - 1].lang == LanguageTag::kMan;
    if (i > 0 && !glue) out.push_back(' ');
    out += tokens[i].surface;
  }
  return out;
}

UtteranceCategory CategorizeUtterance(const Utterance& utterance) {
  if (utterance.tokens.empty()) return UtteranceCategory::kEmpty;
  bool has_eng = false;
  bool has_man = false;
  for (const Token& t : utterance.tokens) {
    (t.lang == LanguageTag::kEng ? has_eng : has_man) = true;
  }
  if (has_eng && has_man) return UtteranceCategory::kCodeSwitched;
  return has_eng ? UtteranceCategory::kEngOnly : UtteranceCategory::kManOnly;
}

std::vector<Utterance> SplitAtLanguageBoundaries(const Utterance& utterance,
                                                 std::size_t min_tokens) {
  if (min_tokens == 0) throw ValidationError("min_tokens must be >= 1");
  std::vector<Utterance> runs;
  const auto& tokens = utterance.tokens;
  std::size_t start = 0;
  while (start < tokens.size()) {
    std::size_t end = start + 1;
    while (end < tokens.size() && tokens[end].lang == tokens[start].lang) ++end;
    if (end - start < min_tokens) return {};
    runs.push_back(Utterance{
        utterance.id + "#" + std::to_string(runs.size()),
        std::vector<Token>(tokens.begin() + static_cast<std::ptrdiff_t>(start),
                           tokens.begin() + static_cast<std::ptrdiff_t>(end))});
    start = end;
  }
  return runs;
}

}  // namespace csrover
