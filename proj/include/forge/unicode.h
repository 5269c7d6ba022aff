// Copyright 2026 The Corpus Forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FORGE_UNICODE_H_
#define FORGE_UNICODE_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Thin UTF-8 layer over ICU. All strings in the toolkit are UTF-8 encoded
// std::string; code points are char32_t.
namespace forge::unicode {

// Returns the byte offset of the first invalid sequence, or nullopt.
std::optional<std::size_t> FindInvalidUtf8(std::string_view text);

std::string NormalizeNfc(std::string_view text);
bool IsNfc(std::string_view text);
std::string CaseFold(std::string_view text);

std::u32string Decode(std::string_view text);
std::string Encode(std::u32string_view text);
void AppendUtf8(char32_t cp, std::string& out);
std::size_t CodePointCount(std::string_view text);

// General category predicates.
bool IsLetter(char32_t cp);       // L*
bool IsNumber(char32_t cp);       // N*
bool IsPunctuation(char32_t cp);  // P*
bool IsSymbol(char32_t cp);       // S*
bool IsAlnum(char32_t cp);        // L* or N*

// Unicode White_Space property.
bool IsWhitespace(char32_t cp);
// Matches Python's str.isspace(): Zs, or bidi class WS/B/S.
bool IsPythonSpace(char32_t cp);
// LF, CR, VT, FF, NEL, LS, PS.
bool IsLineBreak(char32_t cp);

bool ContainsLetter(std::string_view text);

// Splits on runs of White_Space; never yields empty tokens.
std::vector<std::string> SplitWhitespace(std::string_view text);
// Same split, but returns byte spans into `text`.
struct Span {
  std::size_t begin;
  std::size_t end;
};
std::vector<Span> WhitespaceSpans(std::string_view text);

}  // namespace forge::unicode

#endif  // FORGE_UNICODE_H_
