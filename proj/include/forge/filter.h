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

#ifndef FORGE_FILTER_H_
#define FORGE_FILTER_H_

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "forge/corpus.h"
#include "nlohmann/json_fwd.hpp"

namespace forge {

enum class Verdict { kKeep, kRemove };

// Which side(s) of a pair the short/non-sentence rules inspect. The source
// side is the English side in every benchmark pair.
enum class Side { kSource, kBoth };

Side ParseSide(std::string_view name);
std::string_view SideName(Side side);

// Token classification over whitespace tokens. A token is "counted" unless
// every code point in it is a number (N*), punctuation (P*) or symbol (S*).
struct TokenizationProfile {
  Side side = Side::kSource;

  static bool IsNumericOnly(std::string_view token);
  static bool IsPunctuationOnly(std::string_view token);  // P* or S*
  static bool IsNumericOrPunctuation(std::string_view token);
  static bool ContainsLetter(std::string_view token);
  static std::size_t CountedTokens(std::string_view text);
};

// Minimum number of counted tokens a sentence needs to survive.
inline constexpr std::size_t kMinCountedTokens = 3;

Verdict FilterEmpty(const SentencePair& pair);
Verdict FilterShort(const SentencePair& pair, Side side = Side::kSource);
Verdict FilterNonSentence(const SentencePair& pair, Side side = Side::kSource);
Verdict FilterIdentical(const SentencePair& pair);

// Casefolds and deletes all whitespace; the comparison key of
// FilterIdentical.
std::string IdentityKey(std::string_view text);

// Rule-based detokenizer; see README for the frozen rule list.
std::string Detokenize(std::string_view text);

// Charging order of the rules in RunFilters.
inline constexpr std::array<std::string_view, 4> kFilterRules = {
    "empty", "short", "nonsentence", "identical"};

struct FilterReport {
  std::size_t input_pairs = 0;
  std::size_t output_pairs = 0;
  std::map<std::string, std::size_t> removed_by_rule;
  std::map<std::string, std::vector<SentenceId>> removed_ids;

  std::size_t removed_total() const;
};

void to_json(nlohmann::json& j, const FilterReport& report);

// Detokenizes both sides, then applies empty -> short -> nonsentence ->
// identical. A pair is charged to the first rule that removes it.
std::pair<ParallelCorpus, FilterReport> RunFilters(
    const ParallelCorpus& corpus, const TokenizationProfile& profile = {});

}  // namespace forge

#endif  // FORGE_FILTER_H_
