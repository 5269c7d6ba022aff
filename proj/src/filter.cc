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

#include "forge/filter.h"

#include <algorithm>
#include <optional>

#include "forge/error.h"
#include "forge/parallel.h"
#include "forge/unicode.h"
#include "nlohmann/json.hpp"

namespace forge {
namespace {

constexpr std::u32string_view kClosing = U".,!?;:%)]}»";
constexpr std::u32string_view kOpening = U"([{«";

bool AllOf(std::u32string_view token, std::u32string_view set) {
  if (token.empty()) return false;
  return std::all_of(token.begin(), token.end(), [&](char32_t cp) {
    return set.find(cp) != std::u32string_view::npos;
  });
}

template <typename Pred>
bool AllCodePoints(std::string_view token, Pred pred) {
  if (token.empty()) return false;
  for (char32_t cp : unicode::Decode(token)) {
    if (!pred(cp)) return false;
  }
  return true;
}

bool IsContractionSuffix(std::u32string_view token) {
  if (token.size() >= 2 && token[0] == U'\'' && unicode::IsLetter(token[1])) {
    return true;
  }
  return token == U"n't" || token == U"N'T" || token == U"N't";
}

bool SideFails(const SentencePair& pair, Side side,
               bool (*fails)(std::string_view)) {
  if (fails(pair.source.text)) return true;
  return side == Side::kBoth && fails(pair.target.text);
}

bool TooShort(std::string_view text) {
  return TokenizationProfile::CountedTokens(text) < kMinCountedTokens;
}

bool NoLetters(std::string_view text) { return !unicode::ContainsLetter(text); }

}  // namespace

Side ParseSide(std::string_view name) {
  if (name == "source") return Side::kSource;
  if (name == "both") return Side::kBoth;
  throw Error("side must be 'source' or 'both', got '" + std::string(name) +
              "'");
}

std::string_view SideName(Side side) {
  return side == Side::kSource ? "source" : "both";
}

bool TokenizationProfile::IsNumericOnly(std::string_view token) {
  return AllCodePoints(token, unicode::IsNumber);
}

bool TokenizationProfile::IsPunctuationOnly(std::string_view token) {
  return AllCodePoints(token, [](char32_t cp) {
    return unicode::IsPunctuation(cp) || unicode::IsSymbol(cp);
  });
}

bool TokenizationProfile::IsNumericOrPunctuation(std::string_view token) {
  return AllCodePoints(token, [](char32_t cp) {
    return unicode::IsNumber(cp) || unicode::IsPunctuation(cp) ||
           unicode::IsSymbol(cp);
  });
}

bool TokenizationProfile::ContainsLetter(std::string_view token) {
  return unicode::ContainsLetter(token);
}

std::size_t TokenizationProfile::CountedTokens(std::string_view text) {
  std::size_t n = 0;
  for (const unicode::Span& span : unicode::WhitespaceSpans(text)) {
    if (!IsNumericOrPunctuation(text.substr(span.begin, span.end - span.begin))) {
      ++n;
    }
  }
  return n;
}

Verdict FilterEmpty(const SentencePair& pair) {
  const bool empty = unicode::WhitespaceSpans(pair.source.text).empty() ||
                     unicode::WhitespaceSpans(pair.target.text).empty();
  return empty ? Verdict::kRemove : Verdict::kKeep;
}

Verdict FilterShort(const SentencePair& pair, Side side) {
  if (FilterEmpty(pair) == Verdict::kRemove) return Verdict::kRemove;
  return SideFails(pair, side, TooShort) ? Verdict::kRemove : Verdict::kKeep;
}

Verdict FilterNonSentence(const SentencePair& pair, Side side) {
  return SideFails(pair, side, NoLetters) ? Verdict::kRemove : Verdict::kKeep;
}

std::string IdentityKey(std::string_view text) {
  std::string key;
  for (char32_t cp : unicode::Decode(unicode::CaseFold(text))) {
    if (!unicode::IsWhitespace(cp)) unicode::AppendUtf8(cp, key);
  }
  return key;
}

Verdict FilterIdentical(const SentencePair& pair) {
  return IdentityKey(pair.source.text) == IdentityKey(pair.target.text)
             ? Verdict::kRemove
             : Verdict::kKeep;
}

std::string Detokenize(std::string_view text) {
  std::vector<std::u32string> tokens;
  for (const std::string& token : unicode::SplitWhitespace(text)) {
    tokens.push_back(unicode::Decode(token));
  }
  std::u32string out;
  bool glue_next = false;
  int double_quotes = 0;
  int single_quotes = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::u32string& token = tokens[i];
    const bool prev_alnum =
        i > 0 && unicode::IsAlnum(tokens[i - 1].back());
    const bool next_letter =
        i + 1 < tokens.size() && unicode::IsLetter(tokens[i + 1].front());
    bool attach_left = false;
    bool glue_after = false;

    auto quote = [&](int& count) {
      if (count % 2 == 0) {
        glue_after = true;
      } else {
        attach_left = true;
      }
      ++count;
    };

    if (AllOf(token, kClosing)) {
      attach_left = true;
    } else if (AllOf(token, kOpening)) {
      glue_after = true;
    } else if (token == U"\"") {
      quote(double_quotes);
    } else if (token == U"'") {
      if (prev_alnum && next_letter) {
        attach_left = true;
        glue_after = true;
      } else {
        quote(single_quotes);
      }
    } else if (prev_alnum && IsContractionSuffix(token)) {
      attach_left = true;
    }

    if (i > 0 && !attach_left && !glue_next) out.push_back(U' ');
    out += token;
    glue_next = glue_after;
  }
  return unicode::NormalizeNfc(unicode::Encode(out));
}

std::size_t FilterReport::removed_total() const {
  std::size_t total = 0;
  for (const auto& [rule, count] : removed_by_rule) total += count;
  return total;
}

void to_json(nlohmann::json& j, const FilterReport& report) {
  j = nlohmann::json{{"input_pairs", report.input_pairs},
                     {"output_pairs", report.output_pairs},
                     {"removed_by_rule", report.removed_by_rule},
                     {"removed_ids", report.removed_ids}};
}

std::pair<ParallelCorpus, FilterReport> RunFilters(
    const ParallelCorpus& corpus, const TokenizationProfile& profile) {
  const std::size_t n = corpus.size();
  std::vector<SentencePair> detokenized(corpus.pairs());
  // Index into kFilterRules, or -1 to keep.
  std::vector<int> charged(n, -1);
  ParallelFor(n, 256, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      SentencePair& pair = detokenized[i];
      pair.source.text = Detokenize(pair.source.text);
      pair.target.text = Detokenize(pair.target.text);
      if (FilterEmpty(pair) == Verdict::kRemove) {
        charged[i] = 0;
      } else if (FilterShort(pair, profile.side) == Verdict::kRemove) {
        charged[i] = 1;
      } else if (FilterNonSentence(pair, profile.side) == Verdict::kRemove) {
        charged[i] = 2;
      } else if (FilterIdentical(pair) == Verdict::kRemove) {
        charged[i] = 3;
      }
    }
  });

  FilterReport report;
  report.input_pairs = n;
  for (std::string_view rule : kFilterRules) {
    report.removed_by_rule[std::string(rule)] = 0;
    report.removed_ids[std::string(rule)] = {};
  }
  std::vector<SentencePair> kept;
  for (std::size_t i = 0; i < n; ++i) {
    if (charged[i] < 0) {
      kept.push_back(std::move(detokenized[i]));
      continue;
    }
    const std::string rule(kFilterRules[static_cast<std::size_t>(charged[i])]);
    ++report.removed_by_rule[rule];
    report.removed_ids[rule].push_back(corpus[i].id);
  }
  report.output_pairs = kept.size();
  return {ParallelCorpus(corpus.src_lang(), corpus.tgt_lang(), std::move(kept)),
          std::move(report)};
}

}  // namespace forge
