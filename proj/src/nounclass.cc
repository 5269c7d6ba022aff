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

#include "forge/nounclass.h"

#include <algorithm>
#include <array>
#include <optional>
#include <map>
#include <set>
#include <unordered_set>

#include "forge/corpus.h"
#include "forge/error.h"
#include "forge/metrics.h"
#include "forge/parallel.h"
#include "forge/unicode.h"
#include "nlohmann/json.hpp"

namespace forge {
namespace {

constexpr std::array<std::string_view, 18> kTags = {
    "ADJ",  "ADP",  "ADV",   "AUX",   "CCONJ", "DET",  "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM",  "VERB", "X",    "OTHER"};

// First `n` code points of `text`, or nullopt when it is shorter.
std::optional<std::string> Prefix(std::string_view text, std::size_t n) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if ((static_cast<unsigned char>(text[i]) & 0xC0) == 0x80) continue;
    if (seen == n) return std::string(text.substr(0, i));
    ++seen;
  }
  if (seen == n) return std::string(text);
  return std::nullopt;
}

struct Occurrence {
  std::string prefix;
  std::string noun;
  bool correct;
};

}  // namespace

bool IsKnownTag(std::string_view tag) {
  return std::find(kTags.begin(), kTags.end(), tag) != kTags.end();
}

TaggedSentence ParseTaggedLine(std::string_view line, std::string_view where) {
  TaggedSentence sentence;
  for (const std::string& item : unicode::SplitWhitespace(line)) {
    const std::size_t slash = item.find('/');
    if (slash == std::string::npos || slash == 0 ||
        slash + 1 == item.size() ||
        item.find('/', slash + 1) != std::string::npos) {
      throw Error(std::string(where) + ": malformed token/TAG item '" + item +
                  "'");
    }
    std::string tag = item.substr(slash + 1);
    if (!IsKnownTag(tag)) {
      throw Error(std::string(where) + ": unknown tag '" + tag + "'");
    }
    sentence.tokens.push_back(item.substr(0, slash));
    sentence.tags.push_back(std::move(tag));
  }
  return sentence;
}

std::vector<TaggedSentence> IngestTags(const std::filesystem::path& path) {
  const std::vector<std::string> lines = ReadLines(path);
  std::vector<TaggedSentence> out;
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out.push_back(ParseTaggedLine(
        lines[i], path.string() + ":" + std::to_string(i + 1)));
  }
  return out;
}

TaggedSentence ProjectTags(const TaggedSentence& source,
                           const std::vector<std::string>& target_tokens,
                           const Alignment& alignment) {
  if (source.tokens.size() != source.tags.size()) {
    throw Error("tagged sentence has " + std::to_string(source.tokens.size()) +
                " tokens but " + std::to_string(source.tags.size()) + " tags");
  }
  TaggedSentence out;
  out.tokens = target_tokens;
  out.tags.assign(target_tokens.size(), std::string(kOtherTag));
  std::vector<bool> linked(target_tokens.size(), false);
  for (const Link& link : alignment) {
    if (link.src >= source.tokens.size() || link.tgt >= target_tokens.size()) {
      throw Error("alignment link " + std::to_string(link.src) + "-" +
                  std::to_string(link.tgt) + " out of bounds for " +
                  std::to_string(source.tokens.size()) + "x" +
                  std::to_string(target_tokens.size()) + " pair");
    }
    if (linked[link.tgt]) {
      throw Error("target position " + std::to_string(link.tgt) +
                  " has more than one link");
    }
    linked[link.tgt] = true;
    out.tags[link.tgt] = source.tags[link.src];
  }
  return out;
}

AnalysisReport NounClassAccuracy(const std::vector<TaggedSentence>& references,
                                 const std::vector<std::string>& hypotheses,
                                 std::size_t prefix_len, std::string_view tag) {
  if (references.size() != hypotheses.size()) {
    throw Error("reference/hypothesis length mismatch: " +
                std::to_string(references.size()) + " vs " +
                std::to_string(hypotheses.size()));
  }
  if (prefix_len == 0) throw Error("prefix length must be >= 1");
  if (!IsKnownTag(tag)) throw Error("unknown tag '" + std::string(tag) + "'");

  std::vector<std::vector<Occurrence>> per_sentence(references.size());
  ParallelFor(references.size(), 256, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const TaggedSentence& ref = references[i];
      if (ref.tokens.size() != ref.tags.size()) {
        throw Error("reference " + std::to_string(i + 1) +
                    ": token/tag count mismatch");
      }
      std::unordered_set<std::string> hyp_tokens;
      for (const auto& t : unicode::SplitWhitespace(hypotheses[i])) {
        hyp_tokens.insert(unicode::CaseFold(t));
      }
      for (const auto& t :
           unicode::SplitWhitespace(IntlTokenize(hypotheses[i]))) {
        hyp_tokens.insert(unicode::CaseFold(t));
      }
      for (std::size_t k = 0; k < ref.tokens.size(); ++k) {
        if (ref.tags[k] != tag) continue;
        std::string noun = unicode::CaseFold(ref.tokens[k]);
        auto prefix = Prefix(noun, prefix_len);
        if (!prefix) continue;
        const bool correct = hyp_tokens.count(noun) > 0;
        per_sentence[i].push_back({std::move(*prefix), std::move(noun), correct});
      }
    }
  });

  std::map<std::string, NounClassBucket> by_prefix;
  std::map<std::string, std::set<std::string>> members;
  AnalysisReport report;
  report.prefix_len = prefix_len;
  report.tag = std::string(tag);
  for (const auto& occurrences : per_sentence) {
    for (const Occurrence& o : occurrences) {
      NounClassBucket& bucket = by_prefix[o.prefix];
      bucket.prefix = o.prefix;
      ++bucket.total;
      bucket.correct += o.correct ? 1 : 0;
      members[o.prefix].insert(o.noun);
      ++report.nouns;
    }
  }
  report.distinct_prefixes = by_prefix.size();
  for (auto& [prefix, bucket] : by_prefix) {
    const auto& m = members[prefix];
    bucket.members.assign(m.begin(), m.end());
    report.buckets.push_back(std::move(bucket));
  }
  std::stable_sort(report.buckets.begin(), report.buckets.end(),
                   [](const NounClassBucket& a, const NounClassBucket& b) {
                     return a.total > b.total;
                   });
  if (report.buckets.size() > kTopBuckets) report.buckets.resize(kTopBuckets);
  if (!report.buckets.empty()) {
    double sum = 0.0;
    for (const auto& b : report.buckets) sum += b.accuracy();
    report.macro_accuracy = sum / static_cast<double>(report.buckets.size());
  }
  return report;
}

ComparisonReport CompareSystems(const AnalysisReport& a,
                                const AnalysisReport& b) {
  if (a.prefix_len != b.prefix_len || a.tag != b.tag) {
    throw Error("bucket mismatch: reports use different prefix length or tag");
  }
  if (a.buckets.size() != b.buckets.size()) {
    throw Error("bucket mismatch: " + std::to_string(a.buckets.size()) +
                " vs " + std::to_string(b.buckets.size()) + " buckets");
  }
  ComparisonReport out;
  out.prefix_len = a.prefix_len;
  for (std::size_t i = 0; i < a.buckets.size(); ++i) {
    const NounClassBucket& x = a.buckets[i];
    const NounClassBucket& y = b.buckets[i];
    if (x.prefix != y.prefix || x.total != y.total) {
      throw Error("bucket mismatch at rank " + std::to_string(i + 1) + ": '" +
                  x.prefix + "' vs '" + y.prefix + "'");
    }
    out.buckets.push_back(
        {x.prefix, x.accuracy(), y.accuracy(), y.accuracy() - x.accuracy()});
  }
  out.macro_a = a.macro_accuracy;
  out.macro_b = b.macro_accuracy;
  out.macro_delta = b.macro_accuracy - a.macro_accuracy;
  return out;
}

void to_json(nlohmann::json& j, const TaggedSentence& sentence) {
  j = nlohmann::json{{"tokens", sentence.tokens}, {"tags", sentence.tags}};
}

void to_json(nlohmann::json& j, const AnalysisReport& report) {
  nlohmann::json buckets = nlohmann::json::array();
  for (const auto& b : report.buckets) {
    buckets.push_back({{"prefix", b.prefix},
                       {"total", b.total},
                       {"correct", b.correct},
                       {"accuracy", b.accuracy()},
                       {"members", b.members}});
  }
  j = nlohmann::json{{"prefix_len", report.prefix_len},
                     {"tag", report.tag},
                     {"nouns", report.nouns},
                     {"distinct_prefixes", report.distinct_prefixes},
                     {"buckets", std::move(buckets)},
                     {"macro_accuracy", report.macro_accuracy}};
}

void to_json(nlohmann::json& j, const ComparisonReport& report) {
  nlohmann::json buckets = nlohmann::json::array();
  for (const auto& b : report.buckets) {
    buckets.push_back({{"prefix", b.prefix},
                       {"accuracy_a", b.accuracy_a},
                       {"accuracy_b", b.accuracy_b},
                       {"delta", b.delta},
                       {"delta_points", 100.0 * b.delta}});
  }
  j = nlohmann::json{{"prefix_len", report.prefix_len},
                     {"buckets", std::move(buckets)},
                     {"macro_a", report.macro_a},
                     {"macro_b", report.macro_b},
                     {"macro_delta", report.macro_delta},
                     {"macro_delta_points", 100.0 * report.macro_delta}};
}

}  // namespace forge
