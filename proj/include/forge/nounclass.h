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

#ifndef FORGE_NOUNCLASS_H_
#define FORGE_NOUNCLASS_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "forge/align.h"
#include "nlohmann/json_fwd.hpp"

namespace forge {

// Universal POS tags plus OTHER for target words without a projected tag.
bool IsKnownTag(std::string_view tag);
inline constexpr std::string_view kOtherTag = "OTHER";
inline constexpr std::string_view kNounTag = "NOUN";

struct TaggedSentence {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;  // same length as tokens

  friend bool operator==(const TaggedSentence&,
                         const TaggedSentence&) = default;
};

// One sentence of whitespace-separated token/TAG items. Each item has
// exactly one slash. `where` prefixes error messages.
TaggedSentence ParseTaggedLine(std::string_view line,
                               std::string_view where = "line");
std::vector<TaggedSentence> IngestTags(const std::filesystem::path& path);

// Target token j takes the tag of the source token linked to it, OTHER if
// unlinked. Throws Error on an out-of-range or repeated target index.
TaggedSentence ProjectTags(const TaggedSentence& source,
                           const std::vector<std::string>& target_tokens,
                           const Alignment& alignment);

struct NounClassBucket {
  std::string prefix;  // casefolded, prefix_len code points
  std::size_t total = 0;
  std::size_t correct = 0;
  std::vector<std::string> members;  // distinct nouns, sorted

  double accuracy() const {
    return total == 0 ? 0.0
                      : static_cast<double>(correct) /
                            static_cast<double>(total);
  }
};

struct AnalysisReport {
  std::size_t prefix_len = 2;
  std::string tag = std::string(kNounTag);
  std::size_t nouns = 0;              // tagged tokens long enough to bucket
  std::size_t distinct_prefixes = 0;
  std::vector<NounClassBucket> buckets;  // by total desc, then prefix
  double macro_accuracy = 0.0;           // mean over `buckets`
};

inline constexpr std::size_t kTopBuckets = 10;

// A reference noun occurrence is correct when its casefolded form is one
// of the casefolded tokens of the matching hypothesis, split either on
// whitespace or with the international BLEU tokenizer.
AnalysisReport NounClassAccuracy(const std::vector<TaggedSentence>& references,
                                 const std::vector<std::string>& hypotheses,
                                 std::size_t prefix_len,
                                 std::string_view tag = kNounTag);

struct BucketDelta {
  std::string prefix;
  double accuracy_a = 0.0;
  double accuracy_b = 0.0;
  double delta = 0.0;  // b - a
};

struct ComparisonReport {
  std::size_t prefix_len = 2;
  std::vector<BucketDelta> buckets;
  double macro_a = 0.0;
  double macro_b = 0.0;
  double macro_delta = 0.0;
};

// Throws Error when the two reports do not share the same bucket list.
ComparisonReport CompareSystems(const AnalysisReport& a,
                                const AnalysisReport& b);

void to_json(nlohmann::json& j, const TaggedSentence& sentence);
void to_json(nlohmann::json& j, const AnalysisReport& report);
void to_json(nlohmann::json& j, const ComparisonReport& report);

}  // namespace forge

#endif  // FORGE_NOUNCLASS_H_
