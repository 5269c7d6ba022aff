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

#ifndef FORGE_DEDUP_H_
#define FORGE_DEDUP_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "forge/corpus.h"
#include "forge/filter.h"
#include "nlohmann/json_fwd.hpp"

namespace forge {

// Length of the longest common subsequence, by code point. Bit-parallel
// (64 pattern positions per word).
std::size_t LcsLength(std::u32string_view a, std::u32string_view b);

// Indel similarity in [0, 100]: 100 * 2 * LCS / (|a| + |b|) over code
// points, 100 for two empty strings.
double Similarity(std::u32string_view a, std::u32string_view b);
double Similarity(std::string_view a, std::string_view b);

// Upper bound on Similarity from the lengths alone.
double SimilarityBound(std::size_t len_a, std::size_t len_b);

struct DedupPlan {
  double threshold = 60.0;  // strictly-greater scores are duplicates
  std::size_t window = 50;
  std::size_t top_ngrams = 100000;
  std::size_t ngram_order = 4;
  std::size_t bucket_cap = 10000;

  // Throws Error naming the first bad field.
  void Validate() const;
};

struct DedupEntry {
  SentenceId id;
  std::string text;
};

struct Witness {
  SentenceId kept_id;
  double score;
};

struct BucketStats {
  std::size_t buckets = 0;
  std::size_t max_bucket = 0;
  std::size_t capped_buckets = 0;
};

// Removal set of one or both heuristics. The removed member of a duplicate
// pair is always the one with the larger id.
struct RemovalSet {
  std::map<SentenceId, Witness> removed;
  std::size_t window_candidates = 0;
  std::size_t ngram_candidates = 0;
  std::size_t comparisons = 0;  // distinct pairs considered
  std::size_t scored = 0;       // pairs that survived the length bound
  BucketStats buckets;
  std::vector<std::string> warnings;
};

RemovalSet DedupWindow(std::span<const DedupEntry> entries,
                       const DedupPlan& plan);
RemovalSet DedupNgramBuckets(std::span<const DedupEntry> entries,
                             const DedupPlan& plan);
// Both heuristics with one shared pair memo.
RemovalSet DedupCombined(std::span<const DedupEntry> entries,
                         const DedupPlan& plan);

struct DedupReport {
  std::size_t input = 0;
  std::size_t output = 0;
  RemovalSet removal;
};

void to_json(nlohmann::json& j, const DedupReport& report);

// Bitext: similarity is computed on the source (English) side
// and the whole pair is dropped.
std::pair<ParallelCorpus, DedupReport> Dedup(const ParallelCorpus& corpus,
                                             const DedupPlan& plan);
std::pair<MonolingualCorpus, DedupReport> Dedup(const MonolingualCorpus& corpus,
                                                const DedupPlan& plan);

}  // namespace forge

#endif  // FORGE_DEDUP_H_
