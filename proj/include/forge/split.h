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

#ifndef FORGE_SPLIT_H_
#define FORGE_SPLIT_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/corpus.h"
#include "forge/dedup.h"
#include "forge/rng.h"
#include "nlohmann/json_fwd.hpp"

namespace forge {

enum class OverlapMetric {
  // Share of a sentence's distinct four-grams found in another sentence.
  kFraction,
  // Number of such four-grams, unnormalized.
  kRawCount,
};

enum class Assignment { kAlternating, kContiguous };

OverlapMetric ParseOverlapMetric(std::string_view name);
std::string_view OverlapMetricName(OverlapMetric metric);
Assignment ParseAssignment(std::string_view name);
std::string_view AssignmentName(Assignment assignment);

struct OverlapScore {
  SentenceId id;
  double value;
};

// Scores every pair on its source (English) side, casefolded whitespace
// tokens. Sentences without any n-gram score 0.
std::vector<OverlapScore> OverlapScores(
    const ParallelCorpus& corpus, OverlapMetric metric = OverlapMetric::kFraction,
    std::size_t order = 4);

struct SplitSpec {
  std::size_t valid_size = 3000;
  std::size_t test_size = 3000;
  Assignment assignment = Assignment::kAlternating;
  OverlapMetric metric = OverlapMetric::kFraction;
  // Recorded in manifests. Selection is fully determined by (score, id), so
  // no draw is taken from it.
  Seed seed;
};

struct Split {
  ParallelCorpus train;
  ParallelCorpus valid;
  ParallelCorpus test;
};

// The valid_size + test_size lowest-overlap pairs (ties by id) are held
// out; alternating assignment sends even ranks to valid and odd ranks to
// test until one side is full. Each output keeps ascending id order.
Split MakeSplit(const ParallelCorpus& corpus, const SplitSpec& spec);

// {"train": [ids], "valid": [ids], "test": [ids], ...}
nlohmann::json SplitManifest(const Split& split, const SplitSpec& spec);

struct LeakageHit {
  SentenceId heldout_id;
  SentenceId train_id;
  double score;
};

struct LeakageEntry {
  std::string name;  // e.g. "valid-train"
  std::size_t heldout = 0;
  std::size_t flagged = 0;
  std::optional<LeakageHit> max_witness;
  std::vector<LeakageHit> hits;  // flagged held-out sentences, by id
};

struct LeakageReport {
  double threshold = 60.0;
  std::vector<LeakageEntry> entries;
};

void to_json(nlohmann::json& j, const LeakageReport& report);

struct AuditOptions {
  double threshold = 60.0;
  std::size_t window = 50;
  std::size_t ngram_order = 4;
  std::size_t bucket_cap = 10000;
  // Score every (held-out, train) pair instead of the bucketed candidates.
  bool exhaustive = false;
};

// For each held-out sentence, the best-scoring train sentence among those
// sharing a word n-gram with it or sorting within `window` of it.
LeakageEntry AuditLeakage(const ParallelCorpus& train,
                          const ParallelCorpus& heldout,
                          const AuditOptions& options = {},
                          std::string name = "heldout-train");

// valid-train, test-train and test-valid.
LeakageReport AuditSplit(const Split& split, const AuditOptions& options = {});

}  // namespace forge

#endif  // FORGE_SPLIT_H_
