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

#include "forge/split.h"

#include <algorithm>
#include <numeric>

#include "forge/error.h"
#include "forge/ngram.h"
#include "forge/parallel.h"
#include "forge/unicode.h"
#include "nlohmann/json.hpp"

namespace forge {
namespace {

std::vector<std::string> SourceTexts(const ParallelCorpus& corpus) {
  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const SentencePair& pair : corpus.pairs()) {
    texts.push_back(pair.source.text);
  }
  return texts;
}

std::vector<SentenceId> Ids(const ParallelCorpus& corpus) {
  std::vector<SentenceId> ids;
  ids.reserve(corpus.size());
  for (const SentencePair& pair : corpus.pairs()) ids.push_back(pair.id);
  return ids;
}

}  // namespace

OverlapMetric ParseOverlapMetric(std::string_view name) {
  if (name == "fraction") return OverlapMetric::kFraction;
  if (name == "raw-count") return OverlapMetric::kRawCount;
  throw Error("overlap metric must be 'fraction' or 'raw-count', got '" +
              std::string(name) + "'");
}

std::string_view OverlapMetricName(OverlapMetric metric) {
  return metric == OverlapMetric::kFraction ? "fraction" : "raw-count";
}

Assignment ParseAssignment(std::string_view name) {
  if (name == "alternating") return Assignment::kAlternating;
  if (name == "contiguous") return Assignment::kContiguous;
  throw Error("assignment must be 'alternating' or 'contiguous', got '" +
              std::string(name) + "'");
}

std::string_view AssignmentName(Assignment assignment) {
  return assignment == Assignment::kAlternating ? "alternating" : "contiguous";
}

std::vector<OverlapScore> OverlapScores(const ParallelCorpus& corpus,
                                        OverlapMetric metric,
                                        std::size_t order) {
  const NgramIndex index(SourceTexts(corpus), order);
  std::vector<OverlapScore> scores(corpus.size());
  ParallelFor(corpus.size(), 1024, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const std::vector<NgramId>& grams = index.distinct(i);
      std::size_t shared = 0;
      for (NgramId g : grams) {
        if (index.document_frequency(g) >= 2) ++shared;
      }
      double value = 0.0;
      if (!grams.empty()) {
        value = metric == OverlapMetric::kFraction
                    ? static_cast<double>(shared) /
                          static_cast<double>(grams.size())
                    : static_cast<double>(shared);
      }
      scores[i] = {corpus[i].id, value};
    }
  });
  return scores;
}

Split MakeSplit(const ParallelCorpus& corpus, const SplitSpec& spec) {
  const std::size_t heldout = spec.valid_size + spec.test_size;
  if (heldout > corpus.size()) {
    throw Error("corpus too small to split: need " + std::to_string(heldout) +
                " held-out pairs, have " + std::to_string(corpus.size()));
  }
  std::vector<OverlapScore> ranked = OverlapScores(corpus, spec.metric);
  std::sort(ranked.begin(), ranked.end(),
            [](const OverlapScore& a, const OverlapScore& b) {
              if (a.value != b.value) return a.value < b.value;
              return a.id < b.id;
            });

  std::vector<SentenceId> valid;
  std::vector<SentenceId> test;
  std::vector<SentenceId> train;
  for (std::size_t rank = 0; rank < heldout; ++rank) {
    const SentenceId id = ranked[rank].id;
    bool to_valid;
    if (spec.assignment == Assignment::kContiguous) {
      to_valid = rank < spec.valid_size;
    } else if (valid.size() == spec.valid_size) {
      to_valid = false;
    } else if (test.size() == spec.test_size) {
      to_valid = true;
    } else {
      to_valid = rank % 2 == 0;
    }
    (to_valid ? valid : test).push_back(id);
  }
  for (std::size_t rank = heldout; rank < ranked.size(); ++rank) {
    train.push_back(ranked[rank].id);
  }
  for (auto* ids : {&train, &valid, &test}) std::sort(ids->begin(), ids->end());
  return Split{corpus.Select(train), corpus.Select(valid), corpus.Select(test)};
}

nlohmann::json SplitManifest(const Split& split, const SplitSpec& spec) {
  return nlohmann::json{
      {"valid_size", spec.valid_size},
      {"test_size", spec.test_size},
      {"assignment", AssignmentName(spec.assignment)},
      {"overlap_metric", OverlapMetricName(spec.metric)},
      {"seed", spec.seed.value},
      {"train", Ids(split.train)},
      {"valid", Ids(split.valid)},
      {"test", Ids(split.test)}};
}

void to_json(nlohmann::json& j, const LeakageReport& report) {
  nlohmann::json entries = nlohmann::json::array();
  auto hit_json = [](const LeakageHit& hit) {
    return nlohmann::json{{"heldout_id", hit.heldout_id},
                          {"train_id", hit.train_id},
                          {"score", hit.score}};
  };
  for (const LeakageEntry& e : report.entries) {
    nlohmann::json hits = nlohmann::json::array();
    for (const LeakageHit& hit : e.hits) hits.push_back(hit_json(hit));
    entries.push_back({{"name", e.name},
                       {"heldout", e.heldout},
                       {"flagged", e.flagged},
                       {"max_witness", e.max_witness
                                           ? hit_json(*e.max_witness)
                                           : nlohmann::json(nullptr)},
                       {"hits", std::move(hits)}});
  }
  j = nlohmann::json{{"threshold", report.threshold},
                     {"entries", std::move(entries)}};
}

LeakageEntry AuditLeakage(const ParallelCorpus& train,
                          const ParallelCorpus& heldout,
                          const AuditOptions& options, std::string name) {
  const std::size_t n_train = train.size();
  const std::size_t n_held = heldout.size();
  std::vector<std::u32string> train_text(n_train);
  std::vector<std::u32string> held_text(n_held);
  for (std::size_t i = 0; i < n_train; ++i) {
    train_text[i] = unicode::Decode(train[i].source.text);
  }
  for (std::size_t i = 0; i < n_held; ++i) {
    held_text[i] = unicode::Decode(heldout[i].source.text);
  }

  // Candidate train indices per held-out sentence.
  std::vector<std::vector<uint32_t>> candidates(n_held);
  if (options.exhaustive) {
    std::vector<uint32_t> all(n_train);
    std::iota(all.begin(), all.end(), 0);
    for (auto& c : candidates) c = all;
  } else {
    std::vector<std::string> texts = SourceTexts(train);
    for (const SentencePair& pair : heldout.pairs()) {
      texts.push_back(pair.source.text);
    }
    const NgramIndex index(texts, options.ngram_order);
    // Merged sort order; the window scans both directions.
    std::vector<uint32_t> order(texts.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
      return texts[a] < texts[b];
    });
    std::vector<std::size_t> position(texts.size());
    for (std::size_t p = 0; p < order.size(); ++p) position[order[p]] = p;

    ParallelFor(n_held, 256, [&](std::size_t begin, std::size_t end) {
      for (std::size_t h = begin; h < end; ++h) {
        const std::size_t doc = n_train + h;
        std::vector<uint32_t>& c = candidates[h];
        for (NgramId g : index.distinct(doc)) {
          const auto& posting = index.postings(g);
          const std::size_t limit = std::min(posting.size(), options.bucket_cap);
          for (std::size_t k = 0; k < limit && posting[k] < n_train; ++k) {
            c.push_back(posting[k]);
          }
        }
        const std::size_t p = position[doc];
        std::size_t seen = 0;
        for (std::size_t q = p; q > 0 && seen < options.window; --q) {
          if (order[q - 1] < n_train) {
            c.push_back(order[q - 1]);
            ++seen;
          }
        }
        seen = 0;
        for (std::size_t q = p + 1; q < order.size() && seen < options.window;
             ++q) {
          if (order[q] < n_train) {
            c.push_back(order[q]);
            ++seen;
          }
        }
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
      }
    });
  }

  std::vector<std::optional<LeakageHit>> best(n_held);
  ParallelFor(n_held, 64, [&](std::size_t begin, std::size_t end) {
    for (std::size_t h = begin; h < end; ++h) {
      for (uint32_t t : candidates[h]) {
        const double score = Similarity(held_text[h], train_text[t]);
        // Candidates ascend by train id, so the first maximum wins ties.
        if (!best[h] || score > best[h]->score) {
          best[h] = LeakageHit{heldout[h].id, train[t].id, score};
        }
      }
    }
  });

  LeakageEntry entry;
  entry.name = std::move(name);
  entry.heldout = n_held;
  for (const auto& hit : best) {
    if (!hit) continue;
    if (!entry.max_witness || hit->score > entry.max_witness->score) {
      entry.max_witness = hit;
    }
    if (hit->score > options.threshold) {
      ++entry.flagged;
      entry.hits.push_back(*hit);
    }
  }
  return entry;
}

LeakageReport AuditSplit(const Split& split, const AuditOptions& options) {
  LeakageReport report;
  report.threshold = options.threshold;
  report.entries.push_back(
      AuditLeakage(split.train, split.valid, options, "valid-train"));
  report.entries.push_back(
      AuditLeakage(split.train, split.test, options, "test-train"));
  report.entries.push_back(
      AuditLeakage(split.valid, split.test, options, "test-valid"));
  return report;
}

}  // namespace forge
