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

#include "forge/dedup.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "forge/error.h"
#include "forge/ngram.h"
#include "forge/parallel.h"
#include "forge/unicode.h"
#include "nlohmann/json.hpp"

namespace forge {
namespace {

// Match masks of a pattern string: for each distinct code point, one bit
// per pattern position.
class PatternMasks {
 public:
  explicit PatternMasks(std::u32string_view pattern)
      : words_((pattern.size() + 63) / 64) {
    ascii_.fill(-1);
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      uint64_t* mask = MutableMask(pattern[i]);
      mask[i / 64] |= uint64_t{1} << (i % 64);
    }
  }

  std::size_t words() const { return words_; }

  const uint64_t* Find(char32_t cp) const {
    int32_t slot = -1;
    if (cp < 128) {
      slot = ascii_[cp];
    } else if (auto it = other_.find(cp); it != other_.end()) {
      slot = it->second;
    }
    return slot < 0 ? nullptr : masks_.data() + slot * words_;
  }

 private:
  uint64_t* MutableMask(char32_t cp) {
    int32_t* slot = nullptr;
    if (cp < 128) {
      slot = &ascii_[cp];
    } else {
      slot = &other_.try_emplace(cp, -1).first->second;
    }
    if (*slot < 0) {
      *slot = static_cast<int32_t>(masks_.size() / words_);
      masks_.resize(masks_.size() + words_, 0);
    }
    return masks_.data() + static_cast<std::size_t>(*slot) * words_;
  }

  std::size_t words_;
  std::array<int32_t, 128> ascii_;
  std::unordered_map<char32_t, int32_t> other_;
  std::vector<uint64_t> masks_;
};

uint64_t PairKey(uint32_t a, uint32_t b) {
  if (a > b) std::swap(a, b);
  return (uint64_t{a} << 32) | b;
}

struct Prepared {
  std::vector<std::u32string> text;
  std::vector<SentenceId> ids;
};

Prepared Prepare(std::span<const DedupEntry> entries) {
  Prepared p;
  p.text.resize(entries.size());
  p.ids.reserve(entries.size());
  for (const DedupEntry& e : entries) p.ids.push_back(e.id);
  ParallelFor(entries.size(), 1024, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      p.text[i] = unicode::Decode(entries[i].text);
    }
  });
  return p;
}

// Distinct candidate pairs in first-seen order.
class CandidateSet {
 public:
  bool Add(uint32_t a, uint32_t b) {
    const uint64_t key = PairKey(a, b);
    if (!seen_.insert(key).second) return false;
    pairs_.push_back(key);
    return true;
  }
  const std::vector<uint64_t>& pairs() const { return pairs_; }

 private:
  std::unordered_set<uint64_t> seen_;
  std::vector<uint64_t> pairs_;
};

void AddWindowCandidates(std::span<const DedupEntry> entries,
                         const DedupPlan& plan, CandidateSet& candidates,
                         RemovalSet& result) {
  std::vector<uint32_t> order(entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    if (entries[a].text != entries[b].text) {
      return entries[a].text < entries[b].text;
    }
    return entries[a].id < entries[b].id;
  });
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t first = pos >= plan.window ? pos - plan.window : 0;
    for (std::size_t prev = first; prev < pos; ++prev) {
      ++result.window_candidates;
      candidates.Add(order[prev], order[pos]);
    }
  }
}

void AddNgramCandidates(std::span<const DedupEntry> entries,
                        const DedupPlan& plan, CandidateSet& candidates,
                        RemovalSet& result) {
  std::vector<std::string> texts;
  texts.reserve(entries.size());
  for (const DedupEntry& e : entries) texts.push_back(e.text);
  const NgramIndex index(texts, plan.ngram_order);
  for (NgramId gram : index.TopByCount(plan.top_ngrams)) {
    const std::vector<uint32_t>& posting = index.postings(gram);
    std::size_t size = posting.size();
    ++result.buckets.buckets;
    result.buckets.max_bucket = std::max(result.buckets.max_bucket, size);
    if (size > plan.bucket_cap) {
      ++result.buckets.capped_buckets;
      result.warnings.push_back("bucket '" + index.ngram(gram) + "' has " +
                                std::to_string(size) +
                                " sentences; compared only the first " +
                                std::to_string(plan.bucket_cap));
      size = plan.bucket_cap;
    }
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = i + 1; j < size; ++j) {
        ++result.ngram_candidates;
        candidates.Add(posting[i], posting[j]);
      }
    }
  }
}

void ScoreCandidates(const Prepared& prepared, const CandidateSet& candidates,
                     const DedupPlan& plan, RemovalSet& result) {
  const std::vector<uint64_t>& pairs = candidates.pairs();
  std::vector<double> scores(pairs.size(), -1.0);
  ParallelFor(pairs.size(), 4096, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const auto a = static_cast<uint32_t>(pairs[k] >> 32);
      const auto b = static_cast<uint32_t>(pairs[k] & 0xFFFFFFFFu);
      const std::u32string& ta = prepared.text[a];
      const std::u32string& tb = prepared.text[b];
      if (SimilarityBound(ta.size(), tb.size()) <= plan.threshold) continue;
      scores[k] = Similarity(ta, tb);
    }
  });

  result.comparisons = pairs.size();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (scores[k] < 0.0) continue;
    ++result.scored;
    if (!(scores[k] > plan.threshold)) continue;
    SentenceId x = prepared.ids[pairs[k] >> 32];
    SentenceId y = prepared.ids[pairs[k] & 0xFFFFFFFFu];
    if (x > y) std::swap(x, y);
    auto [it, inserted] = result.removed.try_emplace(y, Witness{x, scores[k]});
    if (!inserted && x < it->second.kept_id) it->second = Witness{x, scores[k]};
  }
}

enum class Heuristics { kWindow, kNgram, kBoth };

RemovalSet RunDedup(std::span<const DedupEntry> entries, const DedupPlan& plan,
                    Heuristics which) {
  plan.Validate();
  if (entries.size() > UINT32_MAX) throw Error("corpus too large to dedup");
  RemovalSet result;
  CandidateSet candidates;
  if (which != Heuristics::kNgram) {
    AddWindowCandidates(entries, plan, candidates, result);
  }
  if (which != Heuristics::kWindow) {
    AddNgramCandidates(entries, plan, candidates, result);
  }
  ScoreCandidates(Prepare(entries), candidates, plan, result);
  return result;
}

}  // namespace

std::size_t LcsLength(std::u32string_view a, std::u32string_view b) {
  if (a.size() > b.size()) std::swap(a, b);
  if (a.empty()) return 0;
  const PatternMasks masks(a);
  const std::size_t words = masks.words();
  std::vector<uint64_t> v(words, ~uint64_t{0});
  for (char32_t cp : b) {
    const uint64_t* match = masks.Find(cp);
    if (match == nullptr) continue;
    uint64_t carry = 0;
    for (std::size_t w = 0; w < words; ++w) {
      const uint64_t u = v[w] & match[w];
      const uint64_t sum = v[w] + u;
      const uint64_t total = sum + carry;
      carry = static_cast<uint64_t>(sum < v[w]) | static_cast<uint64_t>(total < sum);
      v[w] = total | (v[w] - u);
    }
  }
  std::size_t zeros = 0;
  for (std::size_t w = 0; w < words; ++w) {
    const std::size_t bits = std::min<std::size_t>(64, a.size() - w * 64);
    const uint64_t valid = bits == 64 ? ~uint64_t{0} : (uint64_t{1} << bits) - 1;
    zeros += static_cast<std::size_t>(std::popcount(~v[w] & valid));
  }
  return zeros;
}

double Similarity(std::u32string_view a, std::u32string_view b) {
  const std::size_t total = a.size() + b.size();
  if (total == 0) return 100.0;
  return 100.0 * static_cast<double>(2 * LcsLength(a, b)) /
         static_cast<double>(total);
}

double Similarity(std::string_view a, std::string_view b) {
  return Similarity(unicode::Decode(a), unicode::Decode(b));
}

double SimilarityBound(std::size_t len_a, std::size_t len_b) {
  const std::size_t total = len_a + len_b;
  if (total == 0) return 100.0;
  return 100.0 * static_cast<double>(2 * std::min(len_a, len_b)) /
         static_cast<double>(total);
}

void DedupPlan::Validate() const {
  if (!(threshold > 0.0 && threshold <= 100.0)) {
    throw Error("threshold must be in (0,100]");
  }
  if (window < 1) throw Error("window must be >= 1");
  if (top_ngrams < 1) throw Error("top_ngrams must be >= 1");
  if (ngram_order < 1) throw Error("ngram_order must be >= 1");
  if (bucket_cap < 2) throw Error("bucket_cap must be >= 2");
}

RemovalSet DedupWindow(std::span<const DedupEntry> entries,
                       const DedupPlan& plan) {
  return RunDedup(entries, plan, Heuristics::kWindow);
}

RemovalSet DedupNgramBuckets(std::span<const DedupEntry> entries,
                             const DedupPlan& plan) {
  return RunDedup(entries, plan, Heuristics::kNgram);
}

RemovalSet DedupCombined(std::span<const DedupEntry> entries,
                         const DedupPlan& plan) {
  return RunDedup(entries, plan, Heuristics::kBoth);
}

void to_json(nlohmann::json& j, const DedupReport& report) {
  nlohmann::json removed = nlohmann::json::array();
  for (const auto& [id, witness] : report.removal.removed) {
    removed.push_back(
        {{"id", id}, {"kept_id", witness.kept_id}, {"score", witness.score}});
  }
  const RemovalSet& r = report.removal;
  j = nlohmann::json{
      {"input", report.input},
      {"output", report.output},
      {"removed", std::move(removed)},
      {"window_candidates", r.window_candidates},
      {"ngram_candidates", r.ngram_candidates},
      {"comparisons", r.comparisons},
      {"scored", r.scored},
      {"buckets",
       {{"count", r.buckets.buckets},
        {"max_size", r.buckets.max_bucket},
        {"capped", r.buckets.capped_buckets}}},
      {"warnings", r.warnings}};
}

std::pair<ParallelCorpus, DedupReport> Dedup(const ParallelCorpus& corpus,
                                             const DedupPlan& plan) {
  std::vector<DedupEntry> entries;
  entries.reserve(corpus.size());
  for (const SentencePair& pair : corpus.pairs()) {
    entries.push_back({pair.id, pair.source.text});
  }
  DedupReport report;
  report.input = corpus.size();
  report.removal = DedupCombined(entries, plan);
  std::vector<SentenceId> keep;
  for (const SentencePair& pair : corpus.pairs()) {
    if (!report.removal.removed.contains(pair.id)) keep.push_back(pair.id);
  }
  report.output = keep.size();
  return {corpus.Select(keep), std::move(report)};
}

std::pair<MonolingualCorpus, DedupReport> Dedup(const MonolingualCorpus& corpus,
                                                const DedupPlan& plan) {
  std::vector<DedupEntry> entries;
  entries.reserve(corpus.size());
  for (const Sentence& s : corpus.sentences()) entries.push_back({s.id, s.text});
  DedupReport report;
  report.input = corpus.size();
  report.removal = DedupCombined(entries, plan);
  std::vector<Sentence> kept;
  for (const Sentence& s : corpus.sentences()) {
    if (!report.removal.removed.contains(s.id)) kept.push_back(s);
  }
  report.output = kept.size();
  return {MonolingualCorpus(corpus.lang(), corpus.origin(), std::move(kept)),
          std::move(report)};
}

}  // namespace forge
