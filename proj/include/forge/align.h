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

#ifndef FORGE_ALIGN_H_
#define FORGE_ALIGN_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "forge/corpus.h"

namespace forge {

struct AlignConfig {
  std::size_t iterations = 5;
  // Diagonal prior strength; 0 gives the plain lexical model with a uniform
  // position prior over NULL and every source word.
  double lambda = 0.0;
  // Prior mass of the NULL word when lambda > 0.
  double p_null = 0.08;

  void Validate() const;
};

// Default strength when the diagonal prior is switched on.
inline constexpr double kDefaultDiagonalLambda = 4.0;
// Entries below this are dropped after the final M-step.
inline constexpr double kPruneBelow = 1e-12;

struct Link {
  uint32_t src;
  uint32_t tgt;
  friend bool operator==(const Link&, const Link&) = default;
};

// Links in ascending target order; a target index appears at most once and
// NULL-aligned target words have no link.
using Alignment = std::vector<Link>;

// "i-j i-j ..." (source-target).
std::string FormatAlignment(const Alignment& alignment);
// Throws Error on malformed input.
Alignment ParseAlignment(std::string_view line);

// Translation table t(target | source) plus decoding.
class LexiconModel {
 public:
  static constexpr std::string_view kNullWord = "NULL";

  // EM on casefolded whitespace tokens of every pair. Deterministic, and
  // independent of ThreadCount().
  static LexiconModel Train(const ParallelCorpus& corpus,
                            const AlignConfig& config);

  // Source "NULL" addresses the NULL word. Unknown words score 0.
  double Prob(std::string_view src, std::string_view tgt) const;

  // Max |sum_t t(s, t) - 1| over source words (NULL included).
  double MaxRowDeviation() const;

  // Log-likelihood of the training corpus before each EM iteration and
  // after the last one (iterations + 1 values).
  const std::vector<double>& log_likelihood() const { return log_likelihood_; }
  const AlignConfig& config() const { return config_; }
  std::size_t num_entries() const { return table_.size(); }

  // Per target word: the source position maximizing t * prior; NULL only
  // when it scores strictly higher or nothing scores above zero. Ties go to
  // the smallest source index.
  Alignment Align(const std::vector<std::string>& src_tokens,
                  const std::vector<std::string>& tgt_tokens) const;
  Alignment Align(const SentencePair& pair) const;
  std::vector<Alignment> AlignAll(const ParallelCorpus& corpus) const;

  // Sorted TSV: "src<TAB>tgt<TAB>prob" after one "# ..." header line.
  std::string ToTsv() const;
  static LexiconModel FromTsv(std::string_view tsv);

 private:
  uint32_t SourceId(std::string_view word) const;  // kMissing if absent
  uint32_t TargetId(std::string_view word) const;
  double Lookup(uint32_t src, uint32_t tgt) const;

  static constexpr uint32_t kMissing = UINT32_MAX;

  AlignConfig config_;
  std::vector<std::string> src_vocab_;  // [0] is NULL
  std::vector<std::string> tgt_vocab_;
  std::unordered_map<std::string, uint32_t> src_index_;
  std::unordered_map<std::string, uint32_t> tgt_index_;
  std::unordered_map<uint64_t, double> table_;
  std::vector<double> log_likelihood_;
};

// Prior weight of source position `i` (0-based, NULL excluded) for target
// position `j` under the diagonal prior, before normalization.
double DiagonalWeight(std::size_t i, std::size_t j, std::size_t src_len,
                      std::size_t tgt_len, double lambda);

}  // namespace forge

#endif  // FORGE_ALIGN_H_
