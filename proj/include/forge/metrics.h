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

#ifndef FORGE_METRICS_H_
#define FORGE_METRICS_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nlohmann/json_fwd.hpp"

namespace forge {

// International tokenization as used for detokenized BLEU: punctuation is
// split from neighbouring non-digits, symbols are always split, and runs of
// whitespace collapse to one space.
std::string IntlTokenize(std::string_view text);

inline constexpr std::size_t kBleuMaxOrder = 4;

// Sufficient statistics; sums over segments.
struct BleuStats {
  std::array<uint64_t, kBleuMaxOrder> correct{};  // clipped matches
  std::array<uint64_t, kBleuMaxOrder> total{};    // hypothesis n-grams
  uint64_t hyp_len = 0;
  uint64_t ref_len = 0;

  BleuStats& operator+=(const BleuStats& other);
};

BleuStats SegmentBleuStats(std::string_view hypothesis,
                           std::string_view reference);

struct BleuScore {
  double score = 0.0;  // [0, 100]
  // Smoothed precisions as fractions in [0, 1].
  std::array<double, kBleuMaxOrder> precisions{};
  double brevity_penalty = 1.0;
  uint64_t hyp_len = 0;
  uint64_t ref_len = 0;
  BleuStats stats;
  std::string signature;
};

// Corpus BLEU with clipping, brevity penalty and exponential smoothing.
// Throws Error on length mismatch or an empty corpus.
BleuScore Bleu(const std::vector<std::string>& hypotheses,
               const std::vector<std::string>& references);
BleuScore BleuFromStats(const BleuStats& stats);

inline constexpr std::size_t kChrfOrder = 6;
inline constexpr double kChrfBeta = 2.0;

struct ChrfOptions {
  std::size_t order = kChrfOrder;
  double beta = kChrfBeta;
  bool include_whitespace = false;
};

// Per order: hypothesis n-grams, reference n-grams, matches.
struct ChrfStats {
  std::vector<uint64_t> hyp;
  std::vector<uint64_t> ref;
  std::vector<uint64_t> match;

  explicit ChrfStats(std::size_t order = kChrfOrder)
      : hyp(order), ref(order), match(order) {}
  ChrfStats& operator+=(const ChrfStats& other);
};

ChrfStats SegmentChrfStats(std::string_view hypothesis,
                           std::string_view reference,
                           const ChrfOptions& options = {});

struct ChrfScore {
  double score = 0.0;  // [0, 100]
  std::size_t order = kChrfOrder;
  double beta = kChrfBeta;
  double precision = 0.0;  // averaged over effective orders
  double recall = 0.0;
  ChrfStats stats;
  std::string signature;
};

ChrfScore Chrf(const std::vector<std::string>& hypotheses,
               const std::vector<std::string>& references,
               const ChrfOptions& options = {});
ChrfScore ChrfFromStats(const ChrfStats& stats, const ChrfOptions& options);

void to_json(nlohmann::json& j, const BleuScore& score);
void to_json(nlohmann::json& j, const ChrfScore& score);

}  // namespace forge

#endif  // FORGE_METRICS_H_
