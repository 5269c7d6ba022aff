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

#include "forge/metrics.h"

#include <cmath>
#include <string>
#include <unordered_map>

#include "forge/error.h"
#include "forge/parallel.h"
#include "forge/unicode.h"
#include "nlohmann/json.hpp"

namespace forge {
namespace {

using unicode::IsNumber;
using unicode::IsPunctuation;
using unicode::IsPythonSpace;
using unicode::IsSymbol;

// Floor used for log(0), so that a zero precision drives the geometric
// mean to (effectively) zero instead of NaN.
constexpr double kLogZero = -9999999999.0;

double FlooredLog(double x) { return x == 0.0 ? kLogZero : std::log(x); }

std::u32string StripPythonSpace(std::u32string_view text, bool left) {
  std::size_t end = text.size();
  while (end > 0 && IsPythonSpace(text[end - 1])) --end;
  std::size_t begin = 0;
  if (left) {
    while (begin < end && IsPythonSpace(text[begin])) ++begin;
  }
  return std::u32string(text.substr(begin, end - begin));
}

std::vector<std::u32string> SplitPythonSpace(std::u32string_view text) {
  std::vector<std::u32string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsPythonSpace(text[i])) ++i;
    const std::size_t begin = i;
    while (i < text.size() && !IsPythonSpace(text[i])) ++i;
    if (i > begin) tokens.emplace_back(text.substr(begin, i - begin));
  }
  return tokens;
}

// The three substitution passes scan left to right and never revisit a
// replaced pair, like a leftmost non-overlapping regex substitution.
std::u32string IntlPasses(std::u32string_view s) {
  std::u32string a;
  a.reserve(s.size() * 2);
  for (std::size_t i = 0; i < s.size();) {
    if (i + 1 < s.size() && !IsNumber(s[i]) && IsPunctuation(s[i + 1])) {
      a += s[i];
      a += U' ';
      a += s[i + 1];
      a += U' ';
      i += 2;
    } else {
      a += s[i++];
    }
  }
  std::u32string b;
  b.reserve(a.size() * 2);
  for (std::size_t i = 0; i < a.size();) {
    if (i + 1 < a.size() && IsPunctuation(a[i]) && !IsNumber(a[i + 1])) {
      b += U' ';
      b += a[i];
      b += U' ';
      b += a[i + 1];
      i += 2;
    } else {
      b += a[i++];
    }
  }
  std::u32string c;
  c.reserve(b.size() * 2);
  for (char32_t cp : b) {
    if (IsSymbol(cp)) {
      c += U' ';
      c += cp;
      c += U' ';
    } else {
      c += cp;
    }
  }
  return c;
}

std::vector<std::string> IntlTokens(std::string_view text) {
  const std::u32string stripped =
      StripPythonSpace(unicode::Decode(text), /*left=*/false);
  std::vector<std::string> tokens;
  for (const auto& token : SplitPythonSpace(IntlPasses(stripped))) {
    tokens.push_back(unicode::Encode(token));
  }
  return tokens;
}

using NgramCounts = std::unordered_map<std::string, uint64_t>;

// All word n-grams of orders 1..4, keyed by their space-joined text.
NgramCounts CountWordNgrams(const std::vector<std::string>& tokens) {
  NgramCounts counts;
  for (std::size_t n = 1; n <= kBleuMaxOrder; ++n) {
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string key = tokens[i];
      for (std::size_t k = 1; k < n; ++k) {
        key += ' ';
        key += tokens[i + k];
      }
      ++counts[key];
    }
  }
  return counts;
}

std::size_t NgramOrder(const std::string& key) {
  std::size_t n = 1;
  for (char ch : key) n += ch == ' ';
  return n;
}

void CheckLengths(std::size_t hyps, std::size_t refs) {
  if (hyps != refs) {
    throw Error("hypothesis/reference length mismatch: " +
                std::to_string(hyps) + " vs " + std::to_string(refs));
  }
}

std::string ImplVersion() { return std::string("forge-") + FORGE_VERSION; }

}  // namespace

std::string IntlTokenize(std::string_view text) {
  std::string out;
  for (const std::string& token : IntlTokens(text)) {
    if (!out.empty()) out += ' ';
    out += token;
  }
  return out;
}

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (std::size_t n = 0; n < kBleuMaxOrder; ++n) {
    correct[n] += other.correct[n];
    total[n] += other.total[n];
  }
  hyp_len += other.hyp_len;
  ref_len += other.ref_len;
  return *this;
}

BleuStats SegmentBleuStats(std::string_view hypothesis,
                           std::string_view reference) {
  const auto hyp_tokens = IntlTokens(hypothesis);
  const auto ref_tokens = IntlTokens(reference);
  const NgramCounts ref = CountWordNgrams(ref_tokens);
  BleuStats stats;
  stats.hyp_len = hyp_tokens.size();
  stats.ref_len = ref_tokens.size();
  for (const auto& [ngram, count] : CountWordNgrams(hyp_tokens)) {
    const std::size_t n = NgramOrder(ngram) - 1;
    stats.total[n] += count;
    if (auto it = ref.find(ngram); it != ref.end()) {
      stats.correct[n] += std::min(count, it->second);
    }
  }
  return stats;
}

BleuScore BleuFromStats(const BleuStats& stats) {
  BleuScore result;
  result.stats = stats;
  result.hyp_len = stats.hyp_len;
  result.ref_len = stats.ref_len;
  result.signature = "nrefs:1|case:mixed|eff:no|tok:intl|smooth:exp|impl:" +
                     ImplVersion();
  if (stats.hyp_len < stats.ref_len) {
    result.brevity_penalty =
        stats.hyp_len > 0
            ? std::exp(1.0 - static_cast<double>(stats.ref_len) /
                                 static_cast<double>(stats.hyp_len))
            : 0.0;
  }
  bool any_match = false;
  for (uint64_t c : stats.correct) any_match = any_match || c > 0;
  if (!any_match) return result;

  double smooth = 1.0;
  for (std::size_t n = 0; n < kBleuMaxOrder; ++n) {
    if (stats.total[n] == 0) break;
    const auto total = static_cast<double>(stats.total[n]);
    if (stats.correct[n] == 0) {
      smooth *= 2.0;
      result.precisions[n] = 1.0 / (smooth * total);
    } else {
      result.precisions[n] = static_cast<double>(stats.correct[n]) / total;
    }
  }
  double log_sum = 0.0;
  for (double p : result.precisions) log_sum += FlooredLog(p);
  result.score = 100.0 * result.brevity_penalty *
                 std::exp(log_sum / static_cast<double>(kBleuMaxOrder));
  return result;
}

BleuScore Bleu(const std::vector<std::string>& hypotheses,
               const std::vector<std::string>& references) {
  CheckLengths(hypotheses.size(), references.size());
  if (hypotheses.empty()) throw Error("empty hypothesis corpus");
  std::vector<BleuStats> segments(hypotheses.size());
  ParallelFor(segments.size(), 256, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      segments[i] = SegmentBleuStats(hypotheses[i], references[i]);
    }
  });
  BleuStats total;
  for (const BleuStats& s : segments) total += s;
  return BleuFromStats(total);
}

ChrfStats& ChrfStats::operator+=(const ChrfStats& other) {
  for (std::size_t n = 0; n < hyp.size(); ++n) {
    hyp[n] += other.hyp[n];
    ref[n] += other.ref[n];
    match[n] += other.match[n];
  }
  return *this;
}

ChrfStats SegmentChrfStats(std::string_view hypothesis,
                           std::string_view reference,
                           const ChrfOptions& options) {
  auto prepare = [&](std::string_view text) {
    std::u32string chars = unicode::Decode(text);
    if (options.include_whitespace) return chars;
    std::u32string out;
    for (char32_t cp : chars) {
      if (!IsPythonSpace(cp)) out += cp;
    }
    return out;
  };
  const std::u32string hyp = prepare(hypothesis);
  const std::u32string ref = prepare(reference);
  ChrfStats stats(options.order);
  for (std::size_t n = 1; n <= options.order; ++n) {
    std::unordered_map<std::u32string_view, uint64_t> ref_counts;
    for (std::size_t i = 0; i + n <= ref.size(); ++i) {
      ++ref_counts[std::u32string_view(ref).substr(i, n)];
    }
    std::unordered_map<std::u32string_view, uint64_t> hyp_counts;
    for (std::size_t i = 0; i + n <= hyp.size(); ++i) {
      ++hyp_counts[std::u32string_view(hyp).substr(i, n)];
    }
    uint64_t hyp_total = 0;
    uint64_t matches = 0;
    for (const auto& [gram, count] : hyp_counts) {
      hyp_total += count;
      if (auto it = ref_counts.find(gram); it != ref_counts.end()) {
        matches += std::min(count, it->second);
      }
    }
    const std::size_t ref_total = ref.size() >= n ? ref.size() - n + 1 : 0;
    // Hypothesis n-grams only count against a reference that has some.
    stats.hyp[n - 1] = ref_total > 0 ? hyp_total : 0;
    stats.ref[n - 1] = ref_total;
    stats.match[n - 1] = matches;
  }
  return stats;
}

ChrfScore ChrfFromStats(const ChrfStats& stats, const ChrfOptions& options) {
  ChrfScore result;
  result.order = options.order;
  result.beta = options.beta;
  result.stats = stats;
  result.signature = "nrefs:1|case:mixed|eff:yes|nc:" +
                     std::to_string(options.order) + "|nw:0|space:" +
                     (options.include_whitespace ? "yes" : "no") +
                     "|impl:" + ImplVersion();
  const double factor = options.beta * options.beta;
  double avg_prec = 0.0;
  double avg_rec = 0.0;
  std::size_t effective = 0;
  for (std::size_t n = 0; n < options.order; ++n) {
    if (stats.hyp[n] == 0 || stats.ref[n] == 0) continue;
    avg_prec += static_cast<double>(stats.match[n]) /
                static_cast<double>(stats.hyp[n]);
    avg_rec += static_cast<double>(stats.match[n]) /
               static_cast<double>(stats.ref[n]);
    ++effective;
  }
  if (effective > 0) {
    avg_prec /= static_cast<double>(effective);
    avg_rec /= static_cast<double>(effective);
  }
  result.precision = avg_prec;
  result.recall = avg_rec;
  if (avg_prec + avg_rec > 0.0) {
    result.score = 100.0 * (1.0 + factor) * avg_prec * avg_rec /
                   (factor * avg_prec + avg_rec);
  }
  return result;
}

ChrfScore Chrf(const std::vector<std::string>& hypotheses,
               const std::vector<std::string>& references,
               const ChrfOptions& options) {
  CheckLengths(hypotheses.size(), references.size());
  if (options.order == 0) throw Error("chrF order must be >= 1");
  if (!(options.beta > 0.0)) throw Error("chrF beta must be > 0");
  std::vector<ChrfStats> segments(hypotheses.size(), ChrfStats(options.order));
  ParallelFor(segments.size(), 256, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      segments[i] = SegmentChrfStats(hypotheses[i], references[i], options);
    }
  });
  ChrfStats total(options.order);
  for (const ChrfStats& s : segments) total += s;
  return ChrfFromStats(total, options);
}

void to_json(nlohmann::json& j, const BleuScore& score) {
  j = nlohmann::json{{"score", score.score},
                     {"precisions", score.precisions},
                     {"brevity_penalty", score.brevity_penalty},
                     {"hyp_len", score.hyp_len},
                     {"ref_len", score.ref_len},
                     {"correct", score.stats.correct},
                     {"total", score.stats.total},
                     {"signature", score.signature}};
}

void to_json(nlohmann::json& j, const ChrfScore& score) {
  j = nlohmann::json{{"score", score.score},
                     {"order", score.order},
                     {"beta", score.beta},
                     {"precision", score.precision},
                     {"recall", score.recall},
                     {"signature", score.signature}};
}

}  // namespace forge
