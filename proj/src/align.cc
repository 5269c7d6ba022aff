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

#include "forge/align.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "forge/error.h"
#include "forge/ngram.h"
#include "forge/parallel.h"
#include "forge/unicode.h"

namespace forge {
namespace {

uint64_t Key(uint32_t src, uint32_t tgt) {
  return (uint64_t{src} << 32) | tgt;
}

// Position prior for one target word: weights[0] is NULL, weights[1 + i]
// is source word i. Sums to 1.
void PositionPrior(std::size_t j, std::size_t src_len, std::size_t tgt_len,
                   const AlignConfig& config, std::vector<double>& weights) {
  weights.assign(src_len + 1, 0.0);
  if (src_len == 0) {
    weights[0] = 1.0;
    return;
  }
  if (config.lambda == 0.0) {
    std::fill(weights.begin(), weights.end(),
              1.0 / static_cast<double>(src_len + 1));
    return;
  }
  double z = 0.0;
  for (std::size_t i = 0; i < src_len; ++i) {
    weights[1 + i] = DiagonalWeight(i, j, src_len, tgt_len, config.lambda);
    z += weights[1 + i];
  }
  weights[0] = config.p_null;
  for (std::size_t i = 0; i < src_len; ++i) {
    weights[1 + i] *= (1.0 - config.p_null) / z;
  }
}

std::string FormatProb(double p) {
  char buffer[32];
  const int n = std::snprintf(buffer, sizeof(buffer), "%.17g", p);
  return std::string(buffer, static_cast<std::size_t>(n));
}

struct TokenizedPair {
  std::vector<uint32_t> src;  // vocabulary ids, NULL excluded
  std::vector<uint32_t> tgt;
};

}  // namespace

void AlignConfig::Validate() const {
  if (iterations < 1) throw Error("iterations must be >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error("lambda must be >= 0");
  }
  if (!(p_null > 0.0 && p_null < 1.0)) throw Error("p_null must be in (0,1)");
}

double DiagonalWeight(std::size_t i, std::size_t j, std::size_t src_len,
                      std::size_t tgt_len, double lambda) {
  const double d = static_cast<double>(i + 1) / static_cast<double>(src_len) -
                   static_cast<double>(j + 1) / static_cast<double>(tgt_len);
  return std::exp(-lambda * std::fabs(d));
}

std::string FormatAlignment(const Alignment& alignment) {
  std::string out;
  for (const Link& link : alignment) {
    if (!out.empty()) out += ' ';
    out += std::to_string(link.src);
    out += '-';
    out += std::to_string(link.tgt);
  }
  return out;
}

Alignment ParseAlignment(std::string_view line) {
  Alignment alignment;
  std::set<uint32_t> targets;
  for (const std::string& item : unicode::SplitWhitespace(line)) {
    const std::size_t dash = item.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 == item.size()) {
      throw Error("malformed alignment link '" + item + "'");
    }
    Link link{};
    const char* begin = item.data();
    const char* mid = begin + dash;
    const char* end = begin + item.size();
    auto r1 = std::from_chars(begin, mid, link.src);
    auto r2 = std::from_chars(mid + 1, end, link.tgt);
    if (r1.ec != std::errc() || r1.ptr != mid || r2.ec != std::errc() ||
        r2.ptr != end) {
      throw Error("malformed alignment link '" + item + "'");
    }
    if (!targets.insert(link.tgt).second) {
      throw Error("target index " + std::to_string(link.tgt) +
                  " is linked more than once");
    }
    alignment.push_back(link);
  }
  std::sort(alignment.begin(), alignment.end(),
            [](const Link& a, const Link& b) { return a.tgt < b.tgt; });
  return alignment;
}

LexiconModel LexiconModel::Train(const ParallelCorpus& corpus,
                                 const AlignConfig& config) {
  config.Validate();
  if (corpus.empty()) throw Error("cannot train an aligner on an empty corpus");

  const std::size_t n = corpus.size();
  std::vector<std::vector<std::string>> src_tokens(n);
  std::vector<std::vector<std::string>> tgt_tokens(n);
  ParallelFor(n, 512, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      src_tokens[i] = CasefoldTokens(corpus[i].source.text);
      tgt_tokens[i] = CasefoldTokens(corpus[i].target.text);
    }
  });

  LexiconModel model;
  model.config_ = config;
  {
    std::set<std::string> src_words;
    std::set<std::string> tgt_words;
    for (std::size_t i = 0; i < n; ++i) {
      src_words.insert(src_tokens[i].begin(), src_tokens[i].end());
      tgt_words.insert(tgt_tokens[i].begin(), tgt_tokens[i].end());
    }
    model.src_vocab_.emplace_back(kNullWord);
    model.src_vocab_.insert(model.src_vocab_.end(), src_words.begin(),
                            src_words.end());
    model.tgt_vocab_.assign(tgt_words.begin(), tgt_words.end());
    for (uint32_t k = 1; k < model.src_vocab_.size(); ++k) {
      model.src_index_.emplace(model.src_vocab_[k], k);
    }
    for (uint32_t k = 0; k < model.tgt_vocab_.size(); ++k) {
      model.tgt_index_.emplace(model.tgt_vocab_[k], k);
    }
  }

  std::vector<TokenizedPair> pairs(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& w : src_tokens[i]) {
      pairs[i].src.push_back(model.src_index_.at(w));
    }
    for (const auto& w : tgt_tokens[i]) {
      pairs[i].tgt.push_back(model.tgt_index_.at(w));
    }
  }

  // Parameter slots: every co-occurring (source, target) pair plus NULL.
  std::vector<uint64_t> keys;
  for (const TokenizedPair& p : pairs) {
    for (uint32_t t : p.tgt) {
      keys.push_back(Key(0, t));
      for (uint32_t s : p.src) keys.push_back(Key(s, t));
    }
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  std::unordered_map<uint64_t, uint32_t> slot_of;
  slot_of.reserve(keys.size());
  for (uint32_t k = 0; k < keys.size(); ++k) slot_of.emplace(keys[k], k);

  const double initial =
      model.tgt_vocab_.empty() ? 0.0 : 1.0 / static_cast<double>(model.tgt_vocab_.size());
  std::vector<double> t(keys.size(), initial);
  std::vector<double> counts(keys.size());

  // Pairs are processed in fixed-size chunks: posteriors in parallel into a
  // scratch buffer, then accumulated sequentially in corpus order so the
  // floating-point sums never depend on the thread count.
  constexpr std::size_t kChunk = 2048;
  std::vector<std::size_t> offset(kChunk + 1);
  std::vector<uint32_t> cell_slot;
  std::vector<double> cell_post;
  std::vector<double> pair_ll(kChunk);

  auto pass = [&](bool accumulate) {
    double ll = 0.0;
    if (accumulate) std::fill(counts.begin(), counts.end(), 0.0);
    for (std::size_t chunk = 0; chunk < n; chunk += kChunk) {
      const std::size_t m = std::min(kChunk, n - chunk);
      offset[0] = 0;
      for (std::size_t k = 0; k < m; ++k) {
        const TokenizedPair& p = pairs[chunk + k];
        offset[k + 1] = offset[k] + (p.src.size() + 1) * p.tgt.size();
      }
      cell_slot.resize(offset[m]);
      cell_post.resize(offset[m]);
      ParallelFor(m, 64, [&](std::size_t begin, std::size_t end) {
        std::vector<double> prior;
        for (std::size_t k = begin; k < end; ++k) {
          const TokenizedPair& p = pairs[chunk + k];
          const std::size_t le = p.src.size();
          const std::size_t lf = p.tgt.size();
          double sentence_ll = 0.0;
          for (std::size_t j = 0; j < lf; ++j) {
            PositionPrior(j, le, lf, config, prior);
            const std::size_t base = offset[k] + j * (le + 1);
            double z = 0.0;
            for (std::size_t i = 0; i <= le; ++i) {
              const uint32_t s = i == 0 ? 0 : p.src[i - 1];
              const uint32_t slot = slot_of.at(Key(s, p.tgt[j]));
              const double w = prior[i] * t[slot];
              cell_slot[base + i] = slot;
              cell_post[base + i] = w;
              z += w;
            }
            sentence_ll += std::log(z);
            for (std::size_t i = 0; i <= le; ++i) cell_post[base + i] /= z;
          }
          pair_ll[k] = sentence_ll;
        }
      });
      for (std::size_t k = 0; k < m; ++k) ll += pair_ll[k];
      if (accumulate) {
        for (std::size_t c = 0; c < offset[m]; ++c) {
          counts[cell_slot[c]] += cell_post[c];
        }
      }
    }
    return ll;
  };

  auto m_step = [&] {
    // Slots are sorted by source id, so each row is a contiguous run.
    std::size_t row_begin = 0;
    while (row_begin < keys.size()) {
      const uint64_t src = keys[row_begin] >> 32;
      std::size_t row_end = row_begin;
      double total = 0.0;
      while (row_end < keys.size() && (keys[row_end] >> 32) == src) {
        total += counts[row_end];
        ++row_end;
      }
      if (total > 0.0) {
        for (std::size_t k = row_begin; k < row_end; ++k) {
          t[k] = counts[k] / total;
        }
      }
      row_begin = row_end;
    }
  };

  for (std::size_t iter = 0; iter < config.iterations; ++iter) {
    model.log_likelihood_.push_back(pass(/*accumulate=*/true));
    m_step();
  }
  model.log_likelihood_.push_back(pass(/*accumulate=*/false));

  // Prune, then renormalize each row over what is left.
  std::vector<double> row_total(model.src_vocab_.size(), 0.0);
  for (std::size_t k = 0; k < keys.size(); ++k) {
    if (t[k] >= kPruneBelow) row_total[keys[k] >> 32] += t[k];
  }
  model.table_.reserve(keys.size());
  for (std::size_t k = 0; k < keys.size(); ++k) {
    if (t[k] < kPruneBelow) continue;
    model.table_.emplace(keys[k], t[k] / row_total[keys[k] >> 32]);
  }
  return model;
}

uint32_t LexiconModel::SourceId(std::string_view word) const {
  if (word == kNullWord) return 0;
  auto it = src_index_.find(std::string(word));
  return it == src_index_.end() ? kMissing : it->second;
}

uint32_t LexiconModel::TargetId(std::string_view word) const {
  auto it = tgt_index_.find(std::string(word));
  return it == tgt_index_.end() ? kMissing : it->second;
}

double LexiconModel::Lookup(uint32_t src, uint32_t tgt) const {
  if (src == kMissing || tgt == kMissing) return 0.0;
  auto it = table_.find(Key(src, tgt));
  return it == table_.end() ? 0.0 : it->second;
}

double LexiconModel::Prob(std::string_view src, std::string_view tgt) const {
  return Lookup(SourceId(src), TargetId(tgt));
}

double LexiconModel::MaxRowDeviation() const {
  std::map<uint32_t, double> sums;
  for (uint32_t s = 0; s < src_vocab_.size(); ++s) sums[s] = 0.0;
  for (const auto& [key, p] : table_) sums[static_cast<uint32_t>(key >> 32)] += p;
  double worst = 0.0;
  for (const auto& [s, total] : sums) {
    // Source words whose every entry was pruned have no row at all.
    if (total == 0.0) continue;
    worst = std::max(worst, std::fabs(total - 1.0));
  }
  return worst;
}

Alignment LexiconModel::Align(const std::vector<std::string>& src_tokens,
                              const std::vector<std::string>& tgt_tokens) const {
  Alignment alignment;
  const std::size_t le = src_tokens.size();
  const std::size_t lf = tgt_tokens.size();
  std::vector<uint32_t> src_ids(le);
  for (std::size_t i = 0; i < le; ++i) {
    src_ids[i] = src_tokens[i] == kNullWord ? kMissing : SourceId(src_tokens[i]);
  }
  std::vector<double> prior;
  for (std::size_t j = 0; j < lf; ++j) {
    const uint32_t tgt = TargetId(tgt_tokens[j]);
    if (tgt == kMissing) continue;
    PositionPrior(j, le, lf, config_, prior);
    double best = 0.0;
    std::size_t best_i = le;
    for (std::size_t i = 0; i < le; ++i) {
      const double score = prior[1 + i] * Lookup(src_ids[i], tgt);
      if (score > best) {
        best = score;
        best_i = i;
      }
    }
    const double null_score = prior[0] * Lookup(0, tgt);
    if (best_i < le && best >= null_score) {
      alignment.push_back(
          {static_cast<uint32_t>(best_i), static_cast<uint32_t>(j)});
    }
  }
  return alignment;
}

Alignment LexiconModel::Align(const SentencePair& pair) const {
  return Align(CasefoldTokens(pair.source.text),
               CasefoldTokens(pair.target.text));
}

std::vector<Alignment> LexiconModel::AlignAll(const ParallelCorpus& corpus) const {
  std::vector<Alignment> out(corpus.size());
  ParallelFor(corpus.size(), 256, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = Align(corpus[i]);
  });
  return out;
}

std::string LexiconModel::ToTsv() const {
  std::vector<std::tuple<std::string_view, std::string_view, double>> rows;
  rows.reserve(table_.size());
  for (const auto& [key, p] : table_) {
    rows.emplace_back(src_vocab_[key >> 32], tgt_vocab_[key & 0xFFFFFFFFu], p);
  }
  std::sort(rows.begin(), rows.end());
  std::string out = "# forge-lexicon lambda=" + FormatProb(config_.lambda) +
                    " p_null=" + FormatProb(config_.p_null) +
                    " iterations=" + std::to_string(config_.iterations) + "\n";
  for (const auto& [src, tgt, p] : rows) {
    out += src;
    out += '\t';
    out += tgt;
    out += '\t';
    out += FormatProb(p);
    out += '\n';
  }
  return out;
}

LexiconModel LexiconModel::FromTsv(std::string_view tsv) {
  LexiconModel model;
  model.src_vocab_.emplace_back(kNullWord);
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < tsv.size()) {
    std::size_t end = tsv.find('\n', start);
    if (end == std::string_view::npos) end = tsv.size();
    std::string_view line = tsv.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "lexicon line " + std::to_string(line_no);
    if (line.front() == '#') {
      for (const std::string& field : unicode::SplitWhitespace(line.substr(1))) {
        const std::size_t eq = field.find('=');
        if (eq == std::string::npos) continue;
        const std::string name = field.substr(0, eq);
        const std::string value = field.substr(eq + 1);
        try {
          if (name == "lambda") model.config_.lambda = std::stod(value);
          if (name == "p_null") model.config_.p_null = std::stod(value);
          if (name == "iterations") model.config_.iterations = std::stoul(value);
        } catch (const std::exception&) {
          throw Error(where + ": bad header field '" + field + "'");
        }
      }
      continue;
    }
    const std::size_t tab1 = line.find('\t');
    const std::size_t tab2 =
        tab1 == std::string_view::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string_view::npos) throw Error(where + ": expected 3 fields");
    std::string src(line.substr(0, tab1));
    std::string tgt(line.substr(tab1 + 1, tab2 - tab1 - 1));
    double p = 0.0;
    try {
      p = std::stod(std::string(line.substr(tab2 + 1)));
    } catch (const std::exception&) {
      throw Error(where + ": bad probability");
    }
    uint32_t s = 0;
    if (src != kNullWord) {
      auto [it, inserted] = model.src_index_.try_emplace(
          src, static_cast<uint32_t>(model.src_vocab_.size()));
      if (inserted) model.src_vocab_.push_back(src);
      s = it->second;
    }
    auto [it, inserted] = model.tgt_index_.try_emplace(
        tgt, static_cast<uint32_t>(model.tgt_vocab_.size()));
    if (inserted) model.tgt_vocab_.push_back(tgt);
    model.table_[Key(s, it->second)] = p;
  }
  model.config_.Validate();
  return model;
}

}  // namespace forge
