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

#include "forge/ngram.h"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "forge/parallel.h"
#include "forge/unicode.h"

namespace forge {

std::vector<std::string> CasefoldTokens(std::string_view text) {
  return unicode::SplitWhitespace(unicode::CaseFold(text));
}

std::vector<std::string> WordNgrams(const std::vector<std::string>& tokens,
                                    std::size_t order) {
  std::vector<std::string> grams;
  if (order == 0 || tokens.size() < order) return grams;
  grams.reserve(tokens.size() - order + 1);
  for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
    std::string gram = tokens[i];
    for (std::size_t k = 1; k < order; ++k) {
      gram += ' ';
      gram += tokens[i + k];
    }
    grams.push_back(std::move(gram));
  }
  return grams;
}

NgramIndex::NgramIndex(const std::vector<std::string>& texts,
                       std::size_t order)
    : order_(order) {
  std::vector<std::vector<std::string>> grams(texts.size());
  ParallelFor(texts.size(), 512, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      grams[i] = WordNgrams(CasefoldTokens(texts[i]), order);
    }
  });

  // Intern, then relabel so ids follow string order.
  std::unordered_map<std::string_view, NgramId> provisional;
  std::vector<std::string_view> by_provisional;
  for (const auto& doc : grams) {
    for (const std::string& g : doc) {
      auto [it, inserted] =
          provisional.emplace(g, static_cast<NgramId>(by_provisional.size()));
      if (inserted) by_provisional.push_back(g);
    }
  }
  std::vector<NgramId> order_ids(by_provisional.size());
  std::iota(order_ids.begin(), order_ids.end(), 0);
  std::sort(order_ids.begin(), order_ids.end(), [&](NgramId a, NgramId b) {
    return by_provisional[a] < by_provisional[b];
  });
  std::vector<NgramId> relabel(order_ids.size());
  strings_.reserve(order_ids.size());
  for (std::size_t rank = 0; rank < order_ids.size(); ++rank) {
    relabel[order_ids[rank]] = static_cast<NgramId>(rank);
    strings_.emplace_back(by_provisional[order_ids[rank]]);
  }

  counts_.assign(strings_.size(), 0);
  postings_.assign(strings_.size(), {});
  distinct_.assign(texts.size(), {});
  for (std::size_t doc = 0; doc < grams.size(); ++doc) {
    std::vector<NgramId>& ids = distinct_[doc];
    ids.reserve(grams[doc].size());
    for (const std::string& g : grams[doc]) {
      const NgramId id = relabel[provisional.at(g)];
      ++counts_[id];
      ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (NgramId id : ids) postings_[id].push_back(static_cast<uint32_t>(doc));
  }
}

std::vector<NgramId> NgramIndex::TopByCount(std::size_t k) const {
  std::vector<NgramId> ids(strings_.size());
  std::iota(ids.begin(), ids.end(), 0);
  // Ids already follow string order, so the id is the tie-break.
  auto better = [&](NgramId a, NgramId b) {
    if (counts_[a] != counts_[b]) return counts_[a] > counts_[b];
    return a < b;
  };
  k = std::min(k, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k),
                    ids.end(), better);
  ids.resize(k);
  return ids;
}

}  // namespace forge
