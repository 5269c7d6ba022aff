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

#ifndef FORGE_NGRAM_H_
#define FORGE_NGRAM_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace forge {

// Casefolded whitespace tokens; the token stream every word-n-gram feature
// is built from.
std::vector<std::string> CasefoldTokens(std::string_view text);

// Word n-grams joined by a single space. Empty when the text has fewer than
// `order` tokens.
std::vector<std::string> WordNgrams(const std::vector<std::string>& tokens,
                                    std::size_t order);

using NgramId = uint32_t;

// Interned word n-grams of a list of documents. Ids are assigned in
// lexicographic order of the n-gram strings, so every derived ordering is
// independent of document order.
class NgramIndex {
 public:
  NgramIndex(const std::vector<std::string>& texts, std::size_t order);

  std::size_t order() const { return order_; }
  std::size_t num_ngrams() const { return strings_.size(); }
  std::size_t num_documents() const { return distinct_.size(); }
  const std::string& ngram(NgramId id) const { return strings_[id]; }

  // Total occurrences over the corpus.
  uint64_t count(NgramId id) const { return counts_[id]; }
  // Number of documents containing the n-gram.
  uint32_t document_frequency(NgramId id) const {
    return static_cast<uint32_t>(postings_[id].size());
  }
  // Ascending document indices containing the n-gram.
  const std::vector<uint32_t>& postings(NgramId id) const {
    return postings_[id];
  }
  // Distinct n-grams of a document, ascending.
  const std::vector<NgramId>& distinct(std::size_t doc) const {
    return distinct_[doc];
  }

  // Up to k ids ranked by count descending, ties by n-gram string.
  std::vector<NgramId> TopByCount(std::size_t k) const;

 private:
  std::size_t order_;
  std::vector<std::string> strings_;
  std::vector<uint64_t> counts_;
  std::vector<std::vector<uint32_t>> postings_;
  std::vector<std::vector<NgramId>> distinct_;
};

}  // namespace forge

#endif  // FORGE_NGRAM_H_
