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

#ifndef FORGE_CORPUS_H_
#define FORGE_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace forge {

// Set of language codes the toolkit accepts. The default registry holds the
// benchmark languages plus the extra pretraining languages; callers may add
// codes before constructing corpora.
class LanguageRegistry {
 public:
  static LanguageRegistry& Default();

  void Add(std::string_view code);
  bool Contains(std::string_view code) const;
  const std::set<std::string, std::less<>>& codes() const { return codes_; }

 private:
  std::set<std::string, std::less<>> codes_;
};

// Nonempty lowercase ASCII ISO-639 code registered in a LanguageRegistry.
class LanguageCode {
 public:
  // Throws Error when the code is malformed or unregistered.
  explicit LanguageCode(std::string_view code,
                        const LanguageRegistry& registry =
                            LanguageRegistry::Default());

  const std::string& str() const { return code_; }

  friend bool operator==(const LanguageCode&, const LanguageCode&) = default;
  friend auto operator<=>(const LanguageCode&, const LanguageCode&) = default;

 private:
  std::string code_;
};

enum class Origin { kGold, kPseudo, kCodeSwitched };

std::string_view OriginName(Origin origin);
// Accepts "gold", "pseudo", "code_switched".
Origin ParseOrigin(std::string_view name);

using SentenceId = uint64_t;

struct Sentence {
  SentenceId id = 0;
  std::string text;  // NFC, no line breaks
  LanguageCode lang;
  Origin origin = Origin::kGold;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

// Throws Error when `text` breaks the Sentence invariants.
void CheckSentenceText(std::string_view text);

// Paired sentences share the pair id. Sides may be empty on ingest; empty
// pairs are removed by filtering.
struct SentencePair {
  SentenceId id = 0;
  Sentence source;
  Sentence target;
  std::string provenance;

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

class ParallelCorpus {
 public:
  ParallelCorpus(LanguageCode src_lang, LanguageCode tgt_lang,
                 std::vector<SentencePair> pairs = {});

  const LanguageCode& src_lang() const { return src_lang_; }
  const LanguageCode& tgt_lang() const { return tgt_lang_; }
  const std::vector<SentencePair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const SentencePair& operator[](std::size_t i) const { return pairs_[i]; }

  // Pairs whose id is in `keep` (sorted ascending).
  ParallelCorpus Select(const std::vector<SentenceId>& keep) const;

  friend bool operator==(const ParallelCorpus&, const ParallelCorpus&) = default;

 private:
  LanguageCode src_lang_;
  LanguageCode tgt_lang_;
  std::vector<SentencePair> pairs_;
};

class MonolingualCorpus {
 public:
  MonolingualCorpus(LanguageCode lang, Origin origin,
                    std::vector<Sentence> sentences = {});

  const LanguageCode& lang() const { return lang_; }
  Origin origin() const { return origin_; }
  const std::vector<Sentence>& sentences() const { return sentences_; }
  std::size_t size() const { return sentences_.size(); }
  bool empty() const { return sentences_.empty(); }
  const Sentence& operator[](std::size_t i) const { return sentences_[i]; }

  friend bool operator==(const MonolingualCorpus&,
                         const MonolingualCorpus&) = default;

 private:
  LanguageCode lang_;
  Origin origin_;
  std::vector<Sentence> sentences_;
};

// Builds a corpus from in-memory lines: ids 0..n-1, text NFC-normalized.
MonolingualCorpus MakeCorpus(const std::vector<std::string>& lines,
                             const LanguageCode& lang,
                             Origin origin = Origin::kGold);
ParallelCorpus MakeBitext(const std::vector<std::string>& src,
                          const std::vector<std::string>& tgt,
                          const LanguageCode& src_lang,
                          const LanguageCode& tgt_lang,
                          std::string_view provenance = "");

// Plain text: one sentence per line. LF or CRLF accepted on read, LF
// written. Invalid UTF-8 is reported with its 1-based line number.
std::vector<std::string> ReadLines(const std::filesystem::path& path);
MonolingualCorpus ReadCorpus(const std::filesystem::path& path,
                             const LanguageCode& lang,
                             Origin origin = Origin::kGold);
ParallelCorpus ReadBitext(const std::filesystem::path& src_path,
                          const std::filesystem::path& tgt_path,
                          const LanguageCode& src_lang,
                          const LanguageCode& tgt_lang,
                          std::string_view provenance = "");

void WriteLines(const std::vector<std::string>& lines,
                const std::filesystem::path& path);
void WriteCorpus(const MonolingualCorpus& corpus,
                 const std::filesystem::path& path);
void WriteBitext(const ParallelCorpus& corpus,
                 const std::filesystem::path& src_path,
                 const std::filesystem::path& tgt_path);

// JSON-lines archival format. Monolingual records carry
// {id, text, lang, origin}; parallel records carry
// {id, src, tgt, src_lang, tgt_lang, provenance}.
void WriteCorpusJsonl(const MonolingualCorpus& corpus,
                      const std::filesystem::path& path);
MonolingualCorpus ReadCorpusJsonl(const std::filesystem::path& path);
void WriteBitextJsonl(const ParallelCorpus& corpus,
                      const std::filesystem::path& path);
ParallelCorpus ReadBitextJsonl(const std::filesystem::path& path);

// Reads the whole file; throws Error on failure.
std::string ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(std::string_view bytes, const std::filesystem::path& path);

}  // namespace forge

#endif  // FORGE_CORPUS_H_
