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

#ifndef FORGE_AUGMENT_H_
#define FORGE_AUGMENT_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forge/align.h"
#include "forge/corpus.h"
#include "forge/rng.h"
#include "nlohmann/json_fwd.hpp"

namespace forge {

// ---------------------------------------------------------------------------
// Dictionary extraction

inline constexpr uint64_t kDefaultMinCount = 20;

// High-resource term -> {low-resource term -> alignment count}. Terms are
// casefolded tokens.
struct BilingualDictionary {
  LanguageCode hrl;
  LanguageCode lrl;
  std::map<std::string, std::map<std::string, uint64_t>> entries;

  // Number of (hrl, lrl) term pairs.
  std::size_t size() const;

  // "hrl<TAB>lrl<TAB>count" per line, sorted by (hrl, lrl).
  std::string ToTsv() const;
  static BilingualDictionary FromTsv(std::string_view tsv,
                                     const LanguageCode& hrl,
                                     const LanguageCode& lrl);
};

// Counts of Viterbi link types (source word, target word) over the corpus.
std::map<std::pair<std::string, std::string>, uint64_t> CountLinks(
    const LexiconModel& model, const ParallelCorpus& corpus);

// Keeps link types seen strictly more than `min_count` times, dropping any
// whose either term is numeric/punctuation only.
BilingualDictionary ExtractDictionary(const LexiconModel& model,
                                      const ParallelCorpus& corpus,
                                      uint64_t min_count = kDefaultMinCount);

// ---------------------------------------------------------------------------
// Code-switch augmentation

struct AugmentSpec {
  double replacement_rate = 0.30;
  Seed seed;

  void Validate() const;
};

// ceil(rate * matches), computed so that exact products like 0.3 * 10 are
// not pushed up by rounding error.
std::size_t ReplacementCount(std::size_t matches, double rate);

struct CodeSwitchResult {
  std::string text;
  std::size_t matches = 0;
  std::vector<std::size_t> replaced;  // token positions, ascending
};

// Replaces ReplacementCount(matches) dictionary-matching tokens, chosen
// uniformly from the stream keyed by (seed, sentence id). Text outside the
// replaced tokens is left byte-for-byte intact.
CodeSwitchResult CodeSwitchSentence(const Sentence& sentence,
                                    const BilingualDictionary& dictionary,
                                    const AugmentSpec& spec);

MonolingualCorpus CodeSwitch(const MonolingualCorpus& corpus,
                             const BilingualDictionary& dictionary,
                             const AugmentSpec& spec);

// ---------------------------------------------------------------------------
// Exponential sampling and corpus mixing

inline constexpr double kDefaultAlpha = 0.25;

// q_k = p_k^alpha / sum_j p_j^alpha after normalizing p to sum to 1.
std::vector<double> ExpSampleWeights(std::span<const double> p, double alpha);

struct SamplingSpec {
  // Optional explicit p per language; derived from corpus sizes otherwise.
  std::map<std::string, double> p;
  double alpha = kDefaultAlpha;
  std::size_t epoch_size = 0;
  Seed seed;

  void Validate() const;
};

struct MixtureLanguage {
  LanguageCode lang;
  std::size_t pool_size = 0;   // all sentences, augmented included
  std::size_t base_size = 0;   // sentences p is proportional to
  double p = 0.0;
  double q = 0.0;
  std::size_t drawn = 0;
};

struct MixturePlan {
  std::vector<MixtureLanguage> languages;  // sorted by code
};

// Languages are pooled across corpora. p_k follows the size of the
// non-code-switched corpora of a language; code-switched data joins the
// pool without moving p_k.
MixturePlan PlanMixture(std::span<const MonolingualCorpus> corpora,
                        const SamplingSpec& spec);

// Emits epoch_size sentences. Language per draw from q; within a language,
// round-robin over a seeded shuffle, reshuffled whenever it runs out.
MixturePlan StreamMixture(std::span<const MonolingualCorpus> corpora,
                          const SamplingSpec& spec,
                          const std::function<void(const Sentence&)>& sink);
std::vector<Sentence> BuildMixture(std::span<const MonolingualCorpus> corpora,
                                   const SamplingSpec& spec,
                                   MixturePlan* plan = nullptr);

void to_json(nlohmann::json& j, const MixturePlan& plan);

// {text, lang, origin} per line.
std::string MixtureLine(const Sentence& sentence);

// ---------------------------------------------------------------------------
// Pseudo-monolingual data and iteration

struct MergeResult {
  MonolingualCorpus merged;
  std::size_t gold = 0;
  std::size_t pseudo = 0;
};

// Gold sentences, then translated ones, renumbered 0..n-1 with each
// sentence keeping its origin tag.
MergeResult MergePseudo(const MonolingualCorpus& gold,
                        const MonolingualCorpus& translated);

struct FileRef {
  std::string path;
  std::optional<std::string> sha256;
};

struct PlanStep {
  std::string name;
  bool external = false;
  std::vector<FileRef> inputs;
  std::vector<FileRef> outputs;
};

struct IterationPlan {
  std::size_t round = 1;
  std::vector<PlanStep> steps;
};

void to_json(nlohmann::json& j, const IterationPlan& plan);

// Manifest keys: hrl {path, lang}, lrl {path, lang}, optional dictionary,
// work_dir, translations {"<round>": {path, sha256}}. Relative paths are
// resolved against `base_dir`.
IterationPlan PlanIteration(std::size_t round, const nlohmann::json& manifest,
                            const std::filesystem::path& base_dir = {});

}  // namespace forge

#endif  // FORGE_AUGMENT_H_
