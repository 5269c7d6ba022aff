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

#include "forge/augment.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "forge/error.h"
#include "forge/filter.h"
#include "forge/hash.h"
#include "forge/ngram.h"
#include "forge/parallel.h"
#include "forge/unicode.h"
#include "nlohmann/json.hpp"

namespace forge {
namespace {

using nlohmann::json;

bool ValidTerm(std::string_view term) {
  return !term.empty() && unicode::WhitespaceSpans(term).size() == 1 &&
         unicode::WhitespaceSpans(term)[0].begin == 0 &&
         unicode::WhitespaceSpans(term)[0].end == term.size();
}

}  // namespace

// ---------------------------------------------------------------------------
// Dictionary extraction

std::size_t BilingualDictionary::size() const {
  std::size_t n = 0;
  for (const auto& [hrl_term, translations] : entries) n += translations.size();
  return n;
}

std::string BilingualDictionary::ToTsv() const {
  std::string out;
  for (const auto& [hrl_term, translations] : entries) {
    for (const auto& [lrl_term, count] : translations) {
      out += hrl_term;
      out += '\t';
      out += lrl_term;
      out += '\t';
      out += std::to_string(count);
      out += '\n';
    }
  }
  return out;
}

BilingualDictionary BilingualDictionary::FromTsv(std::string_view tsv,
                                                 const LanguageCode& hrl,
                                                 const LanguageCode& lrl) {
  BilingualDictionary dict{hrl, lrl, {}};
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < tsv.size()) {
    std::size_t end = tsv.find('\n', start);
    if (end == std::string_view::npos) end = tsv.size();
    std::string_view line = tsv.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const std::string where = "dictionary line " + std::to_string(line_no);
    const std::size_t tab1 = line.find('\t');
    const std::size_t tab2 =
        tab1 == std::string_view::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string_view::npos) throw Error(where + ": expected 3 fields");
    const std::string h = unicode::CaseFold(line.substr(0, tab1));
    const std::string l = unicode::CaseFold(line.substr(tab1 + 1, tab2 - tab1 - 1));
    if (!ValidTerm(h) || !ValidTerm(l)) {
      throw Error(where + ": terms must be nonempty single tokens");
    }
    uint64_t count = 0;
    try {
      std::size_t used = 0;
      const std::string field(line.substr(tab2 + 1));
      count = std::stoull(field, &used);
      if (used != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw Error(where + ": bad count");
    }
    dict.entries[h][l] += count;
  }
  return dict;
}

std::map<std::pair<std::string, std::string>, uint64_t> CountLinks(
    const LexiconModel& model, const ParallelCorpus& corpus) {
  std::vector<std::vector<std::pair<std::string, std::string>>> per_pair(
      corpus.size());
  ParallelFor(corpus.size(), 256, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const auto src = CasefoldTokens(corpus[k].source.text);
      const auto tgt = CasefoldTokens(corpus[k].target.text);
      for (const Link& link : model.Align(src, tgt)) {
        per_pair[k].emplace_back(src[link.src], tgt[link.tgt]);
      }
    }
  });
  std::map<std::pair<std::string, std::string>, uint64_t> counts;
  for (auto& links : per_pair) {
    for (auto& link : links) ++counts[std::move(link)];
  }
  return counts;
}

BilingualDictionary ExtractDictionary(const LexiconModel& model,
                                      const ParallelCorpus& corpus,
                                      uint64_t min_count) {
  BilingualDictionary dict{corpus.src_lang(), corpus.tgt_lang(), {}};
  if (corpus.empty()) return dict;
  for (const auto& [terms, count] : CountLinks(model, corpus)) {
    if (count <= min_count) continue;
    const auto& [h, l] = terms;
    if (TokenizationProfile::IsNumericOrPunctuation(h) ||
        TokenizationProfile::IsNumericOrPunctuation(l)) {
      continue;
    }
    dict.entries[h][l] = count;
  }
  return dict;
}

// ---------------------------------------------------------------------------
// Code-switch augmentation

void AugmentSpec::Validate() const {
  if (!(replacement_rate >= 0.0 && replacement_rate <= 1.0)) {
    throw Error("rate must be in [0,1]");
  }
}

std::size_t ReplacementCount(std::size_t matches, double rate) {
  if (matches == 0 || rate <= 0.0) return 0;
  const double x = rate * static_cast<double>(matches);
  double k = std::ceil(x);
  if (k - x > 1.0 - 1e-9 * std::max(1.0, x)) k -= 1.0;
  return std::min(matches, static_cast<std::size_t>(k));
}

CodeSwitchResult CodeSwitchSentence(const Sentence& sentence,
                                    const BilingualDictionary& dictionary,
                                    const AugmentSpec& spec) {
  CodeSwitchResult result;
  const std::vector<unicode::Span> spans =
      unicode::WhitespaceSpans(sentence.text);
  std::vector<std::size_t> matching;
  std::vector<const std::map<std::string, uint64_t>*> options(spans.size());
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const std::string key = unicode::CaseFold(std::string_view(sentence.text).substr(
        spans[i].begin, spans[i].end - spans[i].begin));
    auto it = dictionary.entries.find(key);
    if (it != dictionary.entries.end() && !it->second.empty()) {
      matching.push_back(i);
      options[i] = &it->second;
    }
  }
  result.matches = matching.size();
  const std::size_t k = ReplacementCount(matching.size(), spec.replacement_rate);
  if (k == 0) {
    result.text = sentence.text;
    return result;
  }

  Rng rng = Rng::Derive(spec.seed, sentence.id);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.UniformIndex(matching.size() - i));
    std::swap(matching[i], matching[j]);
  }
  result.replaced.assign(matching.begin(), matching.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(result.replaced.begin(), result.replaced.end());

  std::size_t copied = 0;
  for (std::size_t pos : result.replaced) {
    const auto& translations = *options[pos];
    auto choice = translations.begin();
    std::advance(choice, static_cast<std::ptrdiff_t>(
                             rng.UniformIndex(translations.size())));
    result.text.append(sentence.text, copied, spans[pos].begin - copied);
    result.text += choice->first;
    copied = spans[pos].end;
  }
  result.text.append(sentence.text, copied, std::string::npos);
  result.text = unicode::NormalizeNfc(result.text);
  return result;
}

MonolingualCorpus CodeSwitch(const MonolingualCorpus& corpus,
                             const BilingualDictionary& dictionary,
                             const AugmentSpec& spec) {
  spec.Validate();
  if (corpus.lang() != dictionary.hrl) {
    throw Error("corpus language '" + corpus.lang().str() +
                "' does not match dictionary source language '" +
                dictionary.hrl.str() + "'");
  }
  std::vector<Sentence> out(corpus.sentences());
  ParallelFor(out.size(), 256, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      out[i].text = CodeSwitchSentence(corpus[i], dictionary, spec).text;
      out[i].origin = Origin::kCodeSwitched;
    }
  });
  return MonolingualCorpus(corpus.lang(), Origin::kCodeSwitched, std::move(out));
}

// ---------------------------------------------------------------------------
// Exponential sampling and corpus mixing

std::vector<double> ExpSampleWeights(std::span<const double> p, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error("alpha must be > 0");
  if (p.empty()) throw Error("no languages to weight");
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error("sampling probabilities must be finite and >= 0");
    }
    total += v;
  }
  if (total == 0.0) throw Error("sampling probabilities are all zero");
  std::vector<double> q(p.size());
  double z = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    q[k] = p[k] == 0.0 ? 0.0 : std::pow(p[k] / total, alpha);
    z += q[k];
  }
  for (double& v : q) v /= z;
  return q;
}

void SamplingSpec::Validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error("alpha must be > 0");
  if (epoch_size == 0) throw Error("epoch_size must be > 0");
  for (const auto& [lang, value] : p) {
    if (!(value >= 0.0)) throw Error("p for '" + lang + "' must be >= 0");
  }
}

MixturePlan PlanMixture(std::span<const MonolingualCorpus> corpora,
                        const SamplingSpec& spec) {
  spec.Validate();
  if (corpora.empty()) throw Error("mixture needs at least one corpus");
  std::map<LanguageCode, MixtureLanguage> by_lang;
  for (const MonolingualCorpus& c : corpora) {
    if (c.empty()) {
      throw Error("mixture member corpus for '" + c.lang().str() + "' is empty");
    }
    auto it = by_lang.try_emplace(c.lang(), MixtureLanguage{c.lang()}).first;
    it->second.pool_size += c.size();
    if (c.origin() != Origin::kCodeSwitched) it->second.base_size += c.size();
  }
  MixturePlan plan;
  std::vector<double> p;
  for (auto& [lang, entry] : by_lang) {
    if (entry.base_size == 0) entry.base_size = entry.pool_size;
    if (!spec.p.empty()) {
      auto it = spec.p.find(lang.str());
      if (it == spec.p.end()) {
        throw Error("no sampling probability given for '" + lang.str() + "'");
      }
      p.push_back(it->second);
    } else {
      p.push_back(static_cast<double>(entry.base_size));
    }
    plan.languages.push_back(entry);
  }
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  const std::vector<double> q = ExpSampleWeights(p, spec.alpha);
  for (std::size_t k = 0; k < plan.languages.size(); ++k) {
    plan.languages[k].p = p[k] / total;
    plan.languages[k].q = q[k];
  }
  return plan;
}

MixturePlan StreamMixture(std::span<const MonolingualCorpus> corpora,
                          const SamplingSpec& spec,
                          const std::function<void(const Sentence&)>& sink) {
  MixturePlan plan = PlanMixture(corpora, spec);
  const std::size_t langs = plan.languages.size();

  std::vector<std::vector<const Sentence*>> pools(langs);
  for (const MonolingualCorpus& c : corpora) {
    for (std::size_t k = 0; k < langs; ++k) {
      if (plan.languages[k].lang != c.lang()) continue;
      for (const Sentence& s : c.sentences()) pools[k].push_back(&s);
    }
  }

  std::vector<double> cumulative(langs);
  double running = 0.0;
  for (std::size_t k = 0; k < langs; ++k) {
    running += plan.languages[k].q;
    cumulative[k] = running;
  }

  Rng language_rng = Rng::Derive(spec.seed, 0);
  std::vector<Rng> pool_rng;
  std::vector<std::vector<std::size_t>> order(langs);
  std::vector<std::size_t> cursor(langs, 0);
  for (std::size_t k = 0; k < langs; ++k) {
    pool_rng.push_back(Rng::Derive(spec.seed, 1 + k));
    order[k].resize(pools[k].size());
    std::iota(order[k].begin(), order[k].end(), 0);
    pool_rng[k].Shuffle(std::span<std::size_t>(order[k]));
  }

  for (std::size_t draw = 0; draw < spec.epoch_size; ++draw) {
    const double u = language_rng.UniformReal() * running;
    std::size_t k = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u) -
        cumulative.begin());
    k = std::min(k, langs - 1);
    while (plan.languages[k].q == 0.0 && k > 0) --k;
    if (cursor[k] == order[k].size()) {
      pool_rng[k].Shuffle(std::span<std::size_t>(order[k]));
      cursor[k] = 0;
    }
    sink(*pools[k][order[k][cursor[k]++]]);
    ++plan.languages[k].drawn;
  }
  return plan;
}

std::vector<Sentence> BuildMixture(std::span<const MonolingualCorpus> corpora,
                                   const SamplingSpec& spec, MixturePlan* plan) {
  std::vector<Sentence> stream;
  stream.reserve(spec.epoch_size);
  MixturePlan result = StreamMixture(
      corpora, spec, [&](const Sentence& s) { stream.push_back(s); });
  if (plan != nullptr) *plan = std::move(result);
  return stream;
}

void to_json(json& j, const MixturePlan& plan) {
  j = json::array();
  for (const MixtureLanguage& l : plan.languages) {
    j.push_back({{"lang", l.lang.str()},
                 {"pool_size", l.pool_size},
                 {"base_size", l.base_size},
                 {"p", l.p},
                 {"q", l.q},
                 {"drawn", l.drawn}});
  }
}

std::string MixtureLine(const Sentence& sentence) {
  return json{{"text", sentence.text},
              {"lang", sentence.lang.str()},
              {"origin", OriginName(sentence.origin)}}
      .dump();
}

// ---------------------------------------------------------------------------
// Pseudo-monolingual data and iteration

MergeResult MergePseudo(const MonolingualCorpus& gold,
                        const MonolingualCorpus& translated) {
  if (gold.lang() != translated.lang()) {
    throw Error("language mismatch: gold is '" + gold.lang().str() +
                "', translated is '" + translated.lang().str() + "'");
  }
  if (translated.origin() != Origin::kPseudo) {
    throw Error("translated corpus must have origin 'pseudo'");
  }
  std::vector<Sentence> merged;
  merged.reserve(gold.size() + translated.size());
  for (const auto* part : {&gold, &translated}) {
    for (const Sentence& s : part->sentences()) {
      merged.push_back(s);
      merged.back().id = merged.size() - 1;
    }
  }
  const Origin origin = translated.empty() ? gold.origin() : Origin::kPseudo;
  return MergeResult{MonolingualCorpus(gold.lang(), origin, std::move(merged)),
                     gold.size(), translated.size()};
}

void to_json(json& j, const IterationPlan& plan) {
  auto refs = [](const std::vector<FileRef>& files) {
    json out = json::array();
    for (const FileRef& f : files) {
      out.push_back({{"path", f.path},
                     {"sha256", f.sha256 ? json(*f.sha256) : json(nullptr)}});
    }
    return out;
  };
  json steps = json::array();
  for (const PlanStep& step : plan.steps) {
    steps.push_back({{"name", step.name},
                     {"kind", step.external ? "external" : "internal"},
                     {"inputs", refs(step.inputs)},
                     {"outputs", refs(step.outputs)}});
  }
  j = json{{"round", plan.round}, {"steps", std::move(steps)}};
}

IterationPlan PlanIteration(std::size_t round, const json& manifest,
                            const std::filesystem::path& base_dir) {
  if (round < 1) throw Error("round must be >= 1");
  namespace fs = std::filesystem;
  auto resolve = [&](const std::string& p) {
    const fs::path path(p);
    return (path.is_absolute() || base_dir.empty() ? path : base_dir / path)
        .lexically_normal()
        .string();
  };
  auto existing = [&](const std::string& p) {
    const std::string path = resolve(p);
    if (!fs::exists(path)) throw Error("missing input file " + path);
    return FileRef{path, Sha256File(path)};
  };
  auto pending = [&](const fs::path& p) { return FileRef{p.string(), {}}; };

  std::string hrl_path;
  std::string lrl_path;
  std::string hrl_lang;
  std::string lrl_lang;
  std::string work;
  try {
    hrl_path = manifest.at("hrl").at("path").get<std::string>();
    hrl_lang = manifest.at("hrl").at("lang").get<std::string>();
    lrl_path = manifest.at("lrl").at("path").get<std::string>();
    lrl_lang = manifest.at("lrl").at("lang").get<std::string>();
    work = manifest.value("work_dir", std::string("work"));
  } catch (const json::exception& e) {
    throw Error(std::string("iteration manifest: ") + e.what());
  }
  const fs::path round_dir =
      fs::path(resolve(work)) / ("round" + std::to_string(round));

  IterationPlan plan;
  plan.round = round;
  FileRef lrl_corpus = existing(lrl_path);
  const FileRef hrl_corpus = existing(hrl_path);

  if (round > 1) {
    const std::string key = std::to_string(round);
    const json translations = manifest.value("translations", json::object());
    if (!translations.contains(key)) {
      throw Error("missing ingest file for round " + key +
                  ": no translations entry");
    }
    const json& entry = translations.at(key);
    const std::string path = resolve(entry.value("path", std::string()));
    if (path.empty() || !fs::exists(path)) {
      throw Error("missing ingest file for round " + key + ": " + path);
    }
    const std::string actual = Sha256File(path);
    if (entry.contains("sha256") && entry.at("sha256").get<std::string>() != actual) {
      throw Error("hash mismatch for ingest file " + path + ": expected " +
                  entry.at("sha256").get<std::string>() + ", got " + actual);
    }
    const FileRef ingest{path, actual};
    const FileRef ingested = pending(round_dir / ("pseudo." + lrl_lang + ".jsonl"));
    plan.steps.push_back({"ingest-translations", false, {ingest}, {ingested}});
    const FileRef merged = pending(round_dir / ("merged." + lrl_lang + ".jsonl"));
    plan.steps.push_back({"merge-pseudo", false, {lrl_corpus, ingested}, {merged}});
    lrl_corpus = merged;
  }

  std::vector<FileRef> mixture_inputs = {hrl_corpus, lrl_corpus};
  if (manifest.contains("dictionary")) {
    const FileRef dict = existing(manifest.at("dictionary").get<std::string>());
    const FileRef switched =
        pending(round_dir / (hrl_lang + ".code_switched.jsonl"));
    plan.steps.push_back({"augment", false, {hrl_corpus, dict}, {switched}});
    mixture_inputs.push_back(switched);
  }
  const FileRef mixture = pending(round_dir / "mixture.jsonl");
  plan.steps.push_back({"build-mixture", false, mixture_inputs, {mixture}});
  const FileRef pretrained = pending(round_dir / "pretrained.model");
  plan.steps.push_back({"pretrain", true, {mixture}, {pretrained}});
  const FileRef finetuned = pending(round_dir / "finetuned.model");
  plan.steps.push_back({"finetune", true, {pretrained}, {finetuned}});
  const FileRef translated =
      pending(round_dir / ("translations." + lrl_lang + ".txt"));
  plan.steps.push_back({"translate-hrl", true, {finetuned, hrl_corpus}, {translated}});
  return plan;
}

}  // namespace forge
