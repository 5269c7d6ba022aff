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

#include "forge/corpus.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "forge/error.h"
#include "forge/unicode.h"
#include "nlohmann/json.hpp"

namespace forge {
namespace {

using nlohmann::json;

// Line breaks other than the terminating LF/CRLF (lone CR, VT, FF, NEL,
// LS, PS) become a single space so the line structure of the file is the
// sentence structure of the corpus.
std::string CleanLine(std::string_view line) {
  std::string out;
  bool has_break = false;
  for (char32_t cp : unicode::Decode(line)) {
    if (unicode::IsLineBreak(cp)) {
      has_break = true;
      break;
    }
  }
  if (!has_break) return unicode::NormalizeNfc(line);
  std::u32string cps = unicode::Decode(line);
  for (char32_t& cp : cps) {
    if (unicode::IsLineBreak(cp)) cp = U' ';
  }
  return unicode::NormalizeNfc(unicode::Encode(cps));
}

std::string ContextFor(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

}  // namespace

LanguageRegistry& LanguageRegistry::Default() {
  static LanguageRegistry* registry = [] {
    auto* r = new LanguageRegistry;
    for (const char* code : {"af", "bem", "en", "fr", "ln", "nl", "run", "st",
                             "sw", "xh", "zu"}) {
      r->codes_.emplace(code);
    }
    return r;
  }();
  return *registry;
}

void LanguageRegistry::Add(std::string_view code) {
  if (code.empty() || !std::all_of(code.begin(), code.end(), [](char c) {
        return c >= 'a' && c <= 'z';
      })) {
    throw Error("language code must be nonempty lowercase ASCII: '" +
                std::string(code) + "'");
  }
  codes_.emplace(code);
}

bool LanguageRegistry::Contains(std::string_view code) const {
  return codes_.find(code) != codes_.end();
}

LanguageCode::LanguageCode(std::string_view code,
                           const LanguageRegistry& registry)
    : code_(code) {
  if (code_.empty() || !std::all_of(code_.begin(), code_.end(), [](char c) {
        return c >= 'a' && c <= 'z';
      })) {
    throw Error("language code must be nonempty lowercase ASCII: '" + code_ +
                "'");
  }
  if (!registry.Contains(code_)) {
    throw Error("unknown language code '" + code_ + "'");
  }
}

std::string_view OriginName(Origin origin) {
  switch (origin) {
    case Origin::kGold:
      return "gold";
    case Origin::kPseudo:
      return "pseudo";
    case Origin::kCodeSwitched:
      return "code_switched";
  }
  return "gold";
}

Origin ParseOrigin(std::string_view name) {
  if (name == "gold") return Origin::kGold;
  if (name == "pseudo") return Origin::kPseudo;
  if (name == "code_switched") return Origin::kCodeSwitched;
  throw Error("unknown origin '" + std::string(name) + "'");
}

void CheckSentenceText(std::string_view text) {
  if (auto bad = unicode::FindInvalidUtf8(text)) {
    throw Error("invalid UTF-8 at byte " + std::to_string(*bad));
  }
  for (char32_t cp : unicode::Decode(text)) {
    if (unicode::IsLineBreak(cp)) throw Error("sentence contains a line break");
  }
  if (!unicode::IsNfc(text)) throw Error("sentence is not NFC-normalized");
}

ParallelCorpus::ParallelCorpus(LanguageCode src_lang, LanguageCode tgt_lang,
                               std::vector<SentencePair> pairs)
    : src_lang_(std::move(src_lang)),
      tgt_lang_(std::move(tgt_lang)),
      pairs_(std::move(pairs)) {
  if (src_lang_ == tgt_lang_) {
    throw Error("source and target language are both '" + src_lang_.str() +
                "'");
  }
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const SentencePair& pair = pairs_[i];
    if (pair.source.lang != src_lang_ || pair.target.lang != tgt_lang_) {
      throw Error("pair " + std::to_string(pair.id) +
                  " does not match the corpus language pair");
    }
    if (i > 0 && pairs_[i - 1].id >= pair.id) {
      throw Error("pair ids must be strictly increasing (" +
                  std::to_string(pairs_[i - 1].id) + " then " +
                  std::to_string(pair.id) + ")");
    }
  }
}

ParallelCorpus ParallelCorpus::Select(
    const std::vector<SentenceId>& keep) const {
  std::vector<SentencePair> selected;
  selected.reserve(keep.size());
  auto it = keep.begin();
  for (const SentencePair& pair : pairs_) {
    while (it != keep.end() && *it < pair.id) ++it;
    if (it == keep.end()) break;
    if (*it == pair.id) selected.push_back(pair);
  }
  return ParallelCorpus(src_lang_, tgt_lang_, std::move(selected));
}

MonolingualCorpus::MonolingualCorpus(LanguageCode lang, Origin origin,
                                     std::vector<Sentence> sentences)
    : lang_(std::move(lang)), origin_(origin), sentences_(std::move(sentences)) {
  std::vector<SentenceId> ids;
  ids.reserve(sentences_.size());
  for (const Sentence& s : sentences_) {
    if (s.lang != lang_) {
      throw Error("sentence " + std::to_string(s.id) + " has language '" +
                  s.lang.str() + "' in a '" + lang_.str() + "' corpus");
    }
    ids.push_back(s.id);
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw Error("duplicate sentence id in corpus");
  }
}

MonolingualCorpus MakeCorpus(const std::vector<std::string>& lines,
                             const LanguageCode& lang, Origin origin) {
  std::vector<Sentence> sentences;
  sentences.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (auto bad = unicode::FindInvalidUtf8(lines[i])) {
      throw Error("line " + std::to_string(i + 1) + ": invalid UTF-8 at byte " +
                  std::to_string(*bad));
    }
    sentences.push_back({i, CleanLine(lines[i]), lang, origin});
  }
  return MonolingualCorpus(lang, origin, std::move(sentences));
}

ParallelCorpus MakeBitext(const std::vector<std::string>& src,
                          const std::vector<std::string>& tgt,
                          const LanguageCode& src_lang,
                          const LanguageCode& tgt_lang,
                          std::string_view provenance) {
  if (src.size() != tgt.size()) {
    throw Error("line count mismatch " + std::to_string(src.size()) + " vs " +
                std::to_string(tgt.size()));
  }
  MonolingualCorpus s = MakeCorpus(src, src_lang);
  MonolingualCorpus t = MakeCorpus(tgt, tgt_lang);
  std::vector<SentencePair> pairs;
  pairs.reserve(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    pairs.push_back({i, s[i], t[i], std::string(provenance)});
  }
  return ParallelCorpus(src_lang, tgt_lang, std::move(pairs));
}

std::string ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error("read failed: " + path.string());
  return std::move(buffer).str();
}

void WriteFileBytes(std::string_view bytes, const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path.string());
}

std::vector<std::string> ReadLines(const std::filesystem::path& path) {
  const std::string bytes = ReadFileBytes(path);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < bytes.size()) {
    std::size_t end = bytes.find('\n', start);
    const bool last = end == std::string::npos;
    if (last) end = bytes.size();
    std::string_view line(bytes.data() + start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (auto bad = unicode::FindInvalidUtf8(line)) {
      throw Error(ContextFor(path, lines.size() + 1) +
                  ": invalid UTF-8 at byte " + std::to_string(*bad));
    }
    lines.emplace_back(line);
    start = end + 1;
  }
  return lines;
}

MonolingualCorpus ReadCorpus(const std::filesystem::path& path,
                             const LanguageCode& lang, Origin origin) {
  return MakeCorpus(ReadLines(path), lang, origin);
}

ParallelCorpus ReadBitext(const std::filesystem::path& src_path,
                          const std::filesystem::path& tgt_path,
                          const LanguageCode& src_lang,
                          const LanguageCode& tgt_lang,
                          std::string_view provenance) {
  return MakeBitext(ReadLines(src_path), ReadLines(tgt_path), src_lang,
                    tgt_lang, provenance);
}

void WriteLines(const std::vector<std::string>& lines,
                const std::filesystem::path& path) {
  std::string bytes;
  for (const std::string& line : lines) {
    bytes += line;
    bytes += '\n';
  }
  WriteFileBytes(bytes, path);
}

void WriteCorpus(const MonolingualCorpus& corpus,
                 const std::filesystem::path& path) {
  std::string bytes;
  for (const Sentence& s : corpus.sentences()) {
    bytes += s.text;
    bytes += '\n';
  }
  WriteFileBytes(bytes, path);
}

void WriteBitext(const ParallelCorpus& corpus,
                 const std::filesystem::path& src_path,
                 const std::filesystem::path& tgt_path) {
  std::string src;
  std::string tgt;
  for (const SentencePair& pair : corpus.pairs()) {
    src += pair.source.text;
    src += '\n';
    tgt += pair.target.text;
    tgt += '\n';
  }
  WriteFileBytes(src, src_path);
  WriteFileBytes(tgt, tgt_path);
}

void WriteCorpusJsonl(const MonolingualCorpus& corpus,
                      const std::filesystem::path& path) {
  std::string bytes;
  for (const Sentence& s : corpus.sentences()) {
    json record = {{"id", s.id},
                   {"text", s.text},
                   {"lang", s.lang.str()},
                   {"origin", OriginName(s.origin)}};
    bytes += record.dump();
    bytes += '\n';
  }
  WriteFileBytes(bytes, path);
}

MonolingualCorpus ReadCorpusJsonl(const std::filesystem::path& path) {
  const std::vector<std::string> lines = ReadLines(path);
  std::vector<Sentence> sentences;
  std::optional<LanguageCode> lang;
  std::optional<Origin> corpus_origin;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      const json record = json::parse(lines[i]);
      LanguageCode code(record.at("lang").get<std::string>());
      const Origin origin = ParseOrigin(record.at("origin").get<std::string>());
      std::string text = record.at("text").get<std::string>();
      CheckSentenceText(text);
      if (!lang) lang = code;
      // A merged corpus lists gold sentences first; the corpus is tagged
      // by its last (pseudo) section.
      corpus_origin = origin;
      sentences.push_back(
          {record.at("id").get<SentenceId>(), std::move(text), code, origin});
    } catch (const json::exception& e) {
      throw Error(ContextFor(path, i + 1) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ContextFor(path, i + 1) + ": " + e.what());
    }
  }
  if (!lang) throw Error(path.string() + ": empty JSON-lines corpus");
  return MonolingualCorpus(*lang, *corpus_origin, std::move(sentences));
}

void WriteBitextJsonl(const ParallelCorpus& corpus,
                      const std::filesystem::path& path) {
  std::string bytes;
  for (const SentencePair& pair : corpus.pairs()) {
    json record = {{"id", pair.id},
                   {"src", pair.source.text},
                   {"tgt", pair.target.text},
                   {"src_lang", corpus.src_lang().str()},
                   {"tgt_lang", corpus.tgt_lang().str()},
                   {"provenance", pair.provenance}};
    bytes += record.dump();
    bytes += '\n';
  }
  WriteFileBytes(bytes, path);
}

ParallelCorpus ReadBitextJsonl(const std::filesystem::path& path) {
  const std::vector<std::string> lines = ReadLines(path);
  std::vector<SentencePair> pairs;
  std::optional<LanguageCode> src_lang;
  std::optional<LanguageCode> tgt_lang;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      const json record = json::parse(lines[i]);
      LanguageCode s(record.at("src_lang").get<std::string>());
      LanguageCode t(record.at("tgt_lang").get<std::string>());
      if (!src_lang) {
        src_lang = s;
        tgt_lang = t;
      }
      const auto id = record.at("id").get<SentenceId>();
      std::string src = record.at("src").get<std::string>();
      std::string tgt = record.at("tgt").get<std::string>();
      CheckSentenceText(src);
      CheckSentenceText(tgt);
      pairs.push_back({id,
                       {id, std::move(src), s, Origin::kGold},
                       {id, std::move(tgt), t, Origin::kGold},
                       record.value("provenance", std::string())});
    } catch (const json::exception& e) {
      throw Error(ContextFor(path, i + 1) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ContextFor(path, i + 1) + ": " + e.what());
    }
  }
  if (!src_lang) throw Error(path.string() + ": empty JSON-lines bitext");
  return ParallelCorpus(*src_lang, *tgt_lang, std::move(pairs));
}

}  // namespace forge
