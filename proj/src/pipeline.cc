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

#include "forge/pipeline.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include "forge/corpus.h"
#include "forge/error.h"
#include "forge/hash.h"
#include "forge/ngram.h"
#include "forge/nounclass.h"
#include "forge/unicode.h"

namespace forge {
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string VersionString() { return std::string("forge ") + FORGE_VERSION; }

std::ptrdiff_t StageIndex(std::string_view name) {
  auto it = std::find(kStageOrder.begin(), kStageOrder.end(), name);
  return it == kStageOrder.end() ? -1 : it - kStageOrder.begin();
}

// Collects every problem instead of stopping at the first one.
class ConfigReader {
 public:
  ConfigReader(fs::path base_dir, std::vector<std::string>& errors)
      : base_dir_(std::move(base_dir)), errors_(errors) {}

  void Fail(const std::string& message) { errors_.push_back(message); }

  // Returns the object at `key` (or an empty one) after flagging unknown
  // members.
  const json& Section(const json& parent, const std::string& key,
                      std::initializer_list<std::string_view> allowed) {
    static const json kEmpty = json::object();
    auto it = parent.find(key);
    if (it == parent.end() || it->is_null()) return kEmpty;
    if (!it->is_object()) {
      Fail(key + ": expected an object");
      return kEmpty;
    }
    CheckKeys(*it, key + ".", allowed);
    return *it;
  }

  void CheckKeys(const json& object, const std::string& prefix,
                 std::initializer_list<std::string_view> allowed) {
    for (const auto& [name, value] : object.items()) {
      if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
        Fail("unknown key '" + prefix + name + "'");
      }
    }
  }

  template <typename T>
  void Unsigned(const json& obj, const std::string& key,
                const std::string& path, T& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_number_unsigned()) {
      Fail(path + ": expected a non-negative integer");
      return;
    }
    out = it->get<T>();
  }

  void Number(const json& obj, const std::string& key, const std::string& path,
              double& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_number()) {
      Fail(path + ": expected a number");
      return;
    }
    out = it->get<double>();
  }

  void Bool(const json& obj, const std::string& key, const std::string& path,
            bool& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_boolean()) {
      Fail(path + ": expected true or false");
      return;
    }
    out = it->get<bool>();
  }

  std::optional<std::string> String(const json& obj, const std::string& key,
                                    const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) {
      Fail(path + ": expected a string");
      return std::nullopt;
    }
    return it->get<std::string>();
  }

  // Resolved path; flags a missing file when `must_exist`.
  std::optional<fs::path> Path(const json& obj, const std::string& key,
                               const std::string& path, bool must_exist) {
    auto value = String(obj, key, path);
    if (!value) return std::nullopt;
    fs::path p = Resolve(*value);
    if (must_exist && !fs::is_regular_file(p)) {
      Fail("missing file " + path + ": " + p.string());
    }
    return p;
  }

  fs::path Resolve(const std::string& value) const {
    fs::path p(value);
    if (p.is_relative() && !base_dir_.empty()) p = base_dir_ / p;
    return p.lexically_normal();
  }

  void Language(const std::string& code, const std::string& path) {
    try {
      LanguageCode{code};
    } catch (const Error& e) {
      Fail(path + ": " + e.what());
    }
  }

  // Validates one field in isolation so that every bad field is reported
  // with the module's own message.
  template <typename Spec, typename Apply>
  void Check(const std::string& path, Apply apply) {
    Spec spec;
    apply(spec);
    try {
      spec.Validate();
    } catch (const Error& e) {
      Fail(path + ": " + e.what());
    }
  }

 private:
  fs::path base_dir_;
  std::vector<std::string>& errors_;
};

std::optional<CorpusRef> ReadCorpusRef(ConfigReader& r, const json& obj,
                                       const std::string& path,
                                       bool must_exist) {
  if (!obj.is_object()) {
    r.Fail(path + ": expected an object with path and lang");
    return std::nullopt;
  }
  r.CheckKeys(obj, path + ".", {"path", "lang", "origin"});
  CorpusRef ref;
  auto p = r.Path(obj, "path", path + ".path", must_exist);
  auto lang = r.String(obj, "lang", path + ".lang");
  if (!p) r.Fail(path + ".path: required");
  if (!lang) r.Fail(path + ".lang: required");
  if (!p || !lang) return std::nullopt;
  r.Language(*lang, path + ".lang");
  ref.path = *p;
  ref.lang = *lang;
  if (auto origin = r.String(obj, "origin", path + ".origin")) {
    try {
      ref.origin = ParseOrigin(*origin);
    } catch (const Error& e) {
      r.Fail(path + ".origin: " + e.what());
    }
  }
  return ref;
}

json CorpusRefJson(const CorpusRef& ref) {
  return {{"path", ref.path.string()},
          {"lang", ref.lang},
          {"origin", OriginName(ref.origin)}};
}

template <typename T>
json OptionalPath(const std::optional<T>& p) {
  return p ? json(p->string()) : json(nullptr);
}

}  // namespace

bool PipelineManifest::Runs(std::string_view stage) const {
  return std::find(stages.begin(), stages.end(), stage) != stages.end();
}

ValidationResult ValidateConfig(const json& config, const fs::path& base_dir) {
  ValidationResult result;
  std::vector<std::string>& errors = result.errors;
  ConfigReader r(base_dir, errors);
  if (!config.is_object()) {
    errors.push_back("manifest must be a JSON object");
    return result;
  }
  r.CheckKeys(config, "",
              {"stages", "seed", "output_dir", "inputs", "input_hashes",
               "filter", "dedup", "split", "align", "extract-dict", "augment",
               "sample", "evaluate", "analyze"});
  PipelineManifest m;

  // Stages.
  auto stages = config.find("stages");
  if (stages == config.end() || !stages->is_array() || stages->empty()) {
    errors.push_back("stages: expected a nonempty list of stage names");
  } else {
    std::ptrdiff_t previous = -1;
    bool order_ok = true;
    for (const json& s : *stages) {
      if (!s.is_string()) {
        errors.push_back("stages: expected stage names");
        order_ok = false;
        continue;
      }
      const std::string name = s.get<std::string>();
      const std::ptrdiff_t index = StageIndex(name);
      if (index < 0) {
        errors.push_back("stages: unknown stage '" + name + "'");
        order_ok = false;
        continue;
      }
      if (previous >= 0 && index <= previous) {
        errors.push_back("stage order: '" + name + "' cannot run after '" +
                         std::string(kStageOrder[previous]) + "'");
        order_ok = false;
      } else if (previous >= 0 && index != previous + 1) {
        errors.push_back("stage order: stages must be contiguous, '" +
                         std::string(kStageOrder[previous + 1]) +
                         "' is missing before '" + name + "'");
        order_ok = false;
      }
      previous = std::max(previous, index);
      m.stages.push_back(name);
    }
    if (!order_ok) m.stages.clear();
  }

  r.Unsigned(config, "seed", "seed", m.seed.value);
  m.output_dir = r.Resolve(r.String(config, "output_dir", "output_dir")
                               .value_or("forge-out"));

  // Section readers run unconditionally so unknown keys are always caught.
  const json& inputs =
      r.Section(config, "inputs", {"src", "tgt", "src_lang", "tgt_lang"});
  const json& filter = r.Section(config, "filter", {"side"});
  const json& dedup = r.Section(
      config, "dedup",
      {"threshold", "window", "top_ngrams", "ngram_order", "bucket_cap"});
  const json& split = r.Section(
      config, "split",
      {"valid_size", "test_size", "assignment", "metric", "audit",
       "audit_threshold", "audit_exhaustive"});
  const json& align =
      r.Section(config, "align", {"iterations", "lambda", "p_null", "lexicon"});
  const json& extract = r.Section(config, "extract-dict", {"min_count"});
  const json& augment =
      r.Section(config, "augment", {"rate", "input", "dictionary"});
  const json& sample =
      r.Section(config, "sample", {"alpha", "epoch_size", "p", "corpora"});
  const json& evaluate =
      r.Section(config, "evaluate", {"hyp", "ref", "metrics"});
  const json& analyze = r.Section(
      config, "analyze",
      {"hyp", "tags", "ref", "alignments", "prefix_len", "tag"});

  auto runs = [&](std::string_view s) { return m.Runs(s); };

  // Inputs and hashes.
  m.src_lang = r.String(inputs, "src_lang", "inputs.src_lang").value_or("");
  m.tgt_lang = r.String(inputs, "tgt_lang", "inputs.tgt_lang").value_or("");
  auto src = r.Path(inputs, "src", "inputs.src", true);
  auto tgt = r.Path(inputs, "tgt", "inputs.tgt", true);
  if (src) m.src = *src;
  if (tgt) m.tgt = *tgt;
  if (auto it = config.find("input_hashes"); it != config.end()) {
    if (!it->is_object()) {
      errors.push_back("input_hashes: expected an object of path -> sha256");
    } else {
      for (const auto& [path, digest] : it->items()) {
        if (!digest.is_string() || digest.get<std::string>().size() != 64) {
          errors.push_back("input_hashes." + path +
                           ": expected a 64-digit hex sha256");
          continue;
        }
        m.input_hashes[r.Resolve(path).string()] = digest.get<std::string>();
      }
    }
  }

  // Filter.
  if (auto side = r.String(filter, "side", "filter.side")) {
    try {
      m.filter.side = ParseSide(*side);
    } catch (const Error& e) {
      errors.push_back(std::string("filter.side: ") + e.what());
    }
  }

  // Dedup.
  r.Number(dedup, "threshold", "dedup.threshold", m.dedup.threshold);
  r.Unsigned(dedup, "window", "dedup.window", m.dedup.window);
  r.Unsigned(dedup, "top_ngrams", "dedup.top_ngrams", m.dedup.top_ngrams);
  r.Unsigned(dedup, "ngram_order", "dedup.ngram_order", m.dedup.ngram_order);
  r.Unsigned(dedup, "bucket_cap", "dedup.bucket_cap", m.dedup.bucket_cap);
  r.Check<DedupPlan>("dedup.threshold",
                     [&](DedupPlan& p) { p.threshold = m.dedup.threshold; });
  r.Check<DedupPlan>("dedup.window",
                     [&](DedupPlan& p) { p.window = m.dedup.window; });
  r.Check<DedupPlan>("dedup.top_ngrams",
                     [&](DedupPlan& p) { p.top_ngrams = m.dedup.top_ngrams; });
  r.Check<DedupPlan>("dedup.ngram_order", [&](DedupPlan& p) {
    p.ngram_order = m.dedup.ngram_order;
  });
  r.Check<DedupPlan>("dedup.bucket_cap",
                     [&](DedupPlan& p) { p.bucket_cap = m.dedup.bucket_cap; });

  // Split and leakage audit.
  r.Unsigned(split, "valid_size", "split.valid_size", m.split.valid_size);
  r.Unsigned(split, "test_size", "split.test_size", m.split.test_size);
  if (auto a = r.String(split, "assignment", "split.assignment")) {
    try {
      m.split.assignment = ParseAssignment(*a);
    } catch (const Error& e) {
      errors.push_back(std::string("split.assignment: ") + e.what());
    }
  }
  if (auto metric = r.String(split, "metric", "split.metric")) {
    try {
      m.split.metric = ParseOverlapMetric(*metric);
    } catch (const Error& e) {
      errors.push_back(std::string("split.metric: ") + e.what());
    }
  }
  m.split.seed = m.seed;
  r.Bool(split, "audit", "split.audit", m.audit);
  r.Bool(split, "audit_exhaustive", "split.audit_exhaustive",
         m.audit_options.exhaustive);
  r.Number(split, "audit_threshold", "split.audit_threshold",
           m.audit_options.threshold);
  r.Check<DedupPlan>("split.audit_threshold", [&](DedupPlan& p) {
    p.threshold = m.audit_options.threshold;
  });
  m.audit_options.window = m.dedup.window;
  m.audit_options.ngram_order = m.dedup.ngram_order;
  m.audit_options.bucket_cap = m.dedup.bucket_cap;

  // Align.
  r.Unsigned(align, "iterations", "align.iterations", m.align.iterations);
  r.Number(align, "lambda", "align.lambda", m.align.lambda);
  r.Number(align, "p_null", "align.p_null", m.align.p_null);
  r.Check<AlignConfig>("align.iterations", [&](AlignConfig& c) {
    c.iterations = m.align.iterations;
  });
  r.Check<AlignConfig>("align.lambda",
                       [&](AlignConfig& c) { c.lambda = m.align.lambda; });
  r.Check<AlignConfig>("align.p_null",
                       [&](AlignConfig& c) { c.p_null = m.align.p_null; });
  m.lexicon = r.Path(align, "lexicon", "align.lexicon",
                     !runs("align") &&
                         (runs("extract-dict") || runs("analyze")));

  // Dictionary.
  r.Unsigned(extract, "min_count", "extract-dict.min_count", m.min_count);

  // Augment.
  r.Number(augment, "rate", "augment.rate", m.augment.replacement_rate);
  m.augment.seed = m.seed;
  r.Check<AugmentSpec>("augment.rate", [&](AugmentSpec& s) {
    s.replacement_rate = m.augment.replacement_rate;
  });
  if (auto it = augment.find("input"); it != augment.end()) {
    m.augment_input =
        ReadCorpusRef(r, *it, "augment.input", runs("augment"));
  }
  m.dictionary = r.Path(augment, "dictionary", "augment.dictionary",
                        !runs("extract-dict") && runs("augment"));

  // Sample.
  m.sample.epoch_size = 10000;
  m.sample.seed = m.seed;
  r.Number(sample, "alpha", "sample.alpha", m.sample.alpha);
  r.Unsigned(sample, "epoch_size", "sample.epoch_size", m.sample.epoch_size);
  if (auto it = sample.find("p"); it != sample.end()) {
    if (!it->is_object()) {
      errors.push_back("sample.p: expected an object of lang -> probability");
    } else {
      for (const auto& [lang, value] : it->items()) {
        if (!value.is_number()) {
          errors.push_back("sample.p." + lang + ": expected a number");
          continue;
        }
        m.sample.p[lang] = value.get<double>();
      }
    }
  }
  r.Check<SamplingSpec>("sample.alpha", [&](SamplingSpec& s) {
    s.epoch_size = 1;
    s.alpha = m.sample.alpha;
  });
  r.Check<SamplingSpec>("sample.epoch_size", [&](SamplingSpec& s) {
    s.epoch_size = m.sample.epoch_size;
  });
  r.Check<SamplingSpec>("sample.p", [&](SamplingSpec& s) {
    s.epoch_size = 1;
    s.p = m.sample.p;
  });
  if (auto it = sample.find("corpora"); it != sample.end()) {
    if (!it->is_array()) {
      errors.push_back("sample.corpora: expected a list");
    } else {
      for (std::size_t i = 0; i < it->size(); ++i) {
        auto ref = ReadCorpusRef(r, (*it)[i],
                                 "sample.corpora[" + std::to_string(i) + "]",
                                 runs("sample"));
        if (ref) m.sample_corpora.push_back(std::move(*ref));
      }
    }
  }

  // Evaluate.
  // Files of stages that do not run may be absent.
  const bool evaluates = runs("evaluate");
  m.eval_hyp = r.Path(evaluate, "hyp", "evaluate.hyp", evaluates);
  m.eval_ref = r.Path(evaluate, "ref", "evaluate.ref", evaluates);
  if (auto it = evaluate.find("metrics"); it != evaluate.end()) {
    m.metrics.clear();
    if (!it->is_array()) {
      errors.push_back("evaluate.metrics: expected a list");
    } else {
      for (const json& metric : *it) {
        if (!metric.is_string() || (metric != "bleu" && metric != "chrf")) {
          errors.push_back("evaluate.metrics: expected 'bleu' or 'chrf', got " +
                           metric.dump());
          continue;
        }
        m.metrics.push_back(metric.get<std::string>());
      }
    }
  }

  // Analyze.
  const bool analyzes = runs("analyze");
  m.analyze_hyp = r.Path(analyze, "hyp", "analyze.hyp", analyzes);
  m.analyze_tags = r.Path(analyze, "tags", "analyze.tags", analyzes);
  m.analyze_ref = r.Path(analyze, "ref", "analyze.ref", analyzes);
  m.analyze_alignments =
      r.Path(analyze, "alignments", "analyze.alignments", analyzes);
  r.Unsigned(analyze, "prefix_len", "analyze.prefix_len", m.prefix_len);
  if (m.prefix_len != 2 && m.prefix_len != 3) {
    errors.push_back("analyze.prefix_len: prefix length must be 2 or 3");
  }
  if (auto tag = r.String(analyze, "tag", "analyze.tag")) {
    if (!IsKnownTag(*tag) || *tag == kOtherTag) {
      errors.push_back("analyze.tag: unknown tag '" + *tag + "'");
    }
    m.analyze_tag = *tag;
  }

  // Cross-stage requirements.
  const bool splits = runs("split");
  const bool needs_bitext =
      runs("filter") || runs("dedup") || splits || runs("align") ||
      runs("extract-dict") || (runs("augment") && !m.augment_input) ||
      (runs("sample") && m.sample_corpora.empty());
  if (needs_bitext) {
    if (!src) errors.push_back("inputs.src: required");
    if (!tgt) errors.push_back("inputs.tgt: required");
    if (m.src_lang.empty()) errors.push_back("inputs.src_lang: required");
    if (m.tgt_lang.empty()) errors.push_back("inputs.tgt_lang: required");
  }
  if (!m.src_lang.empty()) r.Language(m.src_lang, "inputs.src_lang");
  if (!m.tgt_lang.empty()) r.Language(m.tgt_lang, "inputs.tgt_lang");
  if (runs("extract-dict") && !runs("align") && !m.lexicon) {
    errors.push_back("align.lexicon: required when extract-dict runs without align");
  }
  if (runs("augment") && !runs("extract-dict") && !m.dictionary) {
    errors.push_back(
        "augment.dictionary: required when augment runs without extract-dict");
  }
  if (runs("evaluate")) {
    if (!m.eval_hyp) errors.push_back("evaluate.hyp: required");
    if (!m.eval_ref && !splits) {
      errors.push_back("evaluate.ref: required when split does not run");
    }
  }
  if (runs("analyze")) {
    if (!m.analyze_hyp) errors.push_back("analyze.hyp: required");
    if (!m.analyze_tags) errors.push_back("analyze.tags: required");
    if (!m.analyze_ref && !splits) {
      errors.push_back("analyze.ref: required when split does not run");
    }
    if (!m.analyze_alignments && !runs("align") && !m.lexicon) {
      errors.push_back(
          "analyze.alignments: required when no lexicon model is available");
    }
  }

  if (!errors.empty()) return result;

  std::vector<json> corpora;
  for (const auto& c : m.sample_corpora) corpora.push_back(CorpusRefJson(c));
  const json input_hashes = config.value("input_hashes", json::object());
  m.config = {
      {"stages", m.stages},
      {"seed", m.seed.value},
      {"output_dir", m.output_dir.string()},
      {"inputs",
       {{"src", m.src.string()},
        {"tgt", m.tgt.string()},
        {"src_lang", m.src_lang},
        {"tgt_lang", m.tgt_lang}}},
      {"input_hashes", input_hashes},
      {"filter", {{"side", SideName(m.filter.side)}}},
      {"dedup",
       {{"threshold", m.dedup.threshold},
        {"window", m.dedup.window},
        {"top_ngrams", m.dedup.top_ngrams},
        {"ngram_order", m.dedup.ngram_order},
        {"bucket_cap", m.dedup.bucket_cap}}},
      {"split",
       {{"valid_size", m.split.valid_size},
        {"test_size", m.split.test_size},
        {"assignment", AssignmentName(m.split.assignment)},
        {"metric", OverlapMetricName(m.split.metric)},
        {"audit", m.audit},
        {"audit_threshold", m.audit_options.threshold},
        {"audit_exhaustive", m.audit_options.exhaustive}}},
      {"align",
       {{"iterations", m.align.iterations},
        {"lambda", m.align.lambda},
        {"p_null", m.align.p_null},
        {"lexicon", OptionalPath(m.lexicon)}}},
      {"extract-dict", {{"min_count", m.min_count}}},
      {"augment",
       {{"rate", m.augment.replacement_rate},
        {"input",
         m.augment_input ? CorpusRefJson(*m.augment_input) : json(nullptr)},
        {"dictionary", OptionalPath(m.dictionary)}}},
      {"sample",
       {{"alpha", m.sample.alpha},
        {"epoch_size", m.sample.epoch_size},
        {"p", m.sample.p},
        {"corpora", corpora}}},
      {"evaluate",
       {{"hyp", OptionalPath(m.eval_hyp)},
        {"ref", OptionalPath(m.eval_ref)},
        {"metrics", m.metrics}}},
      {"analyze",
       {{"hyp", OptionalPath(m.analyze_hyp)},
        {"tags", OptionalPath(m.analyze_tags)},
        {"ref", OptionalPath(m.analyze_ref)},
        {"alignments", OptionalPath(m.analyze_alignments)},
        {"prefix_len", m.prefix_len},
        {"tag", m.analyze_tag}}},
  };
  result.manifest = std::move(m);
  return result;
}

ValidationResult ValidateConfigFile(const fs::path& path) {
  json config;
  try {
    config = json::parse(ReadFileBytes(path));
  } catch (const json::exception& e) {
    ValidationResult result;
    result.errors.push_back(path.string() + ": invalid JSON: " + e.what());
    return result;
  } catch (const Error& e) {
    ValidationResult result;
    result.errors.push_back(e.what());
    return result;
  }
  return ValidateConfig(config, path.parent_path());
}

void ApplyOverride(json& config, std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw Error("override must look like key.path=value, got '" +
                std::string(assignment) + "'");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  json value = json::parse(raw, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = raw;
  json* node = &config;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (part.empty()) throw Error("empty component in override key '" + key + "'");
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[part] = std::move(value);
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

json RunReport::Deterministic() const {
  json j;
  to_json(j, *this);
  for (json& stage : j["stages"]) stage.erase("seconds");
  return j;
}

void to_json(json& j, const RunReport& report) {
  json stages = json::array();
  for (const StageReport& s : report.stages) {
    stages.push_back({{"name", s.name},
                      {"seconds", s.seconds},
                      {"counts", s.counts},
                      {"outputs", s.outputs}});
  }
  j = json{{"tool_version", report.tool_version},
           {"config", report.config},
           {"inputs", report.inputs},
           {"stages", std::move(stages)},
           {"ok", report.ok}};
  if (!report.ok) {
    j["failed_stage"] = report.failed_stage;
    j["error"] = report.error;
    j["internal_error"] = report.internal_error;
  }
}

namespace {

// Intermediate products handed from stage to stage.
struct RunState {
  std::optional<ParallelCorpus> bitext;
  std::optional<Split> split;
  std::optional<LexiconModel> lexicon;
  std::optional<BilingualDictionary> dictionary;
  std::optional<MonolingualCorpus> code_switched;
};

MonolingualCorpus SourceSide(const ParallelCorpus& corpus) {
  std::vector<Sentence> sentences;
  for (const auto& p : corpus.pairs()) sentences.push_back(p.source);
  return MonolingualCorpus(corpus.src_lang(), Origin::kGold,
                           std::move(sentences));
}

MonolingualCorpus TargetSide(const ParallelCorpus& corpus) {
  std::vector<Sentence> sentences;
  for (const auto& p : corpus.pairs()) sentences.push_back(p.target);
  return MonolingualCorpus(corpus.tgt_lang(), Origin::kGold,
                           std::move(sentences));
}

std::vector<std::string> Texts(const MonolingualCorpus& corpus) {
  std::vector<std::string> out;
  for (const auto& s : corpus.sentences()) out.push_back(s.text);
  return out;
}

MonolingualCorpus LoadCorpus(const CorpusRef& ref) {
  if (ref.path.extension() == ".jsonl") {
    MonolingualCorpus corpus = ReadCorpusJsonl(ref.path);
    if (corpus.lang().str() != ref.lang) {
      throw Error(ref.path.string() + ": language is '" + corpus.lang().str() +
                  "', manifest says '" + ref.lang + "'");
    }
    return corpus;
  }
  return ReadCorpus(ref.path, LanguageCode(ref.lang), ref.origin);
}

class StageRunner {
 public:
  StageRunner(const PipelineManifest& m, StageReport& report)
      : m_(m), report_(report) {}

  // Writes `bytes` under the output directory and records its hash.
  void Emit(const std::string& name, std::string_view bytes) {
    WriteFileBytes(bytes, m_.output_dir / name);
    report_.outputs[name] = Sha256Hex(bytes);
  }

  void EmitLines(const std::string& name, const std::vector<std::string>& lines) {
    std::string bytes;
    for (const auto& line : lines) {
      bytes += line;
      bytes += '\n';
    }
    Emit(name, bytes);
  }

  void EmitBitext(const std::string& stem, const ParallelCorpus& corpus) {
    std::vector<std::string> src;
    std::vector<std::string> tgt;
    for (const auto& p : corpus.pairs()) {
      src.push_back(p.source.text);
      tgt.push_back(p.target.text);
    }
    EmitLines(stem + "." + corpus.src_lang().str(), src);
    EmitLines(stem + "." + corpus.tgt_lang().str(), tgt);
  }

  void EmitJson(const std::string& name, const json& value) {
    Emit(name, value.dump(2) + "\n");
  }

 private:
  const PipelineManifest& m_;
  StageReport& report_;
};

const ParallelCorpus& RequireBitext(const RunState& state) {
  if (!state.bitext) throw Error("no input bitext available");
  return *state.bitext;
}

const ParallelCorpus& TrainingBitext(const RunState& state) {
  return state.split ? state.split->train : RequireBitext(state);
}

void RunStage(const std::string& name, const PipelineManifest& m,
              RunState& state, StageReport& report) {
  StageRunner out(m, report);
  if (name == "filter") {
    auto [kept, filter_report] = RunFilters(RequireBitext(state), m.filter);
    json j;
    to_json(j, filter_report);
    out.EmitBitext("filtered", kept);
    out.EmitJson("filter_report.json", j);
    report.counts = {{"input_pairs", filter_report.input_pairs},
                     {"output_pairs", filter_report.output_pairs},
                     {"removed_by_rule", filter_report.removed_by_rule}};
    state.bitext = std::move(kept);
  } else if (name == "dedup") {
    auto [kept, dedup_report] = Dedup(RequireBitext(state), m.dedup);
    json j;
    to_json(j, dedup_report);
    out.EmitBitext("dedup", kept);
    out.EmitJson("dedup_report.json", j);
    report.counts = {{"input", dedup_report.input},
                     {"output", dedup_report.output},
                     {"removed", dedup_report.removal.removed.size()},
                     {"comparisons", dedup_report.removal.comparisons}};
    state.bitext = std::move(kept);
  } else if (name == "split") {
    Split split = MakeSplit(RequireBitext(state), m.split);
    out.EmitBitext("train", split.train);
    out.EmitBitext("valid", split.valid);
    out.EmitBitext("test", split.test);
    out.EmitJson("split_manifest.json", SplitManifest(split, m.split));
    report.counts = {{"train", split.train.size()},
                     {"valid", split.valid.size()},
                     {"test", split.test.size()}};
    if (m.audit) {
      LeakageReport leakage = AuditSplit(split, m.audit_options);
      json j;
      to_json(j, leakage);
      out.EmitJson("leakage.json", j);
      std::size_t flagged = 0;
      for (const auto& e : leakage.entries) flagged += e.flagged;
      report.counts["leakage_flagged"] = flagged;
    }
    state.split = std::move(split);
  } else if (name == "align") {
    const ParallelCorpus& train = TrainingBitext(state);
    LexiconModel model = LexiconModel::Train(train, m.align);
    out.Emit("lexicon.tsv", model.ToTsv());
    // Alignments of the held-out test pairs when there is a split, of the
    // training bitext otherwise.
    const ParallelCorpus& target = state.split ? state.split->test : train;
    std::vector<std::string> lines;
    for (const Alignment& a : model.AlignAll(target)) {
      lines.push_back(FormatAlignment(a));
    }
    out.EmitLines("alignments.txt", lines);
    report.counts = {{"training_pairs", train.size()},
                     {"aligned_pairs", target.size()},
                     {"lexicon_entries", model.num_entries()},
                     {"log_likelihood", model.log_likelihood()}};
    state.lexicon = std::move(model);
  } else if (name == "extract-dict") {
    if (!state.lexicon) {
      state.lexicon = LexiconModel::FromTsv(ReadFileBytes(*m.lexicon));
    }
    BilingualDictionary dict =
        ExtractDictionary(*state.lexicon, TrainingBitext(state), m.min_count);
    out.Emit("dictionary.tsv", dict.ToTsv());
    report.counts = {{"hrl_terms", dict.entries.size()},
                     {"entries", dict.size()},
                     {"min_count", m.min_count}};
    state.dictionary = std::move(dict);
  } else if (name == "augment") {
    if (!state.dictionary) {
      state.dictionary = BilingualDictionary::FromTsv(
          ReadFileBytes(*m.dictionary), LanguageCode(m.src_lang),
          LanguageCode(m.tgt_lang));
    }
    MonolingualCorpus input = m.augment_input
                                  ? LoadCorpus(*m.augment_input)
                                  : SourceSide(TrainingBitext(state));
    MonolingualCorpus switched =
        CodeSwitch(input, *state.dictionary, m.augment);
    out.EmitLines("codeswitched." + switched.lang().str(), Texts(switched));
    report.counts = {{"sentences", switched.size()}};
    state.code_switched = std::move(switched);
  } else if (name == "sample") {
    std::vector<MonolingualCorpus> corpora;
    if (m.sample_corpora.empty()) {
      const ParallelCorpus& train = TrainingBitext(state);
      corpora.push_back(SourceSide(train));
      corpora.push_back(TargetSide(train));
    } else {
      for (const CorpusRef& ref : m.sample_corpora) {
        corpora.push_back(LoadCorpus(ref));
      }
    }
    if (state.code_switched) corpora.push_back(*state.code_switched);
    std::string bytes;
    MixturePlan plan =
        StreamMixture(corpora, m.sample, [&](const Sentence& s) {
          bytes += MixtureLine(s);
          bytes += '\n';
        });
    json j;
    to_json(j, plan);
    out.Emit("mixture.jsonl", bytes);
    out.EmitJson("mixture_plan.json", j);
    report.counts = {{"epoch_size", m.sample.epoch_size}, {"languages", j}};
  } else if (name == "evaluate") {
    std::vector<std::string> hyp = ReadLines(*m.eval_hyp);
    std::vector<std::string> ref =
        m.eval_ref ? ReadLines(*m.eval_ref)
                   : Texts(TargetSide(state.split->test));
    json j = json::object();
    for (const std::string& metric : m.metrics) {
      if (metric == "bleu") {
        j["bleu"] = Bleu(hyp, ref);
      } else {
        j["chrf"] = Chrf(hyp, ref);
      }
    }
    out.EmitJson("evaluation.json", j);
    report.counts = {{"segments", hyp.size()}};
    for (const auto& [metric, score] : j.items()) {
      report.counts[metric] = score["score"];
    }
  } else if (name == "analyze") {
    std::vector<TaggedSentence> tags = IngestTags(*m.analyze_tags);
    std::vector<std::string> ref =
        m.analyze_ref ? ReadLines(*m.analyze_ref)
                      : Texts(TargetSide(state.split->test));
    std::vector<std::string> hyp = ReadLines(*m.analyze_hyp);
    if (tags.size() != ref.size()) {
      throw Error("tag file has " + std::to_string(tags.size()) +
                  " sentences, reference has " + std::to_string(ref.size()));
    }
    std::vector<Alignment> alignments;
    if (m.analyze_alignments) {
      for (const auto& line : ReadLines(*m.analyze_alignments)) {
        alignments.push_back(ParseAlignment(line));
      }
      if (alignments.size() != ref.size()) {
        throw Error("alignment file has " + std::to_string(alignments.size()) +
                    " lines, reference has " + std::to_string(ref.size()));
      }
    } else {
      if (!state.lexicon) {
        state.lexicon = LexiconModel::FromTsv(ReadFileBytes(*m.lexicon));
      }
      for (std::size_t i = 0; i < ref.size(); ++i) {
        std::vector<std::string> src_tokens;
        for (const auto& t : tags[i].tokens) {
          src_tokens.push_back(unicode::CaseFold(t));
        }
        alignments.push_back(
            state.lexicon->Align(src_tokens, CasefoldTokens(ref[i])));
      }
    }
    std::vector<TaggedSentence> projected;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      projected.push_back(ProjectTags(
          tags[i], unicode::SplitWhitespace(ref[i]), alignments[i]));
    }
    AnalysisReport analysis =
        NounClassAccuracy(projected, hyp, m.prefix_len, m.analyze_tag);
    json j;
    to_json(j, analysis);
    out.EmitJson("analysis.json", j);
    report.counts = {{"nouns", analysis.nouns},
                     {"buckets", analysis.buckets.size()},
                     {"macro_accuracy", analysis.macro_accuracy}};
  } else {
    throw Error("unknown stage '" + name + "'");
  }
}

}  // namespace

RunReport RunPipeline(const PipelineManifest& manifest) {
  RunReport report;
  report.tool_version = VersionString();
  report.config = manifest.config;

  // Hash every input file the selected stages read before anything runs.
  std::vector<fs::path> consumed;
  if (!manifest.src.empty()) consumed.push_back(manifest.src);
  if (!manifest.tgt.empty()) consumed.push_back(manifest.tgt);
  auto add = [&](std::string_view stage, const std::optional<fs::path>& p) {
    if (p && manifest.Runs(stage)) consumed.push_back(*p);
  };
  add("extract-dict", manifest.lexicon);
  add("analyze", manifest.lexicon);
  add("augment", manifest.dictionary);
  add("evaluate", manifest.eval_hyp);
  add("evaluate", manifest.eval_ref);
  add("analyze", manifest.analyze_hyp);
  add("analyze", manifest.analyze_tags);
  add("analyze", manifest.analyze_ref);
  add("analyze", manifest.analyze_alignments);
  if (manifest.augment_input) add("augment", manifest.augment_input->path);
  if (manifest.Runs("sample")) {
    for (const auto& c : manifest.sample_corpora) consumed.push_back(c.path);
  }
  for (const fs::path& p : consumed) {
    if (fs::exists(p)) report.inputs[p.string()] = Sha256File(p);
  }
  for (const auto& [path, expected] : manifest.input_hashes) {
    auto it = report.inputs.find(path);
    if (it == report.inputs.end()) {
      throw Error("input_hashes names a file the run does not read: " + path);
    }
    if (it->second != expected) {
      throw Error("hash mismatch for input " + path + ": expected " + expected +
                  ", got " + it->second);
    }
  }

  RunState state;
  std::string current;
  try {
    if (!manifest.src.empty()) {
      current = "read-inputs";
      state.bitext = ReadBitext(manifest.src, manifest.tgt,
                                LanguageCode(manifest.src_lang),
                                LanguageCode(manifest.tgt_lang));
    }
    for (const std::string& name : manifest.stages) {
      current = name;
      StageReport stage;
      stage.name = name;
      const auto start = std::chrono::steady_clock::now();
      RunStage(name, manifest, state, stage);
      stage.seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
      report.stages.push_back(std::move(stage));
    }
  } catch (const Error& e) {
    report.ok = false;
    report.failed_stage = current;
    report.error = e.what();
  } catch (const std::exception& e) {
    report.ok = false;
    report.failed_stage = current;
    report.error = e.what();
    report.internal_error = true;
  }
  json j;
  to_json(j, report);
  WriteFileBytes(j.dump(2) + "\n", manifest.output_dir / "run_report.json");
  return report;
}

}  // namespace forge
