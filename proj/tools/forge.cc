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

// forge: corpus construction, augmentation and evaluation toolkit.
//
// Exit codes: 0 success, 1 user error (bad flags, bad input files, failed
// validation), 2 internal error.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "forge/align.h"
#include "forge/augment.h"
#include "forge/corpus.h"
#include "forge/dedup.h"
#include "forge/error.h"
#include "forge/filter.h"
#include "forge/metrics.h"
#include "forge/ngram.h"
#include "forge/nounclass.h"
#include "forge/parallel.h"
#include "forge/pipeline.h"
#include "forge/split.h"
#include "forge/unicode.h"
#include "nlohmann/json.hpp"

namespace {

using forge::Error;
using forge::LanguageCode;
using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitUserError = 1;
constexpr int kExitInternalError = 2;

struct BitextArgs {
  std::string src;
  std::string tgt;
  std::string src_lang;
  std::string tgt_lang;

  void Register(CLI::App* app) {
    app->add_option("--src", src, "Source-side text, one sentence per line")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--tgt", tgt, "Target-side text, one sentence per line")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--src-lang", src_lang, "Source language code")->required();
    app->add_option("--tgt-lang", tgt_lang, "Target language code")->required();
  }

  forge::ParallelCorpus Read() const {
    return forge::ReadBitext(src, tgt, LanguageCode(src_lang),
                             LanguageCode(tgt_lang));
  }
};

void PrintJson(const json& j) { std::cout << j.dump(2) << "\n"; }

void WriteJsonFile(const std::string& path, const json& j) {
  forge::WriteFileBytes(j.dump(2) + "\n", path);
}

void WriteBitextPrefix(const forge::ParallelCorpus& corpus,
                       const std::string& prefix) {
  forge::WriteBitext(corpus, prefix + "." + corpus.src_lang().str(),
                     prefix + "." + corpus.tgt_lang().str());
}

std::vector<std::string> SplitCommas(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string part =
        text.substr(start, comma == std::string::npos ? std::string::npos
                                                      : comma - start);
    if (!part.empty()) out.push_back(part);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------

struct FilterCmd {
  BitextArgs io;
  std::string out_prefix;
  std::string side = "source";
  std::string report;
  bool json_out = false;

  void Register(CLI::App& root) {
    CLI::App* app = root.add_subcommand(
        "filter", "Drop empty, short, non-sentence and identical pairs");
    io.Register(app);
    app->add_option("--out-prefix", out_prefix,
                    "Writes <prefix>.<src-lang> and <prefix>.<tgt-lang>")
        ->required();
    app->add_option("--side", side, "Sides checked by the token rules")
        ->check(CLI::IsMember({"source", "both"}));
    app->add_option("--report", report, "Write the filter report as JSON");
    app->add_flag("--json", json_out, "Print the report to stdout");
    app->callback([this] { Run(); });
  }

  void Run() {
    forge::TokenizationProfile profile{forge::ParseSide(side)};
    auto [kept, filter_report] = forge::RunFilters(io.Read(), profile);
    WriteBitextPrefix(kept, out_prefix);
    json j;
    to_json(j, filter_report);
    if (!report.empty()) WriteJsonFile(report, j);
    if (json_out) {
      PrintJson(j);
    } else {
      std::cerr << "filter: kept " << filter_report.output_pairs << " of "
                << filter_report.input_pairs << " pairs\n";
    }
  }
};

struct DedupCmd {
  std::string src, tgt, src_lang, tgt_lang;
  std::string out_prefix;
  std::string input, lang, output;
  forge::DedupPlan plan;
  std::string report;
  bool json_out = false;

  void Register(CLI::App& root) {
    CLI::App* app = root.add_subcommand(
        "dedup", "Remove near-duplicate sentences (bitext or monolingual)");
    auto* g_bi = app->add_option_group("bitext");
    g_bi->add_option("--src", src)->check(CLI::ExistingFile);
    g_bi->add_option("--tgt", tgt)->check(CLI::ExistingFile);
    g_bi->add_option("--src-lang", src_lang);
    g_bi->add_option("--tgt-lang", tgt_lang);
    g_bi->add_option("--out-prefix", out_prefix);
    auto* g_mono = app->add_option_group("monolingual");
    g_mono->add_option("--input", input)->check(CLI::ExistingFile);
    g_mono->add_option("--lang", lang);
    g_mono->add_option("--output", output);
    app->add_option("--threshold", plan.threshold,
                    "Pairs scoring strictly above this are duplicates")
        ->capture_default_str();
    app->add_option("--window", plan.window)->capture_default_str();
    app->add_option("--top-ngrams", plan.top_ngrams)->capture_default_str();
    app->add_option("--ngram-order", plan.ngram_order)->capture_default_str();
    app->add_option("--bucket-cap", plan.bucket_cap)->capture_default_str();
    app->add_option("--report", report, "Write the dedup report as JSON");
    app->add_flag("--json", json_out, "Print the report to stdout");
    app->callback([this] { Run(); });
  }

  void Run() {
    plan.Validate();
    json j;
    if (!input.empty()) {
      if (lang.empty() || output.empty()) {
        throw Error("--input needs --lang and --output");
      }
      auto corpus = forge::ReadCorpus(input, LanguageCode(lang));
      auto [kept, dedup_report] = forge::Dedup(corpus, plan);
      forge::WriteCorpus(kept, output);
      to_json(j, dedup_report);
    } else {
      if (src.empty() || tgt.empty() || src_lang.empty() ||
          tgt_lang.empty() || out_prefix.empty()) {
        throw Error(
            "need --src/--tgt/--src-lang/--tgt-lang/--out-prefix, or "
            "--input/--lang/--output");
      }
      auto corpus = forge::ReadBitext(src, tgt, LanguageCode(src_lang),
                                      LanguageCode(tgt_lang));
      auto [kept, dedup_report] = forge::Dedup(corpus, plan);
      WriteBitextPrefix(kept, out_prefix);
      to_json(j, dedup_report);
    }
    if (!report.empty()) WriteJsonFile(report, j);
    if (json_out) {
      PrintJson(j);
    } else {
      std::cerr << "dedup: kept " << j["output"] << " of " << j["input"]
                << "\n";
    }
  }
};

struct SplitCmd {
  BitextArgs io;
  std::string out_dir;
  forge::SplitSpec spec;
  std::string assignment = "alternating";
  std::string metric = "fraction";
  uint64_t seed = 0;
  bool no_audit = false;
  forge::AuditOptions audit;
  bool json_out = false;

  void Register(CLI::App& root) {
    CLI::App* app = root.add_subcommand(
        "split", "Hold out the lowest-overlap pairs as valid/test");
    io.Register(app);
    app->add_option("--out-dir", out_dir)->required();
    app->add_option("--valid-size", spec.valid_size)->capture_default_str();
    app->add_option("--test-size", spec.test_size)->capture_default_str();
    app->add_option("--assignment", assignment)
        ->check(CLI::IsMember({"alternating", "contiguous"}))
        ->capture_default_str();
    app->add_option("--metric", metric)
        ->check(CLI::IsMember({"fraction", "raw-count"}))
        ->capture_default_str();
    app->add_option("--seed", seed, "Recorded in the split manifest");
    app->add_flag("--no-audit", no_audit, "Skip the leakage audit");
    app->add_option("--audit-threshold", audit.threshold)
        ->capture_default_str();
    app->add_flag("--exhaustive-audit", audit.exhaustive,
                  "Score every held-out/train pair in the audit");
    app->add_flag("--json", json_out, "Print manifest and audit to stdout");
    app->callback([this] { Run(); });
  }

  void Run() {
    spec.assignment = forge::ParseAssignment(assignment);
    spec.metric = forge::ParseOverlapMetric(metric);
    spec.seed = forge::Seed{seed};
    forge::Split split = forge::MakeSplit(io.Read(), spec);
    const fs::path dir(out_dir);
    WriteBitextPrefix(split.train, (dir / "train").string());
    WriteBitextPrefix(split.valid, (dir / "valid").string());
    WriteBitextPrefix(split.test, (dir / "test").string());
    json out = {{"manifest", forge::SplitManifest(split, spec)}};
    WriteJsonFile((dir / "split_manifest.json").string(), out["manifest"]);
    if (!no_audit) {
      json leakage;
      to_json(leakage, forge::AuditSplit(split, audit));
      WriteJsonFile((dir / "leakage.json").string(), leakage);
      out["leakage"] = leakage;
    }
    if (json_out) {
      PrintJson(out);
    } else {
      std::cerr << "split: train " << split.train.size() << ", valid "
                << split.valid.size() << ", test " << split.test.size()
                << "\n";
    }
  }
};

struct AlignCmd {
  BitextArgs io;
  forge::AlignConfig config;
  bool diagonal = false;
  std::string model;
  std::string alignments;
  bool json_out = false;

  void Register(CLI::App& root) {
    CLI::App* app = root.add_subcommand(
        "align", "Train a lexical translation model and align the bitext");
    io.Register(app);
    app->add_option("--iterations", config.iterations)->capture_default_str();
    app->add_option("--lambda", config.lambda, "Diagonal prior strength")
        ->capture_default_str();
    app->add_flag("--diagonal", diagonal,
                  "Switch on the diagonal prior at its default strength");
    app->add_option("--p-null", config.p_null)->capture_default_str();
    app->add_option("--model", model, "Write the lexicon as TSV")->required();
    app->add_option("--alignments", alignments,
                    "Write one i-j alignment line per pair");
    app->add_flag("--json", json_out, "Print training statistics");
    app->callback([this] { Run(); });
  }

  void Run() {
    if (diagonal && config.lambda == 0.0) {
      config.lambda = forge::kDefaultDiagonalLambda;
    }
    config.Validate();
    auto corpus = io.Read();
    auto lexicon = forge::LexiconModel::Train(corpus, config);
    forge::WriteFileBytes(lexicon.ToTsv(), model);
    if (!alignments.empty()) {
      std::vector<std::string> lines;
      for (const auto& a : lexicon.AlignAll(corpus)) {
        lines.push_back(forge::FormatAlignment(a));
      }
      forge::WriteLines(lines, alignments);
    }
    json j = {{"pairs", corpus.size()},
              {"entries", lexicon.num_entries()},
              {"log_likelihood", lexicon.log_likelihood()},
              {"max_row_deviation", lexicon.MaxRowDeviation()}};
    if (json_out) {
      PrintJson(j);
    } else {
      std::cerr << "align: " << lexicon.num_entries() << " entries\n";
    }
  }
};

struct ExtractDictCmd {
  BitextArgs io;
  std::string model;
  uint64_t min_count = forge::kDefaultMinCount;
  std::string output;

  void Register(CLI::App& root) {
    CLI::App* app = root.add_subcommand(
        "extract-dict", "Bilingual dictionary from frequent alignment links");
    io.Register(app);
    app->add_option("--model", model, "Lexicon TSV from `forge align`")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--min-count", min_count,
                    "Keep links seen strictly more often than this")
        ->capture_default_str();
    app->add_option("--output", output)->required();
    app->callback([this] { Run(); });
  }

  void Run() {
    auto lexicon = forge::LexiconModel::FromTsv(forge::ReadFileBytes(model));
    auto dict = forge::ExtractDictionary(lexicon, io.Read(), min_count);
    forge::WriteFileBytes(dict.ToTsv(), output);
    std::cerr << "extract-dict: " << dict.size() << " entries\n";
  }
};

struct AugmentCmd {
  std::string input, lang, lrl_lang, dictionary, output;
  forge::AugmentSpec spec;
  uint64_t seed = 0;

  void Register(CLI::App& root) {
    CLI::App* app = root.add_subcommand(
        "augment", "Code-switch high-resource text with a dictionary");
    app->add_option("--input", input)->required()->check(CLI::ExistingFile);
    app->add_option("--lang", lang, "Language of --input")->required();
    app->add_option("--lrl-lang", lrl_lang, "Dictionary target language")
        ->required();
    app->add_option("--dictionary", dictionary)
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--rate", spec.replacement_rate)->capture_default_str();
    app->add_option("--seed", seed)->capture_default_str();
    app->add_option("--output", output)->required();
    app->callback([this] { Run(); });
  }

  void Run() {
    spec.seed = forge::Seed{seed};
    spec.Validate();
    const LanguageCode hrl(lang);
    auto dict = forge::BilingualDictionary::FromTsv(
        forge::ReadFileBytes(dictionary), hrl, LanguageCode(lrl_lang));
    auto corpus = forge::ReadCorpus(input, hrl);
    forge::WriteCorpus(forge::CodeSwitch(corpus, dict, spec), output);
  }
};

struct SampleCmd {
  std::vector<std::string> corpora;
  std::vector<std::string> probabilities;
  forge::SamplingSpec spec;
  uint64_t seed = 0;
  std::string output;
  std::string plan_path;
  bool json_out = false;

  void Register(CLI::App& root) {
    CLI::App* app = root.add_subcommand(
        "sample", "Build a pretraining mixture with exponential sampling");
    app->add_option("--corpus", corpora,
                    "lang:path[:origin]; .jsonl paths carry their own tags")
        ->required();
    app->add_option("--p", probabilities,
                    "lang=value, overrides size-derived probabilities");
    app->add_option("--alpha", spec.alpha)->capture_default_str();
    app->add_option("--epoch-size", spec.epoch_size)->required();
    app->add_option("--seed", seed)->capture_default_str();
    app->add_option("--output", output, "Mixture JSONL")->required();
    app->add_option("--plan", plan_path, "Write per-language weights as JSON");
    app->add_flag("--json", json_out, "Print the plan to stdout");
    app->callback([this] { Run(); });
  }

  void Run() {
    spec.seed = forge::Seed{seed};
    for (const std::string& item : probabilities) {
      const std::size_t eq = item.find('=');
      if (eq == std::string::npos) throw Error("--p expects lang=value");
      try {
        spec.p[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
      } catch (const std::logic_error&) {
        throw Error("--p: bad number in '" + item + "'");
      }
    }
    spec.Validate();
    std::vector<forge::MonolingualCorpus> loaded;
    for (const std::string& item : corpora) {
      const std::size_t c1 = item.find(':');
      if (c1 == std::string::npos) throw Error("--corpus expects lang:path");
      const std::string lang = item.substr(0, c1);
      std::string path = item.substr(c1 + 1);
      forge::Origin origin = forge::Origin::kGold;
      if (const std::size_t c2 = path.rfind(':'); c2 != std::string::npos) {
        origin = forge::ParseOrigin(path.substr(c2 + 1));
        path = path.substr(0, c2);
      }
      if (fs::path(path).extension() == ".jsonl") {
        loaded.push_back(forge::ReadCorpusJsonl(path));
        if (loaded.back().lang().str() != lang) {
          throw Error(path + ": language is '" + loaded.back().lang().str() +
                      "', not '" + lang + "'");
        }
      } else {
        loaded.push_back(forge::ReadCorpus(path, LanguageCode(lang), origin));
      }
    }
    std::string bytes;
    auto plan = forge::StreamMixture(loaded, spec, [&](const forge::Sentence& s) {
      bytes += forge::MixtureLine(s);
      bytes += '\n';
    });
    forge::WriteFileBytes(bytes, output);
    json j;
    to_json(j, plan);
    if (!plan_path.empty()) WriteJsonFile(plan_path, j);
    if (json_out) PrintJson(j);
  }
};

struct MergePseudoCmd {
  std::string gold, translated, lang, output;

  void Register(CLI::App& root) {
    CLI::App* app = root.add_subcommand(
        "merge-pseudo", "Append translated text to gold text with origin tags");
    app->add_option("--gold", gold)->required()->check(CLI::ExistingFile);
    app->add_option("--translated", translated)
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--lang", lang)->required();
    app->add_option("--output", output, "Merged JSONL")->required();
    app->callback([this] { Run(); });
  }

  void Run() {
    const LanguageCode code(lang);
    auto result = forge::MergePseudo(
        forge::ReadCorpus(gold, code, forge::Origin::kGold),
        forge::ReadCorpus(translated, code, forge::Origin::kPseudo));
    forge::WriteCorpusJsonl(result.merged, output);
    std::cerr << "merge-pseudo: " << result.gold << " gold + " << result.pseudo
              << " pseudo\n";
  }
};

struct PlanIterationCmd {
  std::string manifest;
  std::size_t round = 1;
  std::string output;

  void Register(CLI::App& root) {
    CLI::App* app = root.add_subcommand(
        "plan-iteration", "List the steps of one pseudo-data round");
    app->add_option("--manifest", manifest)
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--round", round)->capture_default_str();
    app->add_option("--output", output, "Write the plan JSON here");
    app->callback([this] { Run(); });
  }

  void Run() {
    json m;
    try {
      m = json::parse(forge::ReadFileBytes(manifest));
    } catch (const json::exception& e) {
      throw Error(manifest + ": invalid JSON: " + e.what());
    }
    json j;
    to_json(j, forge::PlanIteration(round, m, fs::path(manifest).parent_path()));
    if (output.empty()) {
      PrintJson(j);
    } else {
      WriteJsonFile(output, j);
    }
  }
};

struct EvaluateCmd {
  std::string hyp, ref;
  std::string metrics = "bleu,chrf";
  bool chrf_whitespace = false;
  bool json_out = false;

  void Register(CLI::App& root) {
    CLI::App* app =
        root.add_subcommand("evaluate", "Corpus BLEU and chrF of a system");
    app->add_option("--hyp", hyp)->required()->check(CLI::ExistingFile);
    app->add_option("--ref", ref)->required()->check(CLI::ExistingFile);
    app->add_option("--metric", metrics, "Comma-separated: bleu, chrf")
        ->capture_default_str();
    app->add_flag("--chrf-whitespace", chrf_whitespace,
                  "Keep whitespace in chrF character n-grams");
    app->add_flag("--json", json_out, "Print JSON instead of text");
    app->callback([this] { Run(); });
  }

  void Run() {
    const auto h = forge::ReadLines(hyp);
    const auto r = forge::ReadLines(ref);
    json j = json::object();
    for (const std::string& metric : SplitCommas(metrics)) {
      if (metric == "bleu") {
        auto score = forge::Bleu(h, r);
        j["bleu"] = score;
        if (!json_out) {
          std::printf("BLEU = %.2f  [%s]\n", score.score,
                      score.signature.c_str());
        }
      } else if (metric == "chrf") {
        forge::ChrfOptions options;
        options.include_whitespace = chrf_whitespace;
        auto score = forge::Chrf(h, r, options);
        j["chrf"] = score;
        if (!json_out) {
          std::printf("chrF2 = %.2f  [%s]\n", score.score,
                      score.signature.c_str());
        }
      } else {
        throw Error("unknown metric '" + metric + "'");
      }
    }
    if (json_out) PrintJson(j);
  }
};

struct AnalyzeCmd {
  std::string ref, hyp, tags, alignments, lexicon, compare_hyp;
  std::size_t prefix_len = 2;
  std::string tag = "NOUN";
  bool json_out = false;

  void Register(CLI::App& root) {
    CLI::App* app = root.add_subcommand(
        "analyze", "Noun-class accuracy via projected source POS tags");
    app->add_option("--ref", ref, "Reference target text")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--hyp", hyp, "System output")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--tags", tags, "Tagged source text, token/TAG items")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--alignments", alignments, "i-j lines, source-target")
        ->check(CLI::ExistingFile);
    app->add_option("--lexicon", lexicon,
                    "Align with this lexicon when --alignments is absent")
        ->check(CLI::ExistingFile);
    app->add_option("--compare-hyp", compare_hyp,
                    "Second system; report deltas against --hyp")
        ->check(CLI::ExistingFile);
    app->add_option("--prefix-len", prefix_len)
        ->check(CLI::IsMember({2, 3}))
        ->capture_default_str();
    app->add_option("--tag", tag, "Source POS tag to analyze")
        ->check(CLI::IsMember({"NOUN", "VERB", "ADJ"}))
        ->capture_default_str();
    app->add_flag("--json", json_out, "Print JSON instead of text");
    app->callback([this] { Run(); });
  }

  void Run() {
    const auto tagged = forge::IngestTags(tags);
    const auto references = forge::ReadLines(ref);
    if (tagged.size() != references.size()) {
      throw Error("tag file has " + std::to_string(tagged.size()) +
                  " sentences, reference has " +
                  std::to_string(references.size()));
    }
    std::vector<forge::Alignment> links;
    if (!alignments.empty()) {
      for (const auto& line : forge::ReadLines(alignments)) {
        links.push_back(forge::ParseAlignment(line));
      }
      if (links.size() != references.size()) {
        throw Error("alignment file has " + std::to_string(links.size()) +
                    " lines, reference has " +
                    std::to_string(references.size()));
      }
    } else if (!lexicon.empty()) {
      auto model = forge::LexiconModel::FromTsv(forge::ReadFileBytes(lexicon));
      for (std::size_t i = 0; i < references.size(); ++i) {
        std::vector<std::string> src;
        for (const auto& t : tagged[i].tokens) {
          src.push_back(forge::unicode::CaseFold(t));
        }
        links.push_back(
            model.Align(src, forge::CasefoldTokens(references[i])));
      }
    } else {
      throw Error("need --alignments or --lexicon");
    }
    std::vector<forge::TaggedSentence> projected;
    for (std::size_t i = 0; i < references.size(); ++i) {
      projected.push_back(forge::ProjectTags(
          tagged[i], forge::unicode::SplitWhitespace(references[i]), links[i]));
    }
    auto report = forge::NounClassAccuracy(projected, forge::ReadLines(hyp),
                                           prefix_len, tag);
    json j;
    to_json(j, report);
    if (!compare_hyp.empty()) {
      auto other = forge::NounClassAccuracy(
          projected, forge::ReadLines(compare_hyp), prefix_len, tag);
      json b;
      to_json(b, other);
      json delta;
      to_json(delta, forge::CompareSystems(report, other));
      j = {{"a", j}, {"b", b}, {"comparison", delta}};
    }
    if (json_out) {
      PrintJson(j);
      return;
    }
    std::printf("%-8s %8s %8s %8s\n", "prefix", "total", "correct", "acc");
    for (const auto& bucket : report.buckets) {
      std::printf("%-8s %8zu %8zu %8.4f\n", bucket.prefix.c_str(),
                  bucket.total, bucket.correct, bucket.accuracy());
    }
    std::printf("macro-average accuracy: %.4f\n", report.macro_accuracy);
  }
};

struct PipelineCmd {
  std::string manifest;
  std::vector<std::string> overrides;
  std::string output_dir;
  std::optional<uint64_t> seed;
  bool validate_only = false;

  void Register(CLI::App& root) {
    CLI::App* app = root.add_subcommand(
        "pipeline", "Run a JSON manifest of stages end to end");
    app->add_option("--manifest", manifest)
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--set", overrides,
                    "Override a manifest key: dedup.threshold=70");
    app->add_option("--output-dir", output_dir, "Overrides output_dir");
    app->add_option("--seed", seed, "Overrides seed");
    app->add_flag("--validate-only", validate_only,
                  "Print the filled-in manifest or every error, then stop");
    app->callback([this] { Run(); });
  }

  void Run() {
    json config;
    try {
      config = json::parse(forge::ReadFileBytes(manifest));
    } catch (const json::exception& e) {
      throw Error(manifest + ": invalid JSON: " + e.what());
    }
    for (const auto& o : overrides) forge::ApplyOverride(config, o);
    if (!output_dir.empty()) {
      config["output_dir"] = fs::absolute(output_dir).string();
    }
    if (seed) config["seed"] = *seed;
    auto result = forge::ValidateConfig(config, fs::path(manifest).parent_path());
    if (!result.ok()) {
      for (const auto& e : result.errors) std::cerr << "error: " << e << "\n";
      throw Error(std::to_string(result.errors.size()) +
                  " manifest error(s)");
    }
    if (validate_only) {
      PrintJson(result.manifest->config);
      return;
    }
    auto report = forge::RunPipeline(*result.manifest);
    for (const auto& stage : report.stages) {
      std::cerr << "pipeline: " << stage.name << " done ("
                << stage.counts.dump() << ")\n";
    }
    if (!report.ok) {
      std::cerr << "pipeline: stage '" << report.failed_stage
                << "' failed: " << report.error << "\n";
      if (report.internal_error) throw std::runtime_error(report.error);
      throw Error("pipeline aborted");
    }
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forge: build, clean, augment and score MT corpora"};
  app.set_version_flag("--version", std::string("forge ") + FORGE_VERSION);
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads,
                 "Worker threads (default: $FORGE_THREADS, else 1); never "
                 "changes outputs")
      ->check(CLI::PositiveNumber)
      ->each([](const std::string& value) {
        forge::SetThreadCount(std::stoi(value));
      });

  FilterCmd filter;
  DedupCmd dedup;
  SplitCmd split;
  AlignCmd align;
  ExtractDictCmd extract;
  AugmentCmd augment;
  SampleCmd sample;
  MergePseudoCmd merge;
  PlanIterationCmd plan;
  EvaluateCmd evaluate;
  AnalyzeCmd analyze;
  PipelineCmd pipeline;
  filter.Register(app);
  dedup.Register(app);
  split.Register(app);
  align.Register(app);
  extract.Register(app);
  augment.Register(app);
  sample.Register(app);
  merge.Register(app);
  plan.Register(app);
  evaluate.Register(app);
  analyze.Register(app);
  pipeline.Register(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUserError;
  } catch (const Error& e) {
    std::cerr << "forge: error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const std::exception& e) {
    std::cerr << "forge: internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return 0;
}
