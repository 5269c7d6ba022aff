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

#ifndef FORGE_PIPELINE_H_
#define FORGE_PIPELINE_H_

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/align.h"
#include "forge/augment.h"
#include "forge/dedup.h"
#include "forge/filter.h"
#include "forge/metrics.h"
#include "forge/rng.h"
#include "forge/split.h"
#include "nlohmann/json.hpp"

namespace forge {

// Canonical stage order; a manifest runs a contiguous slice of it.
inline constexpr std::array<std::string_view, 9> kStageOrder = {
    "filter",  "dedup",  "split",    "align",  "extract-dict",
    "augment", "sample", "evaluate", "analyze"};

struct CorpusRef {
  std::filesystem::path path;
  std::string lang;
  Origin origin = Origin::kGold;
};

// Fully validated run description. Paths are absolute or relative to the
// process working directory (the manifest's own directory is already
// applied).
struct PipelineManifest {
  std::vector<std::string> stages;
  Seed seed;
  std::filesystem::path output_dir;

  // Input bitext.
  std::filesystem::path src;
  std::filesystem::path tgt;
  std::string src_lang;
  std::string tgt_lang;
  // Expected SHA-256 of input files, keyed by resolved path.
  std::map<std::string, std::string> input_hashes;

  TokenizationProfile filter;
  DedupPlan dedup;
  SplitSpec split;
  bool audit = true;
  AuditOptions audit_options;
  AlignConfig align;
  uint64_t min_count = kDefaultMinCount;
  std::optional<std::filesystem::path> lexicon;     // when align is skipped
  AugmentSpec augment;
  std::optional<CorpusRef> augment_input;           // default: train source
  std::optional<std::filesystem::path> dictionary;  // when extract-dict is skipped
  SamplingSpec sample;
  std::vector<CorpusRef> sample_corpora;            // default: train sides
  std::optional<std::filesystem::path> eval_hyp;
  std::optional<std::filesystem::path> eval_ref;    // default: test target
  std::vector<std::string> metrics = {"bleu", "chrf"};
  std::optional<std::filesystem::path> analyze_hyp;
  std::optional<std::filesystem::path> analyze_tags;
  std::optional<std::filesystem::path> analyze_ref;         // default: test target
  std::optional<std::filesystem::path> analyze_alignments;  // default: lexicon
  std::size_t prefix_len = 2;
  std::string analyze_tag = "NOUN";

  // Filled-in configuration, echoed into the run report.
  nlohmann::json config;

  bool Runs(std::string_view stage) const;
};

struct ValidationResult {
  std::optional<PipelineManifest> manifest;
  std::vector<std::string> errors;  // every problem found, in key order

  bool ok() const { return errors.empty(); }
};

// Never throws for bad content: all unknown keys, missing files and
// out-of-range values are collected. Relative paths resolve against
// `base_dir`.
ValidationResult ValidateConfig(const nlohmann::json& config,
                                const std::filesystem::path& base_dir = {});
ValidationResult ValidateConfigFile(const std::filesystem::path& path);

// Applies "a.b.c=value" overrides. The value is parsed as JSON when
// possible and taken as a string otherwise.
void ApplyOverride(nlohmann::json& config, std::string_view assignment);

struct StageReport {
  std::string name;
  double seconds = 0.0;
  nlohmann::json counts;
  std::map<std::string, std::string> outputs;  // file name -> sha256
};

struct RunReport {
  std::string tool_version;
  nlohmann::json config;
  std::map<std::string, std::string> inputs;  // path -> sha256
  std::vector<StageReport> stages;
  bool ok = true;
  std::string failed_stage;
  std::string error;
  bool internal_error = false;

  // The report minus wall-clock timings; stable across reruns.
  nlohmann::json Deterministic() const;
};

void to_json(nlohmann::json& j, const RunReport& report);

// Runs the manifest's stages in order, writing outputs under output_dir.
// A failing stage stops the run; the partial report names it. Throws Error
// before any stage runs when an input hash does not match.
RunReport RunPipeline(const PipelineManifest& manifest);

}  // namespace forge

#endif  // FORGE_PIPELINE_H_
