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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "forge/align.h"
#include "forge/corpus.h"
#include "forge/error.h"
#include "forge/hash.h"
#include "forge/unicode.h"
#include "nlohmann/json.hpp"
#include "oracles.h"
#include "testing.h"

namespace forge {
namespace {

using nlohmann::json;
using testing::En;
using testing::Sw;
using testing::TempDir;

BilingualDictionary Dict(std::initializer_list<std::pair<std::string, std::string>> rows) {
  BilingualDictionary dict{En(), Sw(), {}};
  for (const auto& [h, l] : rows) dict.entries[h][l] = 25;
  return dict;
}

Sentence En(SentenceId id, std::string text) {
  return Sentence{id, std::move(text), testing::En()};
}

MonolingualCorpus Repeat(const LanguageCode& lang, std::size_t n,
                         Origin origin = Origin::kGold) {
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < n; ++i) lines.push_back(lang.str() + std::to_string(i));
  return MakeCorpus(lines, lang, origin);
}

// ---------------------------------------------------------------------------
// Dictionary extraction

ParallelCorpus CountedCorpus() {
  std::vector<std::string> src;
  std::vector<std::string> tgt;
  for (int i = 0; i < 21; ++i) {
    src.push_back("apple");
    tgt.push_back("tufaha");
  }
  for (int i = 0; i < 20; ++i) {
    src.push_back("pear");
    tgt.push_back("pea");
  }
  return MakeBitext(src, tgt, testing::En(), Sw());
}

TEST(ExtractDictionaryTest, ThresholdIsStrict) {
  const ParallelCorpus corpus = CountedCorpus();
  const LexiconModel model = LexiconModel::Train(corpus, {});
  const auto counts = CountLinks(model, corpus);
  EXPECT_EQ(counts.at({"apple", "tufaha"}), 21u);
  EXPECT_EQ(counts.at({"pear", "pea"}), 20u);
  const BilingualDictionary dict = ExtractDictionary(model, corpus);
  EXPECT_EQ(dict.size(), 1u);
  EXPECT_EQ(dict.entries.at("apple").at("tufaha"), 21u);
  EXPECT_FALSE(dict.entries.contains("pear"));
  EXPECT_EQ(ExtractDictionary(model, corpus, 19).size(), 2u);
}

TEST(ExtractDictionaryTest, DropsNumericAndPunctuationTerms) {
  std::vector<std::string> src;
  std::vector<std::string> tgt;
  for (const auto& [s, t] : std::vector<std::pair<std::string, std::string>>{
           {"apple", "tufaha"}, {"42", "42"}, {"!", "!"}, {"apple", "3"}}) {
    for (int i = 0; i < 30; ++i) {
      src.push_back(s);
      tgt.push_back(t);
    }
  }
  const ParallelCorpus corpus = MakeBitext(src, tgt, testing::En(), Sw());
  const BilingualDictionary dict =
      ExtractDictionary(LexiconModel::Train(corpus, {}), corpus);
  EXPECT_EQ(dict.size(), 1u);
  EXPECT_TRUE(dict.entries.contains("apple"));
}

TEST(ExtractDictionaryTest, CountsMatchViterbiRecount) {
  std::mt19937_64 gen(83);
  const std::vector<std::string> en = {"the", "book", "cat", "water", "is", "big"};
  const std::vector<std::string> sw = {"kitabu", "paka", "maji", "ni", "kubwa", "la"};
  std::vector<std::string> src;
  std::vector<std::string> tgt;
  for (int k = 0; k < 400; ++k) {
    std::string s;
    std::string t;
    for (std::size_t i = 0, n = 1 + gen() % 5; i < n; ++i) {
      const std::size_t w = gen() % en.size();
      s += (i ? " " : "") + en[w];
      t += (i ? " " : "") + sw[gen() % 5 == 0 ? gen() % sw.size() : w];
    }
    src.push_back(s);
    tgt.push_back(t);
  }
  const ParallelCorpus corpus = MakeBitext(src, tgt, testing::En(), Sw());
  const LexiconModel model = LexiconModel::Train(corpus, {});
  const auto recount = oracle::RecountLinks(model, corpus);
  EXPECT_EQ(CountLinks(model, corpus), recount);
  const BilingualDictionary dict = ExtractDictionary(model, corpus);
  std::size_t expected = 0;
  for (const auto& [terms, count] : recount) {
    if (count > kDefaultMinCount) {
      ++expected;
      EXPECT_EQ(dict.entries.at(terms.first).at(terms.second), count);
    }
  }
  EXPECT_EQ(dict.size(), expected);
  for (const auto& [h, row] : dict.entries) {
    EXPECT_EQ(unicode::CaseFold(h), h);
    for (const auto& [l, count] : row) {
      EXPECT_FALSE(l.empty());
      EXPECT_GT(count, kDefaultMinCount);
    }
  }
}

TEST(DictionaryTsvTest, RoundTrip) {
  BilingualDictionary dict = Dict({{"book", "kitabu"}, {"book", "buku"}, {"cat", "paka"}});
  EXPECT_EQ(dict.size(), 3u);
  const std::string tsv = dict.ToTsv();
  EXPECT_EQ(tsv, "book\tbuku\t25\nbook\tkitabu\t25\ncat\tpaka\t25\n");
  const BilingualDictionary copy = BilingualDictionary::FromTsv(tsv, testing::En(), Sw());
  EXPECT_EQ(copy.entries, dict.entries);
  EXPECT_THROW(BilingualDictionary::FromTsv("book\tkitabu\n", testing::En(), Sw()), Error);
}

// ---------------------------------------------------------------------------
// Code-switching

TEST(ReplacementCountTest, CeilingWithoutRoundingDrift) {
  EXPECT_EQ(ReplacementCount(10, 0.3), 3u);
  EXPECT_EQ(ReplacementCount(1, 0.3), 1u);
  EXPECT_EQ(ReplacementCount(4, 0.3), 2u);
  EXPECT_EQ(ReplacementCount(7, 1.0), 7u);
  EXPECT_EQ(ReplacementCount(7, 0.0), 0u);
  EXPECT_EQ(ReplacementCount(0, 0.3), 0u);
  for (std::size_t m = 1; m <= 1000; ++m) {
    for (int r = 1; r <= 10; ++r) {
      const std::size_t expected = (m * static_cast<std::size_t>(r) + 9) / 10;
      ASSERT_EQ(ReplacementCount(m, r / 10.0), expected) << m << " " << r;
    }
  }
}

TEST(CodeSwitchTest, FullRateReplacesEveryMatch) {
  AugmentSpec spec;
  spec.replacement_rate = 1.0;
  const CodeSwitchResult r =
      CodeSwitchSentence(En(0, "I read the book"), Dict({{"book", "kitabu"}}), spec);
  EXPECT_EQ(r.text, "I read the kitabu");
  EXPECT_EQ(r.matches, 1u);
  EXPECT_EQ(r.replaced, (std::vector<std::size_t>{3}));
}

TEST(CodeSwitchTest, ZeroRateIsIdentity) {
  AugmentSpec spec;
  spec.replacement_rate = 0.0;
  const Sentence s = En(0, "the  book and\tthe cat");
  const auto r = CodeSwitchSentence(s, Dict({{"book", "kitabu"}, {"cat", "paka"}}), spec);
  EXPECT_EQ(r.text, s.text);
  EXPECT_TRUE(r.replaced.empty());
}

TEST(CodeSwitchTest, TenMatchesReplaceThree) {
  const Sentence s = En(5, "a b a b a b a b a b");
  const auto r = CodeSwitchSentence(s, Dict({{"a", "x"}, {"b", "y"}}), {});
  EXPECT_EQ(r.matches, 10u);
  EXPECT_EQ(r.replaced.size(), 3u);
}

TEST(CodeSwitchTest, MatchingIsCasefoldedAndPreservesSpacing) {
  AugmentSpec spec;
  spec.replacement_rate = 1.0;
  const auto r = CodeSwitchSentence(En(0, "The  BOOK\tis here"),
                                    Dict({{"book", "kitabu"}}), spec);
  EXPECT_EQ(r.text, "The  kitabu\tis here");
}

TEST(CodeSwitchTest, RejectsBadRate) {
  AugmentSpec spec;
  spec.replacement_rate = 1.5;
  EXPECT_THROW(spec.Validate(), Error);
}

TEST(CodeSwitchPropertyTest, TokenCountPositionsAndDeterminism) {
  std::mt19937_64 gen(89);
  const std::vector<std::string> vocab = {"the", "Book", "cat", "water", "runs",
                                          "fast", "and", "slow", "."};
  const BilingualDictionary dict = Dict(
      {{"book", "kitabu"}, {"cat", "paka"}, {"water", "maji"}, {"runs", "anakimbia"},
       {"and", "na"}, {"book", "buku"}});
  AugmentSpec spec;
  spec.seed = Seed{2026};
  for (int i = 0; i < 10000; ++i) {
    const Sentence s = En(static_cast<SentenceId>(i),
                          testing::RandomSentence(gen, vocab, gen() % 15));
    const CodeSwitchResult r = CodeSwitchSentence(s, dict, spec);
    const auto before = unicode::SplitWhitespace(s.text);
    const auto after = unicode::SplitWhitespace(r.text);
    ASSERT_EQ(before.size(), after.size()) << s.text;
    std::size_t matches = 0;
    for (std::size_t k = 0; k < before.size(); ++k) {
      const bool matching = dict.entries.contains(unicode::CaseFold(before[k]));
      matches += matching;
      const bool replaced =
          std::binary_search(r.replaced.begin(), r.replaced.end(), k);
      if (replaced) {
        ASSERT_TRUE(matching);
        EXPECT_TRUE(dict.entries.at(unicode::CaseFold(before[k])).contains(after[k]));
      } else {
        EXPECT_EQ(before[k], after[k]);
      }
    }
    EXPECT_EQ(r.matches, matches);
    EXPECT_EQ(r.replaced.size(), ReplacementCount(matches, 0.3));
    EXPECT_EQ(CodeSwitchSentence(s, dict, spec).text, r.text);
  }
}

TEST(CodeSwitchTest, CorpusTaggedCodeSwitched) {
  const MonolingualCorpus corpus = MakeCorpus({"the book", "a cat"}, testing::En());
  const MonolingualCorpus out = CodeSwitch(corpus, Dict({{"book", "kitabu"}}), {});
  EXPECT_EQ(out.origin(), Origin::kCodeSwitched);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].text, "the kitabu");
  EXPECT_EQ(out[1].text, "a cat");
  EXPECT_EQ(out[0].origin, Origin::kCodeSwitched);
}

// ---------------------------------------------------------------------------
// Exponential sampling

TEST(ExpSampleWeightsTest, KnownValue) {
  const std::vector<double> p = {0.9, 0.1};
  const std::vector<double> q = ExpSampleWeights(p, 0.25);
  EXPECT_NEAR(q[0], 0.63398, 1e-3);
  EXPECT_NEAR(q[1], 0.36602, 1e-3);
  const double a = std::pow(0.9, 0.25);
  const double b = std::pow(0.1, 0.25);
  EXPECT_NEAR(q[0], a / (a + b), 1e-15);
}

TEST(ExpSampleWeightsTest, AlphaOneIsIdentityAfterNormalizing) {
  const std::vector<double> p = {3, 1, 6};
  const std::vector<double> q = ExpSampleWeights(p, 1.0);
  EXPECT_NEAR(q[0], 0.3, 1e-15);
  EXPECT_NEAR(q[1], 0.1, 1e-15);
  EXPECT_NEAR(q[2], 0.6, 1e-15);
}

TEST(ExpSampleWeightsTest, SmallAlphaApproachesUniform) {
  const std::vector<double> p = {0.9, 0.1};
  const std::vector<double> q = ExpSampleWeights(p, 1e-3);
  EXPECT_LT(std::fabs(q[0] - 0.5), 1e-3);
  EXPECT_LT(std::fabs(q[1] - 0.5), 1e-3);
}

TEST(ExpSampleWeightsTest, RejectsBadInput) {
  const std::vector<double> p = {0.5, 0.5};
  try {
    ExpSampleWeights(p, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "alpha must be > 0");
  }
  const std::vector<double> negative = {0.5, -0.1};
  EXPECT_THROW(ExpSampleWeights(negative, 0.5), Error);
  const std::vector<double> zeros = {0.0, 0.0};
  EXPECT_THROW(ExpSampleWeights(zeros, 0.5), Error);
}

TEST(ExpSampleWeightsPropertyTest, NormalizedSymmetricAndOrderPreserving) {
  std::mt19937_64 gen(97);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + gen() % 8;
    std::vector<double> p(n);
    for (double& v : p) v = unit(gen) + 1e-6;
    const double alpha = 0.01 + 2.0 * unit(gen);
    const std::vector<double> q = ExpSampleWeights(p, alpha);
    double total = 0.0;
    for (double v : q) total += v;
    EXPECT_NEAR(total, 1.0, 1e-12);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (p[a] > p[b]) EXPECT_GT(q[a], q[b]);
      }
    }
    const std::vector<double> uniform(n, unit(gen) + 0.1);
    for (double v : ExpSampleWeights(uniform, alpha)) {
      EXPECT_NEAR(v, 1.0 / static_cast<double>(n), 1e-12);
    }
  }
}

// ---------------------------------------------------------------------------
// Mixture

TEST(MixtureTest, BinomialCountsWithinThreeSigma) {
  const std::vector<MonolingualCorpus> corpora = {Repeat(testing::En(), 900),
                                                  Repeat(Sw(), 100)};
  SamplingSpec spec;
  spec.epoch_size = 10000;
  spec.seed = Seed{1234};
  MixturePlan plan;
  const std::vector<Sentence> stream = BuildMixture(corpora, spec, &plan);
  ASSERT_EQ(stream.size(), 10000u);
  ASSERT_EQ(plan.languages.size(), 2u);
  EXPECT_NEAR(plan.languages[0].q, 0.63398, 1e-3);
  std::size_t en = 0;
  for (const Sentence& s : stream) en += s.lang.str() == "en";
  EXPECT_EQ(en, plan.languages[0].drawn);
  const double q = plan.languages[0].q;
  const double sigma = std::sqrt(10000 * q * (1 - q));
  EXPECT_LT(std::fabs(static_cast<double>(en) - 10000 * q), 3 * sigma);
}

TEST(MixtureTest, SingleLanguageRecyclesShuffledPool) {
  const std::vector<MonolingualCorpus> corpora = {Repeat(Sw(), 10)};
  SamplingSpec spec;
  spec.epoch_size = 25;
  const std::vector<Sentence> stream = BuildMixture(corpora, spec);
  ASSERT_EQ(stream.size(), 25u);
  // Each full pass over the pool is a permutation of it.
  for (std::size_t pass = 0; pass < 2; ++pass) {
    std::set<std::string> seen;
    for (std::size_t i = pass * 10; i < pass * 10 + 10; ++i) seen.insert(stream[i].text);
    EXPECT_EQ(seen.size(), 10u);
  }
}

TEST(MixtureTest, SameSeedSameStream) {
  const std::vector<MonolingualCorpus> corpora = {Repeat(testing::En(), 50),
                                                  Repeat(Sw(), 7)};
  SamplingSpec spec;
  spec.epoch_size = 500;
  spec.seed = Seed{9};
  const auto a = BuildMixture(corpora, spec);
  const auto b = BuildMixture(corpora, spec);
  EXPECT_EQ(a, b);
  spec.seed = Seed{10};
  EXPECT_NE(BuildMixture(corpora, spec), a);
}

TEST(MixtureTest, CodeSwitchedDataDoesNotMoveP) {
  const std::vector<MonolingualCorpus> corpora = {
      Repeat(testing::En(), 300), Repeat(testing::En(), 300, Origin::kCodeSwitched),
      Repeat(Sw(), 100)};
  SamplingSpec spec;
  spec.epoch_size = 10;
  const MixturePlan plan = PlanMixture(corpora, spec);
  EXPECT_EQ(plan.languages[0].pool_size, 600u);
  EXPECT_EQ(plan.languages[0].base_size, 300u);
  EXPECT_DOUBLE_EQ(plan.languages[0].p, 0.75);
}

TEST(MixtureTest, ExplicitP) {
  const std::vector<MonolingualCorpus> corpora = {Repeat(testing::En(), 5),
                                                  Repeat(Sw(), 5)};
  SamplingSpec spec;
  spec.epoch_size = 10;
  spec.p = {{"en", 0.9}, {"sw", 0.1}};
  const MixturePlan plan = PlanMixture(corpora, spec);
  EXPECT_NEAR(plan.languages[0].q, 0.63398, 1e-3);
  spec.p = {{"en", 1.0}};
  EXPECT_THROW(PlanMixture(corpora, spec), Error);
}

TEST(MixtureTest, Errors) {
  const std::vector<MonolingualCorpus> empty_member = {
      MonolingualCorpus(Sw(), Origin::kGold)};
  SamplingSpec spec;
  spec.epoch_size = 10;
  EXPECT_THROW(PlanMixture(empty_member, spec), Error);
  spec.epoch_size = 0;
  const std::vector<MonolingualCorpus> ok = {Repeat(Sw(), 2)};
  EXPECT_THROW(PlanMixture(ok, spec), Error);
}

TEST(MixtureTest, LineFormat) {
  const Sentence s{0, "habari \"yako\"", Sw(), Origin::kPseudo};
  EXPECT_EQ(json::parse(MixtureLine(s)),
            (json{{"text", "habari \"yako\""}, {"lang", "sw"}, {"origin", "pseudo"}}));
}

// ---------------------------------------------------------------------------
// Pseudo data and iteration

TEST(MergePseudoTest, ConcatenatesWithOrigins) {
  const MergeResult r =
      MergePseudo(Repeat(Sw(), 100), Repeat(Sw(), 400, Origin::kPseudo));
  EXPECT_EQ(r.gold, 100u);
  EXPECT_EQ(r.pseudo, 400u);
  ASSERT_EQ(r.merged.size(), 500u);
  for (std::size_t i = 0; i < 500; ++i) {
    EXPECT_EQ(r.merged[i].id, i);
    EXPECT_EQ(r.merged[i].origin, i < 100 ? Origin::kGold : Origin::kPseudo);
  }
  TempDir dir;
  WriteCorpusJsonl(r.merged, dir / "merged.jsonl");
  const MonolingualCorpus back = ReadCorpusJsonl(dir / "merged.jsonl");
  EXPECT_EQ(back, r.merged);
}

TEST(MergePseudoTest, EmptyPseudoKeepsGold) {
  const MonolingualCorpus gold = Repeat(Sw(), 3);
  EXPECT_EQ(MergePseudo(gold, MonolingualCorpus(Sw(), Origin::kPseudo)).merged, gold);
}

TEST(MergePseudoTest, Errors) {
  EXPECT_THROW(MergePseudo(Repeat(Sw(), 3), Repeat(testing::En(), 3, Origin::kPseudo)),
               Error);
  EXPECT_THROW(MergePseudo(Repeat(Sw(), 3), Repeat(Sw(), 3)), Error);
}

class PlanIterationTest : public ::testing::Test {
 protected:
  void SetUp() override {
    WriteLines({"hello"}, dir_ / "hrl.txt");
    WriteLines({"habari"}, dir_ / "lrl.txt");
    WriteLines({"habari"}, dir_ / "translations.txt");
    manifest_ = {{"hrl", {{"path", "hrl.txt"}, {"lang", "en"}}},
                 {"lrl", {{"path", "lrl.txt"}, {"lang", "sw"}}},
                 {"work_dir", "work"}};
  }

  static std::vector<std::string> Names(const IterationPlan& plan) {
    std::vector<std::string> names;
    for (const PlanStep& step : plan.steps) names.push_back(step.name);
    return names;
  }

  TempDir dir_;
  json manifest_;
};

TEST_F(PlanIterationTest, FirstRoundHasNoMerge) {
  const IterationPlan plan = PlanIteration(1, manifest_, dir_.path());
  EXPECT_EQ(Names(plan), (std::vector<std::string>{"build-mixture", "pretrain",
                                                   "finetune", "translate-hrl"}));
  ASSERT_TRUE(plan.steps[0].inputs[0].sha256.has_value());
  EXPECT_EQ(*plan.steps[0].inputs[0].sha256, Sha256File(dir_ / "hrl.txt"));
}

TEST_F(PlanIterationTest, LaterRoundMergesBeforeRebuild) {
  manifest_["translations"] = {
      {"2", {{"path", "translations.txt"},
             {"sha256", Sha256File(dir_ / "translations.txt")}}}};
  manifest_["dictionary"] = "lrl.txt";
  const IterationPlan plan = PlanIteration(2, manifest_, dir_.path());
  const auto names = Names(plan);
  const auto merge = std::find(names.begin(), names.end(), "merge-pseudo");
  const auto rebuild = std::find(names.begin(), names.end(), "build-mixture");
  ASSERT_NE(merge, names.end());
  EXPECT_LT(merge, rebuild);
  EXPECT_EQ(names.front(), "ingest-translations");
}

TEST_F(PlanIterationTest, IngestErrors) {
  EXPECT_THROW(PlanIteration(2, manifest_, dir_.path()), Error);
  manifest_["translations"] = {{"2", {{"path", "translations.txt"},
                                      {"sha256", std::string(64, '0')}}}};
  try {
    PlanIteration(2, manifest_, dir_.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("translations.txt"), std::string::npos);
  }
  EXPECT_THROW(PlanIteration(0, manifest_, dir_.path()), Error);
}

}  // namespace
}  // namespace forge
