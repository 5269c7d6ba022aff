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

#include "forge/metrics.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "forge/corpus.h"
#include "forge/error.h"
#include "nlohmann/json.hpp"
#include "testing.h"

namespace forge {
namespace {

// Reference values below were produced once with an independent
// implementation of the standard scorers (BLEU: intl tokenizer, exp
// smoothing; chrF: orders 1..6, beta 2, whitespace excluded).
constexpr double kTol = 1e-9;

std::vector<std::string> Lines(const std::string& name) {
  return ReadLines(testing::DataDir() / "metrics" / name);
}

std::vector<std::string> RandomCorpus(std::mt19937_64& gen, std::size_t n) {
  const std::vector<std::string> vocab = {"kitabu", "vitabu", "the", "Cat", ",",
                                          "3,000", "jana", "(", "mwalimu", "$5"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(testing::RandomSentence(gen, vocab, 1 + gen() % 12));
  }
  return out;
}

TEST(IntlTokenizeTest, FrozenOutputs) {
  EXPECT_EQ(IntlTokenize("The cat sat on the mat, didn't it?"),
            "The cat sat on the mat , didn ' t it ?");
  EXPECT_EQ(IntlTokenize("Prices rose 5% to $12.50 (approx.) in 2020."),
            "Prices rose 5 % to $ 12.50 ( approx . ) in 2020.");
  EXPECT_EQ(IntlTokenize("3,000 vitabu."), "3,000 vitabu .");
  EXPECT_EQ(IntlTokenize("«Habari»—jana"), "« Habari » — jana");
  EXPECT_EQ(IntlTokenize("a  b\tc"), "a b c");
}

TEST(BleuTest, CommittedFixture) {
  const BleuScore s = Bleu(Lines("hyp.txt"), Lines("ref.txt"));
  EXPECT_NEAR(s.score, 45.55896625567924, kTol);
  EXPECT_NEAR(s.brevity_penalty, 0.9682566771439106, kTol);
  EXPECT_EQ(s.hyp_len, 31u);
  EXPECT_EQ(s.ref_len, 32u);
  EXPECT_EQ(s.stats.correct, (std::array<uint64_t, 4>{26, 18, 10, 5}));
  EXPECT_EQ(s.stats.total, (std::array<uint64_t, 4>{31, 28, 25, 22}));
  const std::array<double, 4> precisions = {83.87096774193549, 64.28571428571429,
                                            40.0, 22.727272727272727};
  for (std::size_t n = 0; n < 4; ++n) {
    EXPECT_NEAR(100.0 * s.precisions[n], precisions[n], kTol);
  }
}

TEST(BleuTest, RandomCorpusFixture) {
  const BleuScore s = Bleu(Lines("random_hyp.txt"), Lines("random_ref.txt"));
  EXPECT_NEAR(s.score, 23.28867307559831, kTol);
  EXPECT_NEAR(s.brevity_penalty, 0.9098166392335066, kTol);
  EXPECT_EQ(s.stats.correct, (std::array<uint64_t, 4>{620, 275, 113, 23}));
  EXPECT_EQ(s.stats.total, (std::array<uint64_t, 4>{656, 596, 541, 488}));
  EXPECT_EQ(s.hyp_len, 656u);
  EXPECT_EQ(s.ref_len, 718u);
}

TEST(BleuTest, ExpSmoothing) {
  const BleuScore s = Bleu({"a b c d e"}, {"b a d c e"});
  EXPECT_NEAR(s.score, 15.97357760615681, kTol);
  EXPECT_NEAR(s.precisions[1], 0.125, kTol);
  EXPECT_NEAR(s.precisions[2], 1.0 / 12, kTol);
  EXPECT_NEAR(s.precisions[3], 0.0625, kTol);
}

TEST(BleuTest, ShortHypothesisAndNoMatches) {
  const BleuScore short_hyp = Bleu({"the cat"}, {"the cat sat on the mat"});
  EXPECT_EQ(short_hyp.score, 0.0);
  EXPECT_NEAR(short_hyp.brevity_penalty, 0.1353352832366127, kTol);
  EXPECT_EQ(Bleu({"x y z"}, {"a b c"}).score, 0.0);
}

TEST(BleuTest, ScoreRecomputesFromFields) {
  std::mt19937_64 gen(101);
  for (int trial = 0; trial < 50; ++trial) {
    const auto hyp = RandomCorpus(gen, 20);
    const auto ref = RandomCorpus(gen, 20);
    const BleuScore s = Bleu(hyp, ref);
    double log_sum = 0.0;
    for (double p : s.precisions) log_sum += p > 0 ? std::log(p) : -9999999999.0;
    EXPECT_NEAR(s.score, 100.0 * s.brevity_penalty * std::exp(log_sum / 4), 1e-9);
    EXPECT_GT(s.brevity_penalty, 0.0);
    EXPECT_LE(s.brevity_penalty, 1.0);
  }
}

TEST(BleuTest, Errors) {
  EXPECT_THROW(Bleu({"a"}, {"a", "b"}), Error);
  EXPECT_THROW(Bleu({}, {}), Error);
}

TEST(ChrfTest, CommittedFixtures) {
  EXPECT_NEAR(Chrf(Lines("hyp.txt"), Lines("ref.txt")).score, 67.09199244272102, kTol);
  EXPECT_NEAR(Chrf(Lines("random_hyp.txt"), Lines("random_ref.txt")).score,
              51.218405122199464, kTol);
  EXPECT_NEAR(Chrf({"the cat"}, {"the cat sat on the mat"}).score, 27.25331540542631,
              kTol);
}

TEST(ChrfTest, WhitespaceOption) {
  ChrfOptions options;
  options.include_whitespace = true;
  EXPECT_NEAR(Chrf({"the cat sat"}, {"the cats at"}, options).score,
              58.62433862433862, kTol);
  // Whitespace is ignored by default, so these two are identical.
  EXPECT_EQ(Chrf({"the cat sat"}, {"the cats at"}).score, 100.0);
}

TEST(ChrfTest, DisjointAndErrors) {
  EXPECT_EQ(Chrf({"xyz"}, {"abc"}).score, 0.0);
  EXPECT_THROW(Chrf({"a"}, {}), Error);
}

TEST(MetricsPropertyTest, SelfScoreIsHundred) {
  std::mt19937_64 gen(103);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = RandomCorpus(gen, 1 + gen() % 30);
    EXPECT_DOUBLE_EQ(Bleu(x, x).score, 100.0);
    EXPECT_DOUBLE_EQ(Chrf(x, x).score, 100.0);
  }
}

TEST(MetricsPropertyTest, SegmentOrderInvariant) {
  std::mt19937_64 gen(107);
  for (int trial = 0; trial < 30; ++trial) {
    auto hyp = RandomCorpus(gen, 25);
    auto ref = RandomCorpus(gen, 25);
    const double bleu = Bleu(hyp, ref).score;
    const double chrf = Chrf(hyp, ref).score;
    std::vector<std::size_t> order(hyp.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), gen);
    std::vector<std::string> h2;
    std::vector<std::string> r2;
    for (std::size_t i : order) {
      h2.push_back(hyp[i]);
      r2.push_back(ref[i]);
    }
    EXPECT_EQ(Bleu(h2, r2).score, bleu);
    EXPECT_EQ(Chrf(h2, r2).score, chrf);
  }
}

TEST(MetricsPropertyTest, AppendingUnrelatedTokenNeverRaisesMatches) {
  std::mt19937_64 gen(109);
  for (int trial = 0; trial < 30; ++trial) {
    const auto hyp = RandomCorpus(gen, 20);
    const auto ref = RandomCorpus(gen, 20);
    std::vector<std::string> longer;
    for (const auto& h : hyp) longer.push_back(h + " qqqzzz");
    const BleuScore a = Bleu(hyp, ref);
    const BleuScore b = Bleu(longer, ref);
    for (std::size_t n = 0; n < kBleuMaxOrder; ++n) {
      EXPECT_LE(b.stats.correct[n], a.stats.correct[n]);
    }
    const ChrfScore ca = Chrf(hyp, ref);
    const ChrfScore cb = Chrf(longer, ref);
    for (std::size_t n = 0; n < kChrfOrder; ++n) {
      EXPECT_LE(cb.stats.match[n], ca.stats.match[n]);
    }
  }
}

TEST(MetricsTest, JsonCarriesSignature) {
  const nlohmann::json bleu = Bleu({"a b"}, {"a b"});
  EXPECT_NE(bleu["signature"].get<std::string>().find("tok:intl"), std::string::npos);
  const nlohmann::json chrf = Chrf({"a b"}, {"a b"});
  EXPECT_NE(chrf["signature"].get<std::string>().find("nc:6"), std::string::npos);
}

}  // namespace
}  // namespace forge
