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

#include "forge/filter.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "forge/corpus.h"
#include "forge/error.h"
#include "forge/parallel.h"
#include "nlohmann/json.hpp"
#include "testing.h"

namespace forge {
namespace {

using nlohmann::json;
using testing::En;
using testing::Sw;

ParallelCorpus Fixture() {
  const auto dir = testing::DataDir() / "filter";
  return ReadBitext(dir / "pairs.en", dir / "pairs.sw", En(), Sw());
}

json Expected() {
  return json::parse(ReadFileBytes(testing::DataDir() / "filter/expected.json"));
}

SentencePair Pair(const std::string& src, const std::string& tgt) {
  return MakeBitext({src}, {tgt}, En(), Sw())[0];
}

TEST(TokenClassTest, CategoriesDriveClassification) {
  EXPECT_TRUE(TokenizationProfile::IsNumericOnly("3000"));
  EXPECT_TRUE(TokenizationProfile::IsNumericOnly("٣٤"));
  EXPECT_FALSE(TokenizationProfile::IsNumericOnly("a1"));
  EXPECT_TRUE(TokenizationProfile::IsPunctuationOnly("?!"));
  EXPECT_TRUE(TokenizationProfile::IsPunctuationOnly("€"));
  EXPECT_TRUE(TokenizationProfile::IsNumericOrPunctuation("20%"));
  EXPECT_FALSE(TokenizationProfile::IsNumericOrPunctuation("20km"));
  EXPECT_TRUE(TokenizationProfile::ContainsLetter("\xC3\xA9"));
  EXPECT_EQ(TokenizationProfile::CountedTokens("We have 3,000 books , 20 %"), 3u);
}

TEST(FilterRuleTest, ShortBoundaryIsThreeCountedTokens) {
  EXPECT_EQ(FilterShort(Pair("The cat sat.", "x")), Verdict::kKeep);
  EXPECT_EQ(FilterShort(Pair("The cat.", "x y z")), Verdict::kRemove);
  EXPECT_EQ(FilterShort(Pair("The cat sat.", "x"), Side::kBoth),
            Verdict::kRemove);
}

TEST(FilterRuleTest, EmptyChecksBothSides) {
  EXPECT_EQ(FilterEmpty(Pair("", "x")), Verdict::kRemove);
  EXPECT_EQ(FilterEmpty(Pair("x", " \t")), Verdict::kRemove);
  EXPECT_EQ(FilterEmpty(Pair("x", "y")), Verdict::kKeep);
}

TEST(FilterRuleTest, NonSentenceNeedsALetter) {
  EXPECT_EQ(FilterNonSentence(Pair("❤️ ❤️ ❤️", "a")), Verdict::kRemove);
  EXPECT_EQ(FilterNonSentence(Pair("a b c", "❤️")), Verdict::kKeep);
  EXPECT_EQ(FilterNonSentence(Pair("a b c", "❤️"), Side::kBoth),
            Verdict::kRemove);
}

TEST(FilterRuleTest, IdenticalIgnoresCaseAndWhitespace) {
  EXPECT_EQ(IdentityKey("Jesus  Christ"), "jesuschrist");
  EXPECT_EQ(FilterIdentical(Pair("Praise the Lord.", "praise the lord.")),
            Verdict::kRemove);
  EXPECT_EQ(FilterIdentical(Pair("a1 b2 c3", "a1 b2 c3 d4")), Verdict::kKeep);
}

TEST(DetokenizeTest, FrozenRules) {
  EXPECT_EQ(Detokenize("The book is on the table ."), "The book is on the table.");
  EXPECT_EQ(Detokenize("He did n't go"), "He didn't go");
  EXPECT_EQ(Detokenize("She said \" hello \" to me ."),
            "She said \"hello\" to me.");
  EXPECT_EQ(Detokenize("( This is a test )"), "(This is a test)");
  EXPECT_EQ(Detokenize("The children ' s books"), "The children's books");
  EXPECT_EQ(Detokenize("it 's 20 % more !"), "it's 20% more!");
  EXPECT_EQ(Detokenize("  spaced   out  "), "spaced out");
  EXPECT_EQ(Detokenize(""), "");
}

TEST(RunFiltersTest, SourceSideFixture) {
  const json expected = Expected()["source"];
  const auto [kept, report] = RunFilters(Fixture());
  EXPECT_EQ(json(report.removed_by_rule), expected["removed_by_rule"]);
  EXPECT_EQ(json(report.removed_ids), expected["removed_ids"]);
  ASSERT_EQ(kept.size(), expected["survivors"].size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const json& row = expected["survivors"][i];
    EXPECT_EQ(kept[i].id, row[0].get<SentenceId>());
    EXPECT_EQ(kept[i].source.text, row[1].get<std::string>());
    EXPECT_EQ(kept[i].target.text, row[2].get<std::string>());
  }
  EXPECT_EQ(report.input_pairs, report.output_pairs + report.removed_total());
}

TEST(RunFiltersTest, BothSidesFixture) {
  const json expected = Expected()["both"];
  const auto [kept, report] = RunFilters(Fixture(), {Side::kBoth});
  EXPECT_EQ(json(report.removed_by_rule), expected["removed_by_rule"]);
  std::vector<SentenceId> ids;
  for (const SentencePair& pair : kept.pairs()) ids.push_back(pair.id);
  EXPECT_EQ(json(ids), expected["survivor_ids"]);
}

TEST(RunFiltersTest, CleanCorpusPassesThrough) {
  const ParallelCorpus corpus =
      MakeBitext({"One two three.", "Four five six."},
                 {"Moja mbili tatu.", "Nne tano sita."}, En(), Sw());
  const auto [kept, report] = RunFilters(corpus);
  EXPECT_EQ(kept, corpus);
  for (const auto& [rule, count] : report.removed_by_rule) EXPECT_EQ(count, 0u);
}

TEST(RunFiltersTest, PairIsChargedToEarliestRule) {
  // Short and identical at once.
  const ParallelCorpus corpus = MakeBitext({"Hi there"}, {"hi there"}, En(), Sw());
  const auto [kept, report] = RunFilters(corpus);
  EXPECT_EQ(report.removed_by_rule.at("short"), 1u);
  EXPECT_EQ(report.removed_by_rule.at("identical"), 0u);
}

TEST(RunFiltersTest, OutputIndependentOfThreadCount) {
  std::mt19937_64 gen(5);
  const std::vector<std::string> vocab = {"a", "b", "the", ".", "3", "%", "(", ")",
                                          "ndiyo", "n't", "\""};
  std::vector<std::string> src;
  std::vector<std::string> tgt;
  for (int i = 0; i < 2000; ++i) {
    src.push_back(testing::RandomSentence(gen, vocab, gen() % 7));
    tgt.push_back(testing::RandomSentence(gen, vocab, gen() % 7));
  }
  const ParallelCorpus corpus = MakeBitext(src, tgt, En(), Sw());
  SetThreadCount(1);
  const auto serial = RunFilters(corpus);
  SetThreadCount(6);
  const auto parallel = RunFilters(corpus);
  SetThreadCount(1);
  EXPECT_EQ(serial.first, parallel.first);
  EXPECT_EQ(json(serial.second), json(parallel.second));
}

class FilterPropertyTest : public ::testing::Test {
 protected:
  ParallelCorpus RandomCorpus(std::mt19937_64& gen, std::size_t n) {
    std::vector<std::string> src;
    std::vector<std::string> tgt;
    for (std::size_t i = 0; i < n; ++i) {
      src.push_back(testing::RandomSentence(gen, vocab_, gen() % 6));
      tgt.push_back(gen() % 5 == 0 ? src.back()
                                   : testing::RandomSentence(gen, vocab_, gen() % 6));
    }
    return MakeBitext(src, tgt, En(), Sw());
  }

  const std::vector<std::string> vocab_ = {
      "Kitabu", "book", "3", "12.5", ",", ".", "(", ")", "\"", "'", "s",
      "n't", "%", "❤️", "٣", "?", "Maji", "the", "x"};
};

TEST_F(FilterPropertyTest, ConservationAndFixedPoint) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 50; ++trial) {
    for (Side side : {Side::kSource, Side::kBoth}) {
      const auto [kept, report] = RunFilters(RandomCorpus(gen, 40), {side});
      EXPECT_EQ(report.input_pairs, kept.size() + report.removed_total());
      for (const SentencePair& pair : kept.pairs()) {
        EXPECT_EQ(FilterEmpty(pair), Verdict::kKeep);
        EXPECT_EQ(FilterShort(pair, side), Verdict::kKeep);
        EXPECT_EQ(FilterNonSentence(pair, side), Verdict::kKeep);
        EXPECT_EQ(FilterIdentical(pair), Verdict::kKeep);
      }
      // A second pass removes nothing.
      const auto again = RunFilters(kept, {side});
      EXPECT_EQ(again.second.removed_total(), 0u);
    }
  }
}

TEST_F(FilterPropertyTest, SurvivorsIndependentOfCorpusOrder) {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 20; ++trial) {
    const ParallelCorpus corpus = RandomCorpus(gen, 50);
    std::vector<std::string> src;
    std::vector<std::string> tgt;
    std::vector<std::size_t> order(corpus.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), gen);
    for (std::size_t i : order) {
      src.push_back(corpus[i].source.text);
      tgt.push_back(corpus[i].target.text);
    }
    auto survivors = [](const ParallelCorpus& c) {
      std::multiset<std::pair<std::string, std::string>> out;
      const ParallelCorpus kept = RunFilters(c).first;
      for (const SentencePair& p : kept.pairs()) {
        out.emplace(p.source.text, p.target.text);
      }
      return out;
    };
    EXPECT_EQ(survivors(corpus), survivors(MakeBitext(src, tgt, En(), Sw())));
  }
}

TEST_F(FilterPropertyTest, DetokenizeIsIdempotent) {
  std::mt19937_64 gen(29);
  for (int trial = 0; trial < 5000; ++trial) {
    const std::string text = testing::RandomSentence(gen, vocab_, gen() % 12);
    const std::string once = Detokenize(text);
    ASSERT_EQ(Detokenize(once), once) << "input: " << text;
  }
}

TEST(SideTest, ParsesNames) {
  EXPECT_EQ(ParseSide("source"), Side::kSource);
  EXPECT_EQ(ParseSide("both"), Side::kBoth);
  EXPECT_THROW(ParseSide("target"), Error);
}

}  // namespace
}  // namespace forge
