// Copyright 2026 The PEGA Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pega/lexicon.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pega/errors.hpp"

namespace pega {
namespace {

// Lexicon text with 100 categories; category 0 is "friend*".
std::string lexicon_text(int count = 100, bool duplicate = false) {
  std::ostringstream out;
  out << "# trait\tlevel\tname\tpatterns\n";
  const char tags[] = {'O', 'C', 'E', 'A', 'N'};
  int written = 0;
  for (char t : tags) {
    for (const char* level : {"High", "Low"}) {
      for (int k = 0; k < 10 && written < count; ++k, ++written) {
        std::string name = std::string(1, t) + level + std::to_string(k);
        if (duplicate && written == 1) name = "OHigh0";
        const std::string pattern =
            written == 0 ? "friend*" : "w" + std::string(1, char('a' + written % 26)) +
                                           std::string(1, char('a' + written / 26));
        out << t << '\t' << level << '\t' << name << '\t' << pattern << '\n';
      }
    }
  }
  return out.str();
}

Lexicon small_lexicon() {
  std::istringstream in(lexicon_text());
  return parse_lexicon(in);
}

TEST(LexiconParse, KeepsFileOrder) {
  const Lexicon lex = small_lexicon();
  ASSERT_EQ(lex.size(), 100u);
  EXPECT_EQ(lex.categories()[0].name, "OHigh0");
  EXPECT_EQ(lex.categories()[10].name, "OLow0");
  EXPECT_EQ(lex.categories()[99].name, "NLow9");
}

TEST(LexiconParse, RejectsNinetyNineCategories) {
  std::istringstream in(lexicon_text(99));
  EXPECT_THROW(parse_lexicon(in), StructuralError);
}

TEST(LexiconParse, RejectsDuplicateNames) {
  std::istringstream in(lexicon_text(100, true));
  EXPECT_THROW(parse_lexicon(in), StructuralError);
}

TEST(LexiconParse, MalformedLineReportsLineNumber) {
  std::string text = lexicon_text();
  text.insert(text.find('\n') + 1, "O\tHigh\tonlythree\n");
  std::istringstream in(text);
  try {
    parse_lexicon(in);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LexiconParse, ShippedTestLexiconIsValid) {
  const Lexicon lex = parse_lexicon(testing::test_lexicon_path());
  EXPECT_EQ(lex.size(), 100u);
}

TEST(LexiconMatch, PrefixPatternMatchesDerivedForms) {
  const Lexicon lex = small_lexicon();
  for (const char* word : {"friend", "friends", "friendly"}) {
    std::vector<int> hits;
    lex.match(word, hits);
    EXPECT_EQ(hits, std::vector<int>{0}) << word;
  }
  std::vector<int> hits;
  lex.match("frien", hits);
  EXPECT_TRUE(hits.empty());
}

TEST(Tokenize, LowercasesAndStripsPunctuation) {
  EXPECT_EQ(tokenize("I LOVE bagels!!"), (Tokens{"i", "love", "bagels"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_EQ(tokenize("well-known e.g. 42"), (Tokens{"well", "known", "e", "g"}));
}

TEST(CategoryTf, RelativeFrequency) {
  const Lexicon lex = small_lexicon();
  const std::string hit = lex.categories()[7].patterns[0];
  Tokens review = {hit, "x", "y", hit, "z", "q", "r", "s", "t", "u"};
  const auto tf = category_tf(review, lex);
  EXPECT_DOUBLE_EQ(tf[7], 0.2);
  for (int c = 0; c < kTraitDims; ++c) {
    if (c != 7) EXPECT_EQ(tf[c], 0.0);
  }
  EXPECT_EQ(category_tf(Tokens{}, lex), CategoryFrequencies{});
}

TEST(CategoryTf, TokenCountsForEveryMatchingCategory) {
  std::mt19937_64 rng(3);
  std::vector<Category> cats = testing::random_categories(rng);
  cats[4].patterns = {"shared*"};
  cats[60].patterns = {"sharedword"};
  const Lexicon lex(cats);
  const auto tf = category_tf(Tokens{"sharedword", "other"}, lex);
  EXPECT_DOUBLE_EQ(tf[4], 0.5);
  EXPECT_DOUBLE_EQ(tf[60], 0.5);
}

TEST(ExtractPersonality, SingleReviewIsZero) {
  const Lexicon lex = small_lexicon();
  const std::string hit = lex.categories()[7].patterns[0];
  const std::vector<Tokens> reviews = {{hit, "a", "b", "c", "d"}};
  EXPECT_TRUE(extract_personality(reviews, lex).isZero(0.0));
}

TEST(ExtractPersonality, TwoReviewsHandValue) {
  const Lexicon lex = small_lexicon();
  const std::string hit = lex.categories()[3].patterns[0];
  Tokens a(10, "filler");
  a[0] = hit;
  const std::vector<Tokens> reviews = {a, Tokens(10, "filler")};
  const TraitVector p = extract_personality(reviews, lex);
  EXPECT_NEAR(p[3], 0.5 * 0.1 * std::log(2.0), 1e-15);
  EXPECT_EQ(p[5], 0.0);
}

TEST(ExtractPersonality, ZeroReviewsIsPreconditionError) {
  const Lexicon lex = small_lexicon();
  EXPECT_THROW(extract_personality(std::vector<Tokens>{}, lex), PreconditionError);
}

TEST(ExtractPersonality, MatchesNestedLoopOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto cats = testing::random_categories(rng);
    const Lexicon lex(cats);
    std::uniform_int_distribution<int> n_reviews(1, 5);
    std::vector<Tokens> reviews(n_reviews(rng));
    for (auto& r : reviews) r = testing::random_review(rng, 50);
    const TraitVector got = extract_personality(reviews, lex);
    const auto want = oracle::personality(reviews, cats);
    for (int c = 0; c < kTraitDims; ++c) {
      const double denom = std::max(std::abs(want[c]), 1e-300);
      EXPECT_LE(std::abs(got[c] - want[c]) / denom, 1e-12) << "trial " << trial << " c " << c;
    }
  }
}

TEST(TraitLevelSum, SumsTheTenCategories) {
  const Lexicon lex = small_lexicon();
  TraitVector p = TraitVector::Zero();
  for (int c = 0; c < kTraitDims; ++c) p[c] = c;
  // Extraversion High occupies rows 40..49 in file order.
  EXPECT_DOUBLE_EQ(trait_level_sum(p, lex, Trait::kExtraversion, Level::kHigh), 445.0);
}

}  // namespace
}  // namespace pega
