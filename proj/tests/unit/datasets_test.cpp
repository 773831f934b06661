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

#include "pega/datasets.hpp"

#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "builders.hpp"
#include "pega/errors.hpp"

namespace pega {
namespace {

std::string text(std::size_t n) { return std::string(n, 'x'); }

TEST(FilterUsers, CountsQualifyingReviewsOnly) {
  ReviewCorpus c;
  for (int r = 0; r < 4; ++r) c.add("four", text(1500));
  for (int r = 0; r < 5; ++r) c.add("five", text(1000));
  for (int r = 0; r < 5; ++r) c.add("six_ok", text(1200));
  c.add("six_ok", text(999));
  for (int r = 0; r < 4; ++r) c.add("six_short", text(1200));
  for (int r = 0; r < 2; ++r) c.add("six_short", text(999));
  EXPECT_EQ(filter_users(c), (std::vector<std::string>{"five", "six_ok"}));
  EXPECT_EQ(filter_corpus(c).size(), 2u);
}

CheckinRecord at(std::string user, std::int64_t t) { return {std::move(user), "bar", t, 4.0}; }

TEST(Cocheckin, WindowAndFriendship) {
  FriendGraph f;
  f.add("a", "b");
  const std::vector<CheckinRecord> close = {at("a", 0), at("b", 600)};
  const GroupSet g = build_cocheckin_groups(close, f);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g.members[0], (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(g.items[0], (std::vector<std::string>{"bar"}));

  const std::vector<CheckinRecord> far = {at("a", 0), at("b", 1200)};
  EXPECT_EQ(build_cocheckin_groups(far, f).size(), 0u);

  const std::vector<CheckinRecord> strangers = {at("a", 0), at("c", 0)};
  EXPECT_EQ(build_cocheckin_groups(strangers, f).size(), 0u);
  CocheckinOptions loose;
  loose.require_friends = false;
  EXPECT_EQ(build_cocheckin_groups(strangers, f, loose).size(), 1u);
}

TEST(Cocheckin, RepeatedEventsMergeIntoOneGroup) {
  FriendGraph f;
  f.add("a", "b");
  std::vector<CheckinRecord> c = {at("a", 0), at("b", 100)};
  c.push_back({"a", "cafe", 5000, 4.0});
  c.push_back({"b", "cafe", 5300, 4.0});
  const GroupSet g = build_cocheckin_groups(c, f);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g.items[0].size(), 2u);
}

TEST(Cocheckin, RandomWorldsPassRescan) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const testing::World w = testing::random_world(rng);
    const GroupSet g = build_cocheckin_groups(w.checkins, w.friends);
    std::string why;
    EXPECT_TRUE(testing::cocheckin_groups_valid(g, w, 900, &why)) << why;
    EXPECT_GT(g.size(), 0u);
  }
}

TEST(Pearson, Examples) {
  const std::vector<double> a = {1, 2, 3}, b = {3, 2, 1}, c = {1, 2, 4};
  EXPECT_NEAR(*pearson_correlation(a, a), 1.0, 1e-12);
  EXPECT_NEAR(*pearson_correlation(a, b), -1.0, 1e-12);
  EXPECT_NEAR(*pearson_correlation(a, c), 0.9819, 1e-4);
  const std::vector<double> flat = {2, 2, 2}, one = {1};
  EXPECT_FALSE(pearson_correlation(a, flat));
  EXPECT_FALSE(pearson_correlation(one, one));
}

TEST(Pearson, SymmetricAndBounded) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> rating(1, 5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> a(6), b(6);
    for (auto& x : a) x = rating(rng);
    for (auto& x : b) x = rating(rng);
    const auto ab = pearson_correlation(a, b), ba = pearson_correlation(b, a);
    ASSERT_EQ(ab.has_value(), ba.has_value());
    if (!ab) continue;
    EXPECT_EQ(*ab, *ba);
    EXPECT_GE(*ab, -1.0 - 1e-12);
    EXPECT_LE(*ab, 1.0 + 1e-12);
  }
}

TEST(Similarity, PairBelowThresholdNeverGrouped) {
  // PCC(x, y) for these vectors is about 0.26; the last entry is a shared
  // favourite both rate 5.
  const std::vector<double> x = {5, 4, 2, 5, 3, 2, 4, 5}, y = {1, 3, 2, 2, 2, 2, 2, 5};
  const double pcc = *pearson_correlation(x, y);
  ASSERT_GT(pcc, 0.25);
  ASSERT_LE(pcc, 0.27);
  Ratings r;
  for (std::size_t i = 0; i < x.size(); ++i) {
    r["x"]["i" + std::to_string(i)] = x[i];
    r["y"]["i" + std::to_string(i)] = y[i];
  }
  ASSERT_NEAR(*user_similarity(r["x"], r["y"]), pcc, 1e-12);
  SimilarityOptions o;
  o.num_groups = 5;
  o.size = {2.0, 2, 2};
  EXPECT_EQ(build_similarity_groups(r, o).size(), 0u);
}

TEST(Similarity, ConsensusRequiresEveryRatingAboveThree) {
  Ratings r;
  r["a"] = {{"p", 4}, {"q", 4}};
  r["b"] = {{"p", 4}, {"q", 5}};
  r["c"] = {{"p", 3}, {"q", 4}};
  const std::vector<std::string> members = {"a", "b", "c"};
  EXPECT_EQ(consensus_items(r, members), (std::vector<std::string>{"q"}));
}

TEST(Similarity, RandomWorldsPassExhaustivePccCheck) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const testing::World w = testing::random_world(rng);
    const Ratings ratings = ratings_from_checkins(w.checkins);
    SimilarityOptions o;
    o.num_groups = 30;
    o.seed = std::uint64_t(trial);
    const GroupSet g = build_similarity_groups(ratings, o);
    EXPECT_GT(g.size(), 0u);
    std::string why;
    EXPECT_TRUE(testing::similarity_groups_valid(g, ratings, 0.27, &why)) << why;
    const GroupSet again = build_similarity_groups(ratings, o);
    EXPECT_EQ(g.members, again.members);
    EXPECT_EQ(g.items, again.items);
  }
}

TEST(RandomGroups, DeterministicAndSharedRule) {
  std::mt19937_64 rng(13);
  const testing::World w = testing::random_world(rng);
  const Ratings ratings = ratings_from_checkins(w.checkins);
  RandomGroupOptions o;
  o.num_groups = 20;
  o.size = {3.0, 2, 4};
  const GroupSet a = build_random_groups(ratings, o), b = build_random_groups(ratings, o);
  EXPECT_EQ(a.members, b.members);
  EXPECT_EQ(a.items, b.items);
  for (std::size_t g = 0; g < a.size(); ++g) {
    std::string why;
    EXPECT_TRUE(testing::consensus_ok(a, ratings, g, &why)) << why;
  }
  o.size = {1.0, 1, 1};
  EXPECT_THROW(build_random_groups(ratings, o), PreconditionError);
}

TEST(GroupSize, RespectsBoundsAndMean) {
  std::mt19937_64 rng(5);
  const GroupSizeSpec spec{5.5, 2, 1000};
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const std::size_t s = sample_group_size(spec, rng);
    ASSERT_GE(s, 2u);
    sum += double(s);
  }
  EXPECT_NEAR(sum / n, 5.5, 0.15);
}

std::vector<GroupItem> pairs(std::size_t groups, std::size_t per_group) {
  std::vector<GroupItem> out;
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t i = 0; i < per_group; ++i) out.push_back({Index(g), Index(i)});
  }
  return out;
}

TEST(Split, EightOneOne) {
  const Split s = split_interactions(pairs(2, 5), SplitSpec{});
  EXPECT_EQ(s.train.size(), 8u);
  EXPECT_EQ(s.validation.size(), 1u);
  EXPECT_EQ(s.test.size(), 1u);
}

TEST(Split, SingleInteractionGroupsStayInTrain) {
  const Split s = split_interactions(pairs(10, 1), SplitSpec{});
  EXPECT_EQ(s.train.size(), 10u);
  EXPECT_TRUE(s.test.empty());
}

TEST(Split, NoLeakageAndDeterministic) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<GroupItem> all;
    std::uniform_int_distribution<int> count(1, 9);
    for (Index g = 0; g < 30; ++g) {
      for (int i = count(rng); i > 0; --i) all.push_back({g, Index(i)});
    }
    SplitSpec spec;
    spec.seed = std::uint64_t(trial);
    const Split s = split_interactions(all, spec);
    EXPECT_EQ(s.train.size() + s.validation.size() + s.test.size(), all.size());
    const std::set<GroupItem> train(s.train.begin(), s.train.end());
    for (const auto& p : s.test) EXPECT_FALSE(train.count(p));
    for (const auto& p : s.validation) EXPECT_FALSE(train.count(p));
    for (const auto& p : s.test) {
      EXPECT_TRUE(std::find_if(s.train.begin(), s.train.end(), [&](const GroupItem& t) {
                    return t.group == p.group;
                  }) != s.train.end());
    }
    const Split again = split_interactions(all, spec);
    EXPECT_EQ(s.test, again.test);
  }
}

TEST(Split, FoldsPartition) {
  const auto all = pairs(7, 6);
  SplitSpec spec;
  const auto folds = kfold(all, spec);
  ASSERT_EQ(folds.size(), 5u);
  std::multiset<GroupItem> seen;
  for (const auto& f : folds) seen.insert(f.begin(), f.end());
  EXPECT_EQ(seen, std::multiset<GroupItem>(all.begin(), all.end()));
  std::multiset<GroupItem> tested;
  for (int k = 0; k < 5; ++k) {
    const Split s = fold_split(folds, k);
    tested.insert(s.test.begin(), s.test.end());
    EXPECT_EQ(s.train.size() + s.validation.size() + s.test.size(), all.size());
  }
  EXPECT_EQ(tested, seen);
  EXPECT_THROW(fold_split(folds, 5), PreconditionError);
}

TEST(Split, BadProportionsRejected) {
  SplitSpec spec;
  spec.train = 0.7;
  EXPECT_THROW(split_interactions(pairs(1, 3), spec), PreconditionError);
}

}  // namespace
}  // namespace pega
