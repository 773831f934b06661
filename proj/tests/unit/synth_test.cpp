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

#include "pega/synth.hpp"

#include <algorithm>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "pega/errors.hpp"

namespace pega {
namespace {

const Lexicon& lexicon() {
  static const Lexicon lex = parse_lexicon(testing::test_lexicon_path());
  return lex;
}

SynthSpec small(double dominance) {
  SynthSpec s;
  s.users = 120;
  s.items = 60;
  s.groups = 60;
  s.clusters = 4;
  s.dominance = dominance;
  s.seed = 5;
  return s;
}

std::size_t count_dominant(const SynthData& d) {
  return std::size_t(std::count_if(d.labels.begin(), d.labels.end(),
                                   [](const GroupLabel& l) { return l.dominant; }));
}

TEST(Synth, FullDominanceWithoutEnthusiastUsesLeaderItemsOnly) {
  SynthSpec spec = small(1.0);
  spec.enthusiast_share = 0.0;
  const SynthData d = synthesize(spec, lexicon());
  ASSERT_EQ(count_dominant(d), spec.groups);
  for (std::size_t g = 0; g < d.labels.size(); ++g) {
    const Index leader = d.store.users.at(d.labels[g].leader);
    const auto& members = d.store.group_members[g];
    EXPECT_NE(std::find(members.begin(), members.end(), leader), members.end());
    EXPECT_TRUE(d.assertive[leader]);
    for (Index item : d.store.group_items[g]) {
      EXPECT_TRUE(contains_sorted(d.store.user_items[leader], item));
    }
  }
}

TEST(Synth, EnthusiastItemsComeFromOneOtherMember) {
  const SynthData d = synthesize(small(1.0), lexicon());
  std::size_t borrowed = 0;
  for (std::size_t g = 0; g < d.labels.size(); ++g) {
    const Index leader = d.store.users.at(d.labels[g].leader);
    for (Index item : d.store.group_items[g]) {
      if (contains_sorted(d.store.user_items[leader], item)) continue;
      ++borrowed;
      const auto& members = d.store.group_members[g];
      EXPECT_TRUE(std::any_of(members.begin(), members.end(), [&](Index m) {
        return contains_sorted(d.store.user_items[m], item);
      }));
    }
  }
  EXPECT_GT(borrowed, 0u);
}

TEST(Synth, HalfDominanceSplitsLabels) {
  SynthSpec spec = small(0.5);
  spec.groups = 300;
  const SynthData d = synthesize(spec, lexicon());
  EXPECT_EQ(count_dominant(d), 150u);
  for (const auto& l : d.labels) EXPECT_EQ(l.leader.empty(), !l.dominant);
}

TEST(Synth, DeterministicGivenSeed) {
  const SynthData a = synthesize(small(0.8), lexicon());
  const SynthData b = synthesize(small(0.8), lexicon());
  EXPECT_EQ(a.store.user_items, b.store.user_items);
  EXPECT_EQ(a.store.group_members, b.store.group_members);
  EXPECT_EQ(a.store.group_items, b.store.group_items);
  EXPECT_EQ(a.reviews.reviews, b.reviews.reviews);
  SynthSpec other = small(0.8);
  other.seed = 6;
  EXPECT_NE(synthesize(other, lexicon()).store.group_members, a.store.group_members);
}

TEST(Synth, ReviewsPassTheCorpusFilter) {
  const SynthData d = synthesize(small(0.8), lexicon());
  EXPECT_EQ(filter_users(d.reviews).size(), d.store.num_users());
}

TEST(Synth, WritesAndReadsLabels) {
  const SynthData d = synthesize(small(0.8), lexicon());
  const auto dir = testing::scratch_dir("synth_write");
  write_synth(dir, d);
  const auto labels = read_labels(dir / "labels.tsv");
  ASSERT_EQ(labels.size(), d.labels.size());
  for (std::size_t g = 0; g < labels.size(); ++g) {
    EXPECT_EQ(labels[g].dominant, d.labels[g].dominant);
    EXPECT_EQ(labels[g].leader, d.labels[g].leader);
  }
}

TEST(Synth, InvalidSpecsRejected) {
  SynthSpec s = small(1.5);
  EXPECT_THROW(synthesize(s, lexicon()), PreconditionError);
  s = small(0.5);
  s.enthusiast_share = -0.1;
  EXPECT_THROW(synthesize(s, lexicon()), PreconditionError);
}

}  // namespace
}  // namespace pega
