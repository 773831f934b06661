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

#include "pega/trainer.hpp"

#include <cmath>
#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "pega/errors.hpp"
#include "pega/pipeline.hpp"
#include "pega/synth.hpp"

namespace pega {
namespace {

// Users in block b interact with every item of block b.
InteractionStore block_store(std::size_t users, std::size_t items) {
  InteractionStore s;
  for (std::size_t u = 0; u < users; ++u) s.users.intern("u" + std::to_string(u));
  for (std::size_t i = 0; i < items; ++i) s.items.intern("i" + std::to_string(i));
  s.sync_sizes();
  for (std::size_t u = 0; u < users; ++u) {
    for (std::size_t i = 0; i < items; ++i) {
      if ((u < users / 2) == (i < items / 2)) s.add_user_item(Index(u), Index(i));
    }
  }
  return s;
}

TrainConfig small_config() {
  TrainConfig c;
  c.latent_dim = 8;
  c.learning_rate = 0.01;
  c.batch_size = 64;
  c.user_epochs = 30;
  c.group_epochs = 30;
  c.attention_hidden = 16;
  c.patience = 0;
  return c;
}

TEST(Adam, ZeroGradientDecaysMoments) {
  std::vector<double> p = {1.0, -2.0}, g = {0.5, 0.5};
  OptimizerState st;
  std::vector<std::span<double>> ps = {p};
  std::vector<std::span<const double>> gs = {g};
  adam_step(ps, gs, st);
  const std::vector<double> before = p;
  const auto m = st.first_moment[0], v = st.second_moment[0];
  std::vector<double> zero = {0.0, 0.0};
  std::vector<std::span<const double>> zs = {zero};
  adam_step(ps, zs, st);
  EXPECT_NEAR(st.first_moment[0][0], 0.9 * m[0], 1e-18);
  EXPECT_NEAR(st.second_moment[0][0], 0.999 * v[0], 1e-18);
  // The decayed first moment still moves the parameter; a state that has
  // never seen a gradient does not.
  OptimizerState fresh;
  std::vector<double> q = {3.0};
  std::vector<std::span<double>> qs = {q};
  std::vector<double> z1 = {0.0};
  std::vector<std::span<const double>> z1s = {z1};
  adam_step(qs, z1s, fresh);
  EXPECT_EQ(q[0], 3.0);
  EXPECT_NE(p, before);
}

TEST(Adam, FirstStepIsSignScaled) {
  std::vector<double> p = {0.0, 0.0}, g = {4.0, -1e-3};
  OptimizerState st;
  st.learning_rate = 0.01;
  std::vector<std::span<double>> ps = {p};
  std::vector<std::span<const double>> gs = {g};
  adam_step(ps, gs, st);
  EXPECT_NEAR(p[0], -0.01 * 4.0 / (4.0 + 1e-8), 1e-15);
  EXPECT_NEAR(p[1], 0.01 * 1e-3 / (1e-3 + 1e-8), 1e-15);
}

TEST(Adam, ConstantGradientStepTendsToLearningRate) {
  std::vector<double> p = {0.0}, g = {0.37};
  OptimizerState st;
  st.learning_rate = 0.002;
  std::vector<std::span<double>> ps = {p};
  std::vector<std::span<const double>> gs = {g};
  double last = 0.0;
  for (int i = 0; i < 5000; ++i) {
    last = p[0];
    adam_step(ps, gs, st);
  }
  EXPECT_NEAR(last - p[0], 0.002, 1e-9);
}

TEST(Adam, MismatchedBlocksRejected) {
  std::vector<double> p = {0.0}, g = {1.0, 2.0};
  OptimizerState st;
  std::vector<std::span<double>> ps = {p};
  std::vector<std::span<const double>> gs = {g};
  EXPECT_THROW(adam_step(ps, gs, st), PreconditionError);
}

TEST(NegativeSampling, DegenerateCatalogs) {
  std::mt19937_64 rng(1);
  std::vector<Index> all(10);
  for (Index i = 0; i < 10; ++i) all[i] = i;
  EXPECT_TRUE(sample_negatives(all, 10, 5, rng).empty());
  auto forced = sample_negatives({0}, 3, 2, rng);
  std::sort(forced.begin(), forced.end());
  EXPECT_EQ(forced, (std::vector<Index>{1, 2}));
}

TEST(NegativeSampling, DistinctEligibleAndRoughlyUniform) {
  std::mt19937_64 rng(2);
  for (const std::vector<Index>& known :
       {std::vector<Index>{1, 4, 7}, std::vector<Index>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}}) {
    std::map<Index, int> counts;
    const int draws = 20000;
    for (int d = 0; d < draws; ++d) {
      const auto s = sample_negatives(known, 16, 3, rng);
      ASSERT_EQ(s.size(), 3u);
      EXPECT_EQ(std::set<Index>(s.begin(), s.end()).size(), 3u);
      for (Index i : s) {
        EXPECT_FALSE(contains_sorted(known, i));
        ++counts[i];
      }
    }
    const double eligible = 16.0 - double(known.size());
    const double expected = draws * 3 / eligible;
    for (const auto& [item, c] : counts) EXPECT_NEAR(c, expected, 0.06 * expected) << item;
    EXPECT_EQ(counts.size(), std::size_t(eligible));
  }
}

TEST(Stage1, ZeroEpochsKeepsInitialization) {
  const InteractionStore s = block_store(20, 20);
  TrainConfig c = small_config();
  c.user_epochs = 0;
  const Stage1Result a = train_stage1(s, c);
  EXPECT_TRUE(a.loss_history.empty());
  const double mean = a.base.users.mean();
  const double sd = std::sqrt((a.base.users.array() - mean).square().mean());
  EXPECT_NEAR(mean, 0.0, 0.03);
  EXPECT_NEAR(sd, c.init_stddev, 0.02);
  EXPECT_EQ(a.propagated, propagate(a.base, s, c.gcn_layers));
  c.user_epochs = 3;
  const Stage1Result b = train_stage1(s, c);
  EXPECT_FALSE(b.base == a.base);
}

TEST(Stage1, PlantedBlocksLossDecreasesAndRunsAreIdentical) {
  for (std::size_t n : {20u, 50u}) {
    const InteractionStore s = block_store(n, n);
    const TrainConfig c = small_config();
    const Stage1Result a = train_stage1(s, c);
    ASSERT_EQ(a.loss_history.size(), 30u);
    EXPECT_LT(a.loss_history.back(), a.loss_history.front());
    const Stage1Result b = train_stage1(s, c);
    EXPECT_EQ(a.loss_history, b.loss_history);
    EXPECT_EQ(a.base, b.base);
  }
}

TEST(Stage1, DivergenceNamesLearningRate) {
  const InteractionStore s = block_store(20, 20);
  TrainConfig c = small_config();
  c.learning_rate = 1e200;
  try {
    train_stage1(s, c);
    FAIL() << "expected divergence";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("learning rate"), std::string::npos) << e.what();
  }
}

TEST(Stage1, EmptyInputRejected) {
  InteractionStore s;
  EXPECT_THROW(train_stage1(s, small_config()), PreconditionError);
}

struct SmallRun {
  SynthData synth;
  RunData run;
  EmbeddingTable emb;
};

SmallRun small_run() {
  SynthSpec spec;
  spec.users = 120;
  spec.items = 60;
  spec.groups = 80;
  spec.clusters = 4;
  spec.seed = 3;
  SmallRun r;
  const Lexicon lex = parse_lexicon(testing::test_lexicon_path());
  r.synth = synthesize(spec, lex);
  RunConfig config;
  config.train = small_config();
  r.run = prepare_run(r.synth.store, r.synth.reviews, lex, config);
  r.emb = train_stage1(r.run.store, config.train).propagated;
  return r;
}

GroupTrainData train_data(const SmallRun& r) {
  GroupTrainData d;
  d.store = &r.run.store;
  d.embeddings = &r.emb;
  d.traits = &r.run.traits;
  d.train = r.run.split.train;
  d.validation = r.run.split.validation;
  return d;
}

TEST(Stage2, ZeroEpochsKeepsInitialParameters) {
  const SmallRun r = small_run();
  TrainConfig c = small_config();
  c.group_epochs = 0;
  const Stage2Result out = train_stage2(train_data(r), c, AggregationMode::kFull);
  const AggregatorParams init = initial_aggregator(c);
  std::vector<std::vector<double>> a, b;
  for_each_block(out.params, [&](const std::string&, std::span<const double> v) {
    a.emplace_back(v.begin(), v.end());
  });
  for_each_block(init, [&](const std::string&, std::span<const double> v) {
    b.emplace_back(v.begin(), v.end());
  });
  EXPECT_EQ(a, b);
}

TEST(Stage2, LossDecreasesEmbeddingsFrozenAndDeterministic) {
  const SmallRun r = small_run();
  const EmbeddingTable before = r.emb;
  const TrainConfig c = small_config();
  const Stage2Result a = train_stage2(train_data(r), c, AggregationMode::kFull);
  ASSERT_EQ(a.loss_history.size(), 30u);
  EXPECT_LT(a.loss_history.back(), a.loss_history.front());
  EXPECT_EQ(r.emb, before);
  const Stage2Result b = train_stage2(train_data(r), c, AggregationMode::kFull);
  EXPECT_EQ(a.loss_history, b.loss_history);
}

TEST(Stage2, EarlyStoppingRestoresBestEpoch) {
  const SmallRun r = small_run();
  TrainConfig c = small_config();
  c.patience = 2;
  const Stage2Result out = train_stage2(train_data(r), c, AggregationMode::kNoAttention);
  ASSERT_FALSE(out.validation_ndcg.empty());
  const auto best = std::max_element(out.validation_ndcg.begin(), out.validation_ndcg.end());
  EXPECT_EQ(out.best_epoch, int(best - out.validation_ndcg.begin()) + 1);
  EXPECT_LE(out.validation_ndcg.size(), std::size_t(out.best_epoch + c.patience));
}

TEST(Stage2, TiesGiveLogTwoPerTriple) {
  const SmallRun r = small_run();
  const TrainConfig c = small_config();
  const AggregatorParams p = initial_aggregator(c);
  const auto views = group_views(r.run.store, r.emb, r.run.traits);
  std::vector<Triple> batch;
  for (Index g = 0; g < 10; ++g) batch.push_back({g, g, g});
  for (AggregationMode mode : {AggregationMode::kFull, AggregationMode::kBase}) {
    EXPECT_NEAR(group_loss(p, mode, views, batch, r.emb) * double(batch.size()),
                double(batch.size()) * std::log(2.0), 1e-9);
  }
}

}  // namespace
}  // namespace pega
