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

#include "pega/gcn.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"

namespace pega {
namespace {

InteractionStore two_node_store() {
  InteractionStore s;
  s.users.intern("a");
  s.items.intern("b");
  s.sync_sizes();
  s.add_user_item(0, 0);
  return s;
}

TEST(Propagate, ZeroLayersIsIdentity) {
  std::mt19937_64 rng(1);
  const InteractionStore s = testing::random_store(rng, 5, 6, 0.4);
  const EmbeddingTable base = EmbeddingTable::normal(5, 6, 4, 1.0, rng);
  EXPECT_EQ(propagate(base, s, 0), base);
}

TEST(Propagate, TwoNodeGraphHandValue) {
  EmbeddingTable base = EmbeddingTable::zeros(1, 1, 2);
  base.users.row(0) << 1.0, 2.0;
  base.items.row(0) << 3.0, 5.0;
  const EmbeddingTable out = propagate(base, two_node_store(), 1);
  EXPECT_NEAR(out.users(0, 0), 2.0, 1e-15);
  EXPECT_NEAR(out.users(0, 1), 3.5, 1e-15);
  EXPECT_NEAR(out.items(0, 0), 2.0, 1e-15);
  EXPECT_NEAR(out.items(0, 1), 3.5, 1e-15);
}

TEST(Propagate, IsolatedUserKeepsLayerZeroShare) {
  InteractionStore s = two_node_store();
  s.users.intern("lonely");
  s.sync_sizes();
  EmbeddingTable base = EmbeddingTable::zeros(2, 1, 2);
  base.users.row(1) << 4.0, -2.0;
  for (int layers : {1, 3}) {
    const EmbeddingTable out = propagate(base, s, layers);
    EXPECT_NEAR(out.users(1, 0), 4.0 / (layers + 1), 1e-15);
    EXPECT_NEAR(out.users(1, 1), -2.0 / (layers + 1), 1e-15);
  }
}

TEST(Propagate, MatchesDenseOracle) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const InteractionStore s = testing::random_store(rng, 4, 5, 0.5);
    const EmbeddingTable base = EmbeddingTable::normal(4, 5, 3, 1.0, rng);
    const EmbeddingTable out = propagate(base, s, 3);
    const auto want = oracle::propagate(testing::rows_as_vecs(base.users),
                                        testing::rows_as_vecs(base.items), s.user_items, 3);
    for (int u = 0; u < 4; ++u) {
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(out.users(u, k), want[u][k], 1e-12);
    }
    for (int i = 0; i < 5; ++i) {
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(out.items(i, k), want[4 + i][k], 1e-12);
    }
  }
}

TEST(Propagate, IsLinear) {
  std::mt19937_64 rng(9);
  const InteractionStore s = testing::random_store(rng, 6, 7, 0.4);
  const LightGraph graph(s, 3);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    const EmbeddingTable a = EmbeddingTable::normal(6, 7, 4, 1.0, rng);
    const EmbeddingTable b = EmbeddingTable::normal(6, 7, 4, 1.0, rng);
    const double x = coef(rng), y = coef(rng);
    EmbeddingTable mix = a;
    mix.users = x * a.users + y * b.users;
    mix.items = x * a.items + y * b.items;
    const EmbeddingTable pa = graph.propagate(a), pb = graph.propagate(b);
    const EmbeddingTable pm = graph.propagate(mix);
    EXPECT_TRUE(pm.users.isApprox(x * pa.users + y * pb.users, 1e-12));
    EXPECT_TRUE(pm.items.isApprox(x * pa.items + y * pb.items, 1e-12));
  }
}

TEST(Score, DotProducts) {
  EXPECT_EQ(user_item_score(Vector::Zero(2), Vector::Zero(2)), 0.0);
  EXPECT_EQ(user_item_score(Vector::Unit(2, 0), Vector::Unit(2, 1)), 0.0);
  EXPECT_EQ(user_item_score(Eigen::Vector2d(1, 2), Eigen::Vector2d(3, 4)), 11.0);
}

TEST(UserBpr, TiesGiveLogTwoPerTriple) {
  const EmbeddingTable emb = EmbeddingTable::zeros(2, 3, 4);
  const std::vector<Triple> batch = {{0, 1, 2}, {1, 0, 2}, {0, 2, 1}};
  EXPECT_NEAR(user_bpr_loss(emb, batch).loss, 3.0 * std::log(2.0), 1e-12);
}

TEST(UserBpr, EmptyBatchIsZero) {
  const EmbeddingTable emb = EmbeddingTable::zeros(2, 3, 4);
  const BprResult r = user_bpr_loss(emb, {});
  EXPECT_EQ(r.loss, 0.0);
  EXPECT_TRUE(r.grad.users.isZero(0.0));
  EXPECT_TRUE(r.grad.items.isZero(0.0));
}

TEST(UserBpr, HandValueAndLimit) {
  EmbeddingTable emb = EmbeddingTable::zeros(1, 2, 1);
  emb.users(0, 0) = 1.0;
  emb.items(0, 0) = 1.0;
  const Triple t{0, 0, 1};
  EXPECT_NEAR(user_bpr_loss(emb, std::span(&t, 1)).loss, 0.31326168751822286, 1e-12);
  emb.items(0, 0) = 1e6;
  EXPECT_NEAR(user_bpr_loss(emb, std::span(&t, 1)).loss, 0.0, 1e-12);
  EXPECT_NEAR(log_sigmoid(-800.0), -800.0, 1e-9);
}

TEST(UserBpr, GradientThroughPropagationMatchesFiniteDifferences) {
  std::mt19937_64 rng(21);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const InteractionStore s = testing::random_store(rng, 4, 5, 0.5);
    const LightGraph graph(s, 2);
    EmbeddingTable base = EmbeddingTable::normal(4, 5, 3, 0.5, rng);
    std::vector<Triple> batch;
    std::uniform_int_distribution<Index> user(0, 3), item(0, 4);
    for (int b = 0; b < 6; ++b) batch.push_back({user(rng), item(rng), item(rng)});

    const BprResult r = user_bpr_loss(graph.propagate(base), batch);
    const EmbeddingTable grad = graph.backpropagate(r.grad);
    auto loss_at = [&](const EmbeddingTable& e) {
      return oracle::user_loss(testing::rows_as_vecs(e.users), testing::rows_as_vecs(e.items),
                               s.user_items, 2, batch);
    };
    const double h = 1e-6;
    for (RowMatrix* table : {&base.users, &base.items}) {
      const RowMatrix& g = table == &base.users ? grad.users : grad.items;
      for (Eigen::Index i = 0; i < table->size(); ++i) {
        const double saved = table->data()[i];
        table->data()[i] = saved + h;
        const double up = loss_at(base);
        table->data()[i] = saved - h;
        const double down = loss_at(base);
        table->data()[i] = saved;
        worst = std::max(worst, oracle::relative_error(g.data()[i], (up - down) / (2 * h)));
      }
    }
  }
  EXPECT_LT(worst, 1e-4);
}

}  // namespace
}  // namespace pega
