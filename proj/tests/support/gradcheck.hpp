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

// Central-difference checks of the analytic group and user gradients. The
// numeric side always evaluates the loss through the oracles.

#ifndef PEGA_TESTS_SUPPORT_GRADCHECK_HPP_
#define PEGA_TESTS_SUPPORT_GRADCHECK_HPP_

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pega/aggregator.hpp"
#include "pega/gcn.hpp"

namespace pega::testing {

struct GradReport {
  double worst = 0.0;
  std::string where;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t checked = 0;
};

inline void note(GradReport& r, double analytic, double numeric, const std::string& where) {
  const double e = oracle::relative_error(analytic, numeric);
  ++r.checked;
  if (e > r.worst) {
    r.worst = e;
    r.where = where;
    r.analytic = analytic;
    r.numeric = numeric;
  }
}

/// Fourth-order central difference of `loss` in the coordinate `x`.
template <typename Loss>
double central_difference(double& x, const Loss& loss, double h = 1e-4) {
  const double saved = x;
  double f[4];
  const double steps[4] = {2 * h, h, -h, -2 * h};
  for (int i = 0; i < 4; ++i) {
    x = saved + steps[i];
    f[i] = loss();
  }
  x = saved;
  return (-f[0] + 8 * f[1] - 8 * f[2] + f[3]) / (12 * h);
}

/// One random group, one (positive, negative) pair. Checks up to `per_block`
/// random entries of every parameter block plus every member and item
/// coordinate.
inline GradReport check_group_gradients(std::mt19937_64& rng, AggregationMode mode,
                                        int latent, std::size_t members,
                                        std::size_t per_block, int hidden = 6,
                                        int layers = 2) {
  AggregatorParams p = AggregatorParams::random(latent, hidden, layers, 0.3, rng);
  std::vector<TraitVector> traits;
  for (std::size_t t = 0; t < members; ++t) traits.push_back(random_traits(rng));
  RowMatrix embs = random_rows(rng, Eigen::Index(members), latent);
  Vector pos = random_rows(rng, 1, latent).row(0).transpose();
  Vector neg = random_rows(rng, 1, latent).row(0).transpose();

  GroupView view;
  for (std::size_t t = 0; t < members; ++t) view.members.push_back(Index(t));
  view.member_traits = traits;
  view.member_embs = embs;
  view.raw = raw_hyperrectangle(traits);

  AggregatorParams grad = p.zeros_like();
  RowMatrix member_grad = RowMatrix::Zero(embs.rows(), embs.cols());
  Vector pos_grad = Vector::Zero(latent), neg_grad = Vector::Zero(latent);
  BackwardOptions opt;
  opt.member_grad = &member_grad;
  opt.positive_grad = &pos_grad;
  opt.negative_grad = &neg_grad;
  group_bpr_accumulate(p, mode, view, pos, neg, grad, opt);

  std::vector<oracle::Vec> trait_vecs;
  for (const auto& t : traits) trait_vecs.push_back(as_vec(t));
  auto loss = [&] {
    return oracle::group_bpr(p, mode, rows_as_vecs(embs), trait_vecs, oracle::to_vec(pos),
                             oracle::to_vec(neg));
  };
  auto central = [&](double& x) { return central_difference(x, loss); };

  GradReport report;
  std::vector<std::pair<std::string, std::span<double>>> blocks, grads;
  for_each_block(p, [&](const std::string& n, std::span<double> v) { blocks.emplace_back(n, v); });
  for_each_block(grad, [&](const std::string& n, std::span<double> v) { grads.emplace_back(n, v); });
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    auto& values = blocks[b].second;
    std::vector<std::size_t> idx(values.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(std::min(idx.size(), per_block));
    for (std::size_t i : idx) {
      note(report, grads[b].second[i], central(values[i]), blocks[b].first);
    }
  }
  for (Eigen::Index i = 0; i < embs.size(); ++i) {
    note(report, member_grad.data()[i], central(embs.data()[i]), "members");
  }
  for (Eigen::Index i = 0; i < latent; ++i) {
    note(report, pos_grad[i], central(pos[i]), "positive");
    note(report, neg_grad[i], central(neg[i]), "negative");
  }
  return report;
}

/// Random graph of at most `nodes` nodes; checks every base-embedding entry
/// of the user loss through propagation.
inline GradReport check_user_gradients(std::mt19937_64& rng, int latent, std::size_t nodes,
                                       int layers = 3) {
  std::uniform_int_distribution<std::size_t> users_of(1, nodes - 1);
  const std::size_t users = users_of(rng);
  const std::size_t items = nodes - users;
  const InteractionStore s = random_store(rng, users, items, 0.5);
  const LightGraph graph(s, layers);
  EmbeddingTable base = EmbeddingTable::normal(users, items, latent, 0.5, rng);
  std::vector<Triple> batch;
  std::uniform_int_distribution<Index> user(0, Index(users - 1)), item(0, Index(items - 1));
  for (int b = 0; b < 4; ++b) batch.push_back({user(rng), item(rng), item(rng)});

  const BprResult r = user_bpr_loss(graph.propagate(base), batch);
  const EmbeddingTable grad = graph.backpropagate(r.grad);
  auto loss = [&] {
    return oracle::user_loss(rows_as_vecs(base.users), rows_as_vecs(base.items), s.user_items,
                             layers, batch);
  };
  GradReport report;
  for (int which = 0; which < 2; ++which) {
    RowMatrix& table = which == 0 ? base.users : base.items;
    const RowMatrix& g = which == 0 ? grad.users : grad.items;
    for (Eigen::Index i = 0; i < table.size(); ++i) {
      note(report, g.data()[i], central_difference(table.data()[i], loss),
           which == 0 ? "users" : "items");
    }
  }
  return report;
}

}  // namespace pega::testing

#endif  // PEGA_TESTS_SUPPORT_GRADCHECK_HPP_
