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
#include <vector>

#include "pega/errors.hpp"

namespace pega {

bool EmbeddingTable::all_finite() const {
  return users.allFinite() && items.allFinite();
}

EmbeddingTable EmbeddingTable::zeros(std::size_t users, std::size_t items,
                                     int dim) {
  EmbeddingTable t;
  t.users = RowMatrix::Zero(static_cast<Eigen::Index>(users), dim);
  t.items = RowMatrix::Zero(static_cast<Eigen::Index>(items), dim);
  return t;
}

EmbeddingTable EmbeddingTable::normal(std::size_t users, std::size_t items,
                                      int dim, double stddev,
                                      std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  EmbeddingTable t = zeros(users, items, dim);
  for (Eigen::Index i = 0; i < t.users.size(); ++i) t.users.data()[i] = dist(rng);
  for (Eigen::Index i = 0; i < t.items.size(); ++i) t.items.data()[i] = dist(rng);
  return t;
}

LightGraph::LightGraph(const InteractionStore& interactions, int layers)
    : layers_(layers),
      num_users_(static_cast<Eigen::Index>(interactions.num_users())),
      num_items_(static_cast<Eigen::Index>(interactions.num_items())) {
  if (layers < 0) throw PreconditionError("layer count must be >= 0");
  const Eigen::Index n = num_users_ + num_items_;
  std::vector<double> degree(static_cast<std::size_t>(n), 0.0);
  for (std::size_t u = 0; u < interactions.user_items.size(); ++u) {
    for (Index item : interactions.user_items[u]) {
      degree[u] += 1.0;
      degree[num_users_ + item] += 1.0;
    }
  }
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(2 * interactions.user_item_count());
  for (std::size_t u = 0; u < interactions.user_items.size(); ++u) {
    for (Index item : interactions.user_items[u]) {
      const Eigen::Index i = num_users_ + item;
      const double w = 1.0 / std::sqrt(degree[u] * degree[i]);
      entries.emplace_back(static_cast<Eigen::Index>(u), i, w);
      entries.emplace_back(i, static_cast<Eigen::Index>(u), w);
    }
  }
  adjacency_.resize(n, n);
  adjacency_.setFromTriplets(entries.begin(), entries.end());
}

EmbeddingTable LightGraph::propagate(const EmbeddingTable& base) const {
  if (base.users.rows() != num_users_ || base.items.rows() != num_items_) {
    throw ShapeError("embedding table does not match the interaction graph");
  }
  if (layers_ == 0) return base;
  const int d = base.dim();
  RowMatrix layer(num_users_ + num_items_, d);
  layer << base.users, base.items;
  RowMatrix sum = layer;
  for (int k = 0; k < layers_; ++k) {
    layer = adjacency_ * layer;
    sum += layer;
  }
  sum /= static_cast<double>(layers_ + 1);
  EmbeddingTable out;
  out.users = sum.topRows(num_users_);
  out.items = sum.bottomRows(num_items_);
  return out;
}

EmbeddingTable propagate(const EmbeddingTable& base,
                         const InteractionStore& interactions, int layers) {
  return LightGraph(interactions, layers).propagate(base);
}

double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

BprResult user_bpr_loss(const EmbeddingTable& embeddings,
                        std::span<const Triple> batch) {
  BprResult result;
  result.grad = EmbeddingTable::zeros(embeddings.users.rows(),
                                      embeddings.items.rows(), embeddings.dim());
  for (const Triple& t : batch) {
    const auto u = embeddings.users.row(t.subject);
    const auto vp = embeddings.items.row(t.positive);
    const auto vn = embeddings.items.row(t.negative);
    const double margin = u.dot(vp) - u.dot(vn);
    result.loss -= log_sigmoid(margin);
    // d/dmargin of -log sigma(margin) = -sigma(-margin)
    const double coef = -std::exp(log_sigmoid(-margin));
    result.grad.users.row(t.subject) += coef * (vp - vn);
    result.grad.items.row(t.positive) += coef * u;
    result.grad.items.row(t.negative) -= coef * u;
  }
  return result;
}

}  // namespace pega
