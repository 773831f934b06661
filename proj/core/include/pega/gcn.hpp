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

// Light graph convolution over the user-item bipartite graph and the
// user-level BPR objective used to train it.

#ifndef PEGA_GCN_HPP_
#define PEGA_GCN_HPP_

#include <random>
#include <span>

#include <Eigen/SparseCore>

#include "pega/interactions.hpp"
#include "pega/types.hpp"

namespace pega {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One embedding row per user / item.
struct EmbeddingTable {
  RowMatrix users;
  RowMatrix items;

  int dim() const { return static_cast<int>(users.cols()); }
  bool all_finite() const;

  static EmbeddingTable zeros(std::size_t users, std::size_t items, int dim);
  /// N(0, stddev^2) entries, users first then items.
  static EmbeddingTable normal(std::size_t users, std::size_t items, int dim,
                               double stddev, std::mt19937_64& rng);

  bool operator==(const EmbeddingTable& other) const {
    return users == other.users && items == other.items;
  }
};

/// Precomputed D^{-1/2} A D^{-1/2} over users followed by items.
class LightGraph {
 public:
  LightGraph(const InteractionStore& interactions, int layers);

  /// Mean of the layer-0..layers embeddings. Degree-0 nodes receive no
  /// messages, so they keep only their layer-0 share.
  EmbeddingTable propagate(const EmbeddingTable& base) const;

  /// Vector-Jacobian product of propagate. The normalized adjacency is
  /// symmetric, so this is propagate applied to the gradient.
  EmbeddingTable backpropagate(const EmbeddingTable& grad_out) const {
    return propagate(grad_out);
  }

  int layers() const { return layers_; }

 private:
  Eigen::SparseMatrix<double, Eigen::RowMajor> adjacency_;
  int layers_;
  Eigen::Index num_users_;
  Eigen::Index num_items_;
};

EmbeddingTable propagate(const EmbeddingTable& base,
                         const InteractionStore& interactions, int layers);

inline double user_item_score(const Eigen::Ref<const Vector>& u,
                              const Eigen::Ref<const Vector>& v) {
  return u.dot(v);
}

/// (subject, positive item, negative item); the subject is a user or a group.
struct Triple {
  Index subject = 0;
  Index positive = 0;
  Index negative = 0;
};

/// log(sigmoid(x)), stable for large |x|.
double log_sigmoid(double x);

struct BprResult {
  double loss = 0.0;
  EmbeddingTable grad;  // w.r.t. the embeddings the scores were taken from
};

/// -sum log sigma(u.v_p - u.v_n) over the batch, with its gradient.
BprResult user_bpr_loss(const EmbeddingTable& embeddings,
                        std::span<const Triple> batch);

}  // namespace pega

#endif  // PEGA_GCN_HPP_
