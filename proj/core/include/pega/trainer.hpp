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

// Two-stage training: user-level BPR on the graph embeddings, then
// group-level BPR on the aggregator with the embeddings frozen. Both stages
// use Adam and uniform negative sampling.

#ifndef PEGA_TRAINER_HPP_
#define PEGA_TRAINER_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "pega/aggregator.hpp"
#include "pega/gcn.hpp"
#include "pega/interactions.hpp"

namespace pega {

struct TrainConfig {
  double learning_rate = 0.001;
  double dropout = 0.0;
  int negatives = 5;
  int latent_dim = 256;
  int gcn_layers = 3;
  int attention_layers = 2;
  int attention_hidden = kDefaultHidden;
  double lambda = 0.3;
  int user_epochs = 30;
  int group_epochs = 30;
  int batch_size = 1024;
  double init_stddev = 0.1;
  double l2 = 0.0;
  /// Stop stage two after this many validation checks without an N@10
  /// improvement and restore the best snapshot. 0 disables.
  int patience = 10;
  std::uint64_t seed = 42;
};

struct OptimizerState {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  std::vector<std::vector<double>> first_moment;   // one per block
  std::vector<std::vector<double>> second_moment;  // one per block, >= 0
};

/// One bias-corrected Adam update over parallel lists of parameter and
/// gradient blocks. Moments are allocated on the first call.
void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads,
               OptimizerState& state);

/// Up to `k` distinct items outside `interacted` (sorted), uniformly drawn.
/// Returns every eligible item when fewer than `k` exist.
std::vector<Index> sample_negatives(const std::vector<Index>& interacted,
                                    std::size_t num_items, int k,
                                    std::mt19937_64& rng);

struct Stage1Result {
  EmbeddingTable base;       // trained layer-0 embeddings
  EmbeddingTable propagated; // after light graph convolution
  std::vector<double> loss_history;  // mean loss per triple, per epoch
};

/// Throws PreconditionError on empty interactions and NumericError on a
/// non-finite loss.
Stage1Result train_stage1(const InteractionStore& interactions,
                          const TrainConfig& config);

struct GroupTrainData {
  const InteractionStore* store = nullptr;
  const EmbeddingTable* embeddings = nullptr;  // frozen, propagated
  const TraitTable* traits = nullptr;
  std::vector<GroupItem> train;
  std::vector<GroupItem> validation;
};

struct Stage2Result {
  AggregatorParams params;
  std::vector<double> loss_history;     // mean loss per triple, per epoch
  std::vector<double> validation_ndcg;  // N@10 after each epoch, if any
  int best_epoch = 0;                   // 1-based; 0 when never validated
};

AggregatorParams initial_aggregator(const TrainConfig& config);

Stage2Result train_stage2(const GroupTrainData& data, const TrainConfig& config,
                          AggregationMode mode);

/// Mean group-level BPR loss over fixed triples; used for diagnostics.
double group_loss(const AggregatorParams& params, AggregationMode mode,
                  const std::vector<GroupView>& views,
                  std::span<const Triple> triples, const EmbeddingTable& emb);

}  // namespace pega

#endif  // PEGA_TRAINER_HPP_
