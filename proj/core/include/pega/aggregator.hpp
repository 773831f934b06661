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

// Personality-guided preference aggregation.
//
// For group g, member t and candidate item i:
//
//   alpha(g,t)  = H . mlp(tanh(Wq [W_c c || W_o o] + Wk P_t + b))
//   beta(i,t)   = v_i . (w [u_t || P_t])
//   gamma(g,t,i) = softmax_t(alpha)_t + lambda * softmax_t(beta)_t
//   score(g,i)  = (sum_t gamma(g,t,i) u_t) . v_i
//
// The MLP stacks `layers` Tanh layers of width `hidden`; the first is the
// query/key fusion above, the rest are hidden x hidden. gamma is not
// renormalized, so the weights sum to 1 + lambda in full mode.

#ifndef PEGA_AGGREGATOR_HPP_
#define PEGA_AGGREGATOR_HPP_

#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pega/gcn.hpp"
#include "pega/groupspace.hpp"
#include "pega/types.hpp"

namespace pega {

/// Full model and the three ablations.
enum class AggregationMode {
  kFull,          // alpha + lambda * beta
  kNoAttention,   // lambda * beta
  kNoPreference,  // alpha
  kBase,          // 1 for every member
};

std::string_view mode_name(AggregationMode mode);
/// Accepts full, nATT, nPRE, BASE. Throws PreconditionError otherwise.
AggregationMode parse_mode(std::string_view name);

inline constexpr int kDefaultHidden = 100;

struct AttentionParams {
  Matrix query_weight;                // hidden x 200
  Matrix key_weight;                  // hidden x 100
  Vector bias;                        // hidden
  std::vector<Matrix> hidden_weights; // layers-1 of hidden x hidden
  std::vector<Vector> hidden_biases;  // layers-1 of hidden
  Vector output;                      // hidden

  int hidden() const { return static_cast<int>(bias.size()); }
  int layers() const { return static_cast<int>(hidden_weights.size()) + 1; }

  static AttentionParams zeros(int hidden, int layers);
  /// Uniform in +-1/sqrt(fan_in) per matrix.
  static AttentionParams random(int hidden, int layers, std::mt19937_64& rng);
};

struct FineTuneParams {
  Matrix bilinear;      // latent x (latent + 100)
  double lambda = 0.3;  // fixed, >= 0

  static FineTuneParams zeros(int latent, double lambda);
  static FineTuneParams random(int latent, double lambda, std::mt19937_64& rng);
};

struct AggregatorParams {
  ProjectionParams projection;
  AttentionParams attention;
  FineTuneParams fine_tune;

  int latent() const { return static_cast<int>(fine_tune.bilinear.rows()); }

  static AggregatorParams random(int latent, int hidden, int layers,
                                 double lambda, std::mt19937_64& rng);
  /// Same shapes, all zero; used as a gradient accumulator.
  AggregatorParams zeros_like() const;
};

using BlockVisitor = std::function<void(const std::string&, std::span<double>)>;
using ConstBlockVisitor =
    std::function<void(const std::string&, std::span<const double>)>;

/// Visits every trainable block in a fixed order with a stable name.
void for_each_block(AggregatorParams& params, const BlockVisitor& fn);
void for_each_block(const AggregatorParams& params, const ConstBlockVisitor& fn);

/// Max-subtracted softmax. Empty input yields empty output.
std::vector<double> softmax(std::span<const double> scores);

/// Raw attention scores alpha(g, t), one per member.
std::vector<double> attention_scores(const Vector& query,
                                     std::span<const TraitVector> member_traits,
                                     const AttentionParams& params);

/// Normalized attention weights. `query` is the projected 200-dim rectangle.
std::vector<double> personality_attention(
    const Vector& query, std::span<const TraitVector> member_traits,
    const AttentionParams& params);

/// Raw preference scores beta(i, t).
std::vector<double> preference_scores(const RowMatrix& member_embs,
                                      std::span<const TraitVector> member_traits,
                                      const Vector& item,
                                      const FineTuneParams& params);

std::vector<double> preference_weight(const RowMatrix& member_embs,
                                      std::span<const TraitVector> member_traits,
                                      const Vector& item,
                                      const FineTuneParams& params);

/// alpha + lambda * beta. Throws PreconditionError on length mismatch.
std::vector<double> combine_weights(std::span<const double> alpha,
                                    std::span<const double> beta, double lambda);

/// gamma under an ablation mode. `alpha`/`beta` may be empty when the mode
/// does not read them; `members` is the group size.
std::vector<double> variant_weights(AggregationMode mode,
                                    std::span<const double> alpha,
                                    std::span<const double> beta, double lambda,
                                    std::size_t members);

/// sum_t gamma_t u_t. Throws PreconditionError on length mismatch.
Vector group_embedding(const RowMatrix& member_embs,
                       std::span<const double> gamma);

inline double group_item_score(const Vector& g, const Vector& v) {
  return g.dot(v);
}

/// Inputs for one group that stay fixed while aggregator parameters train.
struct GroupView {
  std::vector<Index> members;
  RowMatrix member_embs;  // |g| x latent
  std::vector<TraitVector> member_traits;
  HyperRectangle raw;

  std::size_t size() const { return members.size(); }
};

GroupView make_group_view(std::span<const Index> members,
                          const EmbeddingTable& embeddings,
                          const TraitTable& traits);

/// Every weight the model produces for one (group, item).
struct GroupWeights {
  std::vector<double> alpha_raw;
  std::vector<double> alpha;
  std::vector<double> beta_raw;
  std::vector<double> beta;
  std::vector<double> gamma;
};

/// Softplus-mapped offset weights and their slope, valid for one parameter
/// snapshot.
struct ProjectionCache {
  explicit ProjectionCache(const ProjectionParams& params);
  Matrix offset_weight;
  Matrix offset_slope;  // sigmoid(raw) = d softplus / d raw
};

/// Forward pass of the full aggregator for inference.
class GroupScorer {
 public:
  GroupScorer(const AggregatorParams& params, AggregationMode mode)
      : params_(params), mode_(mode), cache_(params.projection) {}
  GroupScorer(AggregatorParams&&, AggregationMode) = delete;

  /// Projected rectangle as the attention query.
  Vector query(const GroupView& group) const;
  GroupWeights weights(const GroupView& group, const Vector& item) const;
  double score(const GroupView& group, const Vector& item) const;

  /// Scores every row of `items`; attention is computed once per call.
  Vector score_all(const GroupView& group, const RowMatrix& items) const;

  AggregationMode mode() const { return mode_; }

 private:
  const AggregatorParams& params_;
  AggregationMode mode_;
  ProjectionCache cache_;
};

/// Optional extras for the backward pass.
struct BackwardOptions {
  double dropout = 0.0;              // attention activations only
  std::mt19937_64* rng = nullptr;    // required when dropout > 0
  RowMatrix* member_grad = nullptr;  // |g| x latent, accumulated
  Vector* positive_grad = nullptr;   // latent, accumulated
  Vector* negative_grad = nullptr;   // latent, accumulated
  const ProjectionCache* cache = nullptr;  // recomputed when absent
};

/// Group-level BPR term -log sigma(score(g,p) - score(g,n)) for one triple.
/// Adds d loss / d params into `grad` and returns the loss.
double group_bpr_accumulate(const AggregatorParams& params,
                            AggregationMode mode, const GroupView& group,
                            const Vector& positive, const Vector& negative,
                            AggregatorParams& grad,
                            const BackwardOptions& options = {});

}  // namespace pega

#endif  // PEGA_AGGREGATOR_HPP_
