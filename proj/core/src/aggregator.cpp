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

#include "pega/aggregator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "pega/errors.hpp"

namespace pega {
namespace {

void fill_uniform(Matrix& m, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
}

void fill_uniform(Vector& v, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dist(rng);
}

std::span<double> span_of(Matrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}
std::span<double> span_of(Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

Matrix traits_as_columns(std::span<const TraitVector> traits) {
  Matrix keys(kTraitDims, static_cast<Eigen::Index>(traits.size()));
  for (std::size_t t = 0; t < traits.size(); ++t) {
    keys.col(static_cast<Eigen::Index>(t)) = traits[t];
  }
  return keys;
}

// u'_t = u_t || P_t, one row per member.
Matrix extended_members(const RowMatrix& member_embs,
                        std::span<const TraitVector> traits) {
  const Eigen::Index m = member_embs.rows();
  const Eigen::Index d = member_embs.cols();
  Matrix ext(m, d + kTraitDims);
  ext.leftCols(d) = member_embs;
  for (Eigen::Index t = 0; t < m; ++t) {
    ext.row(t).tail(kTraitDims) = traits[static_cast<std::size_t>(t)].transpose();
  }
  return ext;
}

struct AttentionTrace {
  Matrix keys;                    // 100 x m
  std::vector<Matrix> tanh_out;   // per layer, hidden x m
  std::vector<Matrix> masks;      // per layer, empty without dropout
  std::vector<Matrix> acts;       // tanh_out .* mask
  std::vector<double> raw;
};

AttentionTrace attention_forward(const AttentionParams& p, const Vector& query,
                                 std::span<const TraitVector> traits,
                                 double dropout, std::mt19937_64* rng) {
  if (query.size() != p.query_weight.cols()) {
    throw ShapeError("attention query has the wrong width");
  }
  AttentionTrace tr;
  tr.keys = traits_as_columns(traits);
  const Eigen::Index m = tr.keys.cols();
  const Vector shared = p.query_weight * query + p.bias;
  Matrix z = p.key_weight * tr.keys;
  z.colwise() += shared;

  const bool drop = dropout > 0.0 && rng != nullptr;
  std::bernoulli_distribution keep(1.0 - dropout);
  const double scale = drop ? 1.0 / (1.0 - dropout) : 1.0;

  for (int layer = 0; layer < p.layers(); ++layer) {
    if (layer > 0) {
      z = p.hidden_weights[layer - 1] * tr.acts.back();
      z.colwise() += p.hidden_biases[layer - 1];
    }
    tr.tanh_out.push_back(z.array().tanh().matrix());
    if (drop) {
      Matrix mask(z.rows(), m);
      for (Eigen::Index i = 0; i < mask.size(); ++i) {
        mask.data()[i] = keep(*rng) ? scale : 0.0;
      }
      tr.acts.push_back(tr.tanh_out.back().cwiseProduct(mask));
      tr.masks.push_back(std::move(mask));
    } else {
      tr.acts.push_back(tr.tanh_out.back());
    }
  }
  const Vector raw = tr.acts.back().transpose() * p.output;
  tr.raw.assign(raw.data(), raw.data() + raw.size());
  return tr;
}

// Accumulates parameter gradients for d loss / d alpha_raw; returns
// d loss / d query.
Vector attention_backward(const AttentionParams& p, const Vector& query,
                          const AttentionTrace& tr,
                          std::span<const double> d_raw, AttentionParams& g) {
  const Eigen::Index m = tr.keys.cols();
  Eigen::Map<const Vector> d_alpha(d_raw.data(), m);
  g.output += tr.acts.back() * d_alpha;
  Matrix d_act = p.output * d_alpha.transpose();  // hidden x m
  for (int layer = p.layers() - 1; layer >= 0; --layer) {
    Matrix d_t = tr.masks.empty() ? d_act : d_act.cwiseProduct(tr.masks[layer]);
    const Matrix& t = tr.tanh_out[layer];
    Matrix d_z = d_t.array() * (1.0 - t.array().square());
    if (layer > 0) {
      g.hidden_weights[layer - 1] += d_z * tr.acts[layer - 1].transpose();
      g.hidden_biases[layer - 1] += d_z.rowwise().sum();
      d_act = p.hidden_weights[layer - 1].transpose() * d_z;
    } else {
      g.key_weight += d_z * tr.keys.transpose();
      const Vector d_shared = d_z.rowwise().sum();
      g.bias += d_shared;
      g.query_weight += d_shared * query.transpose();
      return p.query_weight.transpose() * d_shared;
    }
  }
  return Vector::Zero(query.size());
}

// d loss / d softmax-input given d loss / d softmax-output.
std::vector<double> softmax_backward(std::span<const double> probs,
                                     std::span<const double> d_probs) {
  double dot = 0.0;
  for (std::size_t t = 0; t < probs.size(); ++t) dot += probs[t] * d_probs[t];
  std::vector<double> d(probs.size());
  for (std::size_t t = 0; t < probs.size(); ++t) {
    d[t] = probs[t] * (d_probs[t] - dot);
  }
  return d;
}

bool uses_attention(AggregationMode mode) {
  return mode == AggregationMode::kFull || mode == AggregationMode::kNoPreference;
}
bool uses_preference(AggregationMode mode) {
  return mode == AggregationMode::kFull || mode == AggregationMode::kNoAttention;
}

}  // namespace

std::string_view mode_name(AggregationMode mode) {
  switch (mode) {
    case AggregationMode::kFull: return "full";
    case AggregationMode::kNoAttention: return "nATT";
    case AggregationMode::kNoPreference: return "nPRE";
    case AggregationMode::kBase: return "BASE";
  }
  return "?";
}

AggregationMode parse_mode(std::string_view name) {
  if (name == "full" || name == "PEGA") return AggregationMode::kFull;
  if (name == "nATT") return AggregationMode::kNoAttention;
  if (name == "nPRE") return AggregationMode::kNoPreference;
  if (name == "BASE") return AggregationMode::kBase;
  throw PreconditionError("unknown aggregation mode '" + std::string(name) +
                          "' (expected full, nATT, nPRE or BASE)");
}

AttentionParams AttentionParams::zeros(int hidden, int layers) {
  if (layers < 1) throw PreconditionError("attention needs at least one layer");
  AttentionParams p;
  p.query_weight = Matrix::Zero(hidden, kQueryDims);
  p.key_weight = Matrix::Zero(hidden, kTraitDims);
  p.bias = Vector::Zero(hidden);
  for (int l = 1; l < layers; ++l) {
    p.hidden_weights.push_back(Matrix::Zero(hidden, hidden));
    p.hidden_biases.push_back(Vector::Zero(hidden));
  }
  p.output = Vector::Zero(hidden);
  return p;
}

AttentionParams AttentionParams::random(int hidden, int layers,
                                        std::mt19937_64& rng) {
  AttentionParams p = zeros(hidden, layers);
  // The fused first layer sees query and key together.
  const double fused = 1.0 / std::sqrt(double(kQueryDims + kTraitDims));
  const double inner = 1.0 / std::sqrt(double(hidden));
  fill_uniform(p.query_weight, fused, rng);
  fill_uniform(p.key_weight, fused, rng);
  fill_uniform(p.bias, fused, rng);
  for (int l = 1; l < layers; ++l) {
    fill_uniform(p.hidden_weights[l - 1], inner, rng);
    fill_uniform(p.hidden_biases[l - 1], inner, rng);
  }
  fill_uniform(p.output, inner, rng);
  return p;
}

FineTuneParams FineTuneParams::zeros(int latent, double lambda) {
  if (lambda < 0.0) throw PreconditionError("lambda must be non-negative");
  FineTuneParams p;
  p.bilinear = Matrix::Zero(latent, latent + kTraitDims);
  p.lambda = lambda;
  return p;
}

FineTuneParams FineTuneParams::random(int latent, double lambda,
                                      std::mt19937_64& rng) {
  FineTuneParams p = zeros(latent, lambda);
  fill_uniform(p.bilinear, 1.0 / std::sqrt(double(latent + kTraitDims)), rng);
  return p;
}

AggregatorParams AggregatorParams::random(int latent, int hidden, int layers,
                                          double lambda, std::mt19937_64& rng) {
  AggregatorParams p;
  p.projection = ProjectionParams::random(rng);
  p.attention = AttentionParams::random(hidden, layers, rng);
  p.fine_tune = FineTuneParams::random(latent, lambda, rng);
  return p;
}

AggregatorParams AggregatorParams::zeros_like() const {
  AggregatorParams z;
  z.projection.center_weight = Matrix::Zero(kTraitDims, kTraitDims);
  z.projection.offset_weight_raw = Matrix::Zero(kTraitDims, kTraitDims);
  z.attention = AttentionParams::zeros(attention.hidden(), attention.layers());
  z.fine_tune = FineTuneParams::zeros(latent(), fine_tune.lambda);
  return z;
}

void for_each_block(AggregatorParams& p, const BlockVisitor& fn) {
  fn("projection.center", span_of(p.projection.center_weight));
  fn("projection.offset_raw", span_of(p.projection.offset_weight_raw));
  fn("attention.query", span_of(p.attention.query_weight));
  fn("attention.key", span_of(p.attention.key_weight));
  fn("attention.bias", span_of(p.attention.bias));
  for (std::size_t l = 0; l < p.attention.hidden_weights.size(); ++l) {
    const std::string idx = std::to_string(l + 1);
    fn("attention.hidden" + idx + ".weight",
       span_of(p.attention.hidden_weights[l]));
    fn("attention.hidden" + idx + ".bias", span_of(p.attention.hidden_biases[l]));
  }
  fn("attention.output", span_of(p.attention.output));
  fn("finetune.bilinear", span_of(p.fine_tune.bilinear));
}

void for_each_block(const AggregatorParams& p, const ConstBlockVisitor& fn) {
  for_each_block(const_cast<AggregatorParams&>(p),
                 [&](const std::string& name, std::span<double> values) {
                   fn(name, std::span<const double>(values));
                 });
}

std::vector<double> softmax(std::span<const double> scores) {
  if (scores.empty()) return {};
  const double top = *std::max_element(scores.begin(), scores.end());
  std::vector<double> out(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(scores[i] - top);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

std::vector<double> attention_scores(const Vector& query,
                                     std::span<const TraitVector> member_traits,
                                     const AttentionParams& params) {
  if (member_traits.empty()) {
    throw PreconditionError("attention needs at least one member");
  }
  return attention_forward(params, query, member_traits, 0.0, nullptr).raw;
}

std::vector<double> personality_attention(
    const Vector& query, std::span<const TraitVector> member_traits,
    const AttentionParams& params) {
  return softmax(attention_scores(query, member_traits, params));
}

std::vector<double> preference_scores(const RowMatrix& member_embs,
                                      std::span<const TraitVector> member_traits,
                                      const Vector& item,
                                      const FineTuneParams& params) {
  if (member_embs.rows() == 0) {
    throw PreconditionError("preference weights need at least one member");
  }
  if (member_traits.size() != static_cast<std::size_t>(member_embs.rows())) {
    throw PreconditionError("one personality per member embedding required");
  }
  const Matrix ext = extended_members(member_embs, member_traits);
  const Vector projected = params.bilinear.transpose() * item;  // w^T v
  const Vector beta = ext * projected;
  return {beta.data(), beta.data() + beta.size()};
}

std::vector<double> preference_weight(const RowMatrix& member_embs,
                                      std::span<const TraitVector> member_traits,
                                      const Vector& item,
                                      const FineTuneParams& params) {
  return softmax(preference_scores(member_embs, member_traits, item, params));
}

std::vector<double> combine_weights(std::span<const double> alpha,
                                    std::span<const double> beta,
                                    double lambda) {
  if (alpha.size() != beta.size()) {
    throw PreconditionError("alpha and beta must have equal length");
  }
  std::vector<double> gamma(alpha.size());
  for (std::size_t t = 0; t < alpha.size(); ++t) {
    gamma[t] = alpha[t] + lambda * beta[t];
  }
  return gamma;
}

std::vector<double> variant_weights(AggregationMode mode,
                                    std::span<const double> alpha,
                                    std::span<const double> beta, double lambda,
                                    std::size_t members) {
  switch (mode) {
    case AggregationMode::kFull:
      return combine_weights(alpha, beta, lambda);
    case AggregationMode::kNoAttention: {
      std::vector<double> gamma(beta.begin(), beta.end());
      for (double& g : gamma) g *= lambda;
      return gamma;
    }
    case AggregationMode::kNoPreference:
      return {alpha.begin(), alpha.end()};
    case AggregationMode::kBase:
      return std::vector<double>(members, 1.0);
  }
  throw PreconditionError("unknown aggregation mode");
}

Vector group_embedding(const RowMatrix& member_embs,
                       std::span<const double> gamma) {
  if (member_embs.rows() == 0) {
    throw PreconditionError("group embedding needs at least one member");
  }
  if (gamma.size() != static_cast<std::size_t>(member_embs.rows())) {
    throw PreconditionError("one weight per member required");
  }
  Eigen::Map<const Vector> w(gamma.data(), member_embs.rows());
  return member_embs.transpose() * w;
}

GroupView make_group_view(std::span<const Index> members,
                          const EmbeddingTable& embeddings,
                          const TraitTable& traits) {
  if (members.empty()) throw PreconditionError("group has no members");
  GroupView view;
  view.members.assign(members.begin(), members.end());
  view.member_embs.resize(static_cast<Eigen::Index>(members.size()),
                          embeddings.dim());
  view.member_traits.reserve(members.size());
  for (std::size_t t = 0; t < members.size(); ++t) {
    view.member_embs.row(static_cast<Eigen::Index>(t)) =
        embeddings.users.row(members[t]);
    view.member_traits.push_back(traits.at(members[t]));
  }
  view.raw = raw_hyperrectangle(view.member_traits);
  return view;
}

ProjectionCache::ProjectionCache(const ProjectionParams& params)
    : offset_weight(params.offset_weight()),
      offset_slope(params.offset_weight_raw.unaryExpr(
          [](double x) { return sigmoid(x); })) {}

Vector GroupScorer::query(const GroupView& group) const {
  return project(group.raw, params_.projection.center_weight,
                 cache_.offset_weight)
      .concat();
}

GroupWeights GroupScorer::weights(const GroupView& group,
                                  const Vector& item) const {
  GroupWeights w;
  if (uses_attention(mode_)) {
    w.alpha_raw = attention_scores(query(group), group.member_traits,
                                   params_.attention);
    w.alpha = softmax(w.alpha_raw);
  }
  if (uses_preference(mode_)) {
    w.beta_raw = preference_scores(group.member_embs, group.member_traits, item,
                                   params_.fine_tune);
    w.beta = softmax(w.beta_raw);
  }
  w.gamma = variant_weights(mode_, w.alpha, w.beta, params_.fine_tune.lambda,
                            group.size());
  return w;
}

double GroupScorer::score(const GroupView& group, const Vector& item) const {
  const GroupWeights w = weights(group, item);
  return group_item_score(group_embedding(group.member_embs, w.gamma), item);
}

Vector GroupScorer::score_all(const GroupView& group,
                              const RowMatrix& items) const {
  const Eigen::Index m = static_cast<Eigen::Index>(group.size());
  const double lambda = params_.fine_tune.lambda;
  // member_scores(i, t) = u_t . v_i
  const Matrix member_scores = items * group.member_embs.transpose();
  Vector alpha = Vector::Zero(m);
  if (uses_attention(mode_)) {
    const auto a = softmax(attention_scores(query(group), group.member_traits,
                                            params_.attention));
    alpha = Eigen::Map<const Vector>(a.data(), m);
  }
  if (!uses_preference(mode_)) {
    if (mode_ == AggregationMode::kBase) return member_scores.rowwise().sum();
    return member_scores * alpha;
  }
  // beta_raw(i, t) = v_i . (w u'_t)
  const Matrix ext = extended_members(group.member_embs, group.member_traits);
  const Matrix projected = ext * params_.fine_tune.bilinear.transpose();
  const Matrix beta_raw = items * projected.transpose();
  Vector out(items.rows());
  for (Eigen::Index i = 0; i < items.rows(); ++i) {
    const double top = beta_raw.row(i).maxCoeff();
    const Eigen::RowVectorXd e = (beta_raw.row(i).array() - top).exp().matrix();
    const Eigen::RowVectorXd beta = e / e.sum();
    double s = lambda * beta.dot(member_scores.row(i));
    if (mode_ == AggregationMode::kFull) s += member_scores.row(i).dot(alpha);
    out[i] = s;
  }
  return out;
}

double group_bpr_accumulate(const AggregatorParams& params,
                            AggregationMode mode, const GroupView& group,
                            const Vector& positive, const Vector& negative,
                            AggregatorParams& grad,
                            const BackwardOptions& options) {
  if (options.dropout > 0.0 && options.rng == nullptr) {
    throw PreconditionError("attention dropout needs a random generator");
  }
  const std::size_t m = group.size();
  const double lambda = params.fine_tune.lambda;
  const bool attend = uses_attention(mode);
  const bool prefer = uses_preference(mode);

  // Attention is item independent and shared by both items.
  std::optional<ProjectionCache> local_cache;
  if (attend && options.cache == nullptr) local_cache.emplace(params.projection);
  const ProjectionCache* cache = options.cache ? options.cache : &*local_cache;
  HyperRectangle projected;
  Vector query;
  AttentionTrace trace;
  std::vector<double> alpha;
  if (attend) {
    projected = project(group.raw, params.projection.center_weight,
                        cache->offset_weight);
    query = projected.concat();
    trace = attention_forward(params.attention, query, group.member_traits,
                              options.dropout, options.rng);
    alpha = softmax(trace.raw);
  }
  Matrix ext;
  Matrix projected_members;  // rows: w u'_t
  if (prefer) {
    ext = extended_members(group.member_embs, group.member_traits);
    projected_members = ext * params.fine_tune.bilinear.transpose();
  }

  struct ItemPass {
    const Vector* item;
    Vector member_scores;
    std::vector<double> beta;
    std::vector<double> gamma;
    double score = 0.0;
  };
  auto forward_item = [&](const Vector& item) {
    ItemPass pass;
    pass.item = &item;
    pass.member_scores = group.member_embs * item;
    if (prefer) {
      const Vector raw = projected_members * item;
      pass.beta = softmax(std::span<const double>(raw.data(), m));
    }
    pass.gamma = variant_weights(mode, alpha, pass.beta, lambda, m);
    for (std::size_t t = 0; t < m; ++t) {
      pass.score += pass.gamma[t] * pass.member_scores[static_cast<Eigen::Index>(t)];
    }
    return pass;
  };
  const ItemPass pos = forward_item(positive);
  const ItemPass neg = forward_item(negative);

  const double margin = pos.score - neg.score;
  const double loss = -log_sigmoid(margin);
  const double d_margin = -std::exp(log_sigmoid(-margin));

  std::vector<double> d_alpha(m, 0.0);
  auto backward_item = [&](const ItemPass& pass, double upstream,
                           Vector* item_grad) {
    const Vector& item = *pass.item;
    std::vector<double> d_gamma(m);
    for (std::size_t t = 0; t < m; ++t) {
      d_gamma[t] = upstream * pass.member_scores[static_cast<Eigen::Index>(t)];
    }
    if (options.member_grad) {
      for (std::size_t t = 0; t < m; ++t) {
        options.member_grad->row(static_cast<Eigen::Index>(t)) +=
            upstream * pass.gamma[t] * item.transpose();
      }
    }
    if (item_grad) {
      *item_grad += upstream * group_embedding(group.member_embs, pass.gamma);
    }
    if (attend) {
      for (std::size_t t = 0; t < m; ++t) d_alpha[t] += d_gamma[t];
    }
    if (prefer) {
      std::vector<double> d_beta_out(m);
      for (std::size_t t = 0; t < m; ++t) d_beta_out[t] = lambda * d_gamma[t];
      const std::vector<double> d_beta = softmax_backward(pass.beta, d_beta_out);
      Eigen::Map<const Vector> db(d_beta.data(), static_cast<Eigen::Index>(m));
      // beta_t = v . (w u'_t)
      grad.fine_tune.bilinear += item * (db.transpose() * ext);
      if (item_grad) *item_grad += projected_members.transpose() * db;
      if (options.member_grad) {
        const Vector wt_v = params.fine_tune.bilinear.transpose() * item;
        const Eigen::Index d = group.member_embs.cols();
        for (std::size_t t = 0; t < m; ++t) {
          options.member_grad->row(static_cast<Eigen::Index>(t)) +=
              d_beta[t] * wt_v.head(d).transpose();
        }
      }
    }
  };
  backward_item(pos, d_margin, options.positive_grad);
  backward_item(neg, -d_margin, options.negative_grad);

  if (attend) {
    const std::vector<double> d_raw = softmax_backward(alpha, d_alpha);
    const Vector d_query =
        attention_backward(params.attention, query, trace, d_raw, grad.attention);
    const auto d_center = d_query.head(kTraitDims);
    const auto d_offset = d_query.tail(kTraitDims);
    grad.projection.center_weight += d_center * group.raw.center.transpose();
    const Matrix d_offset_weight = d_offset * group.raw.offset.transpose();
    grad.projection.offset_weight_raw +=
        d_offset_weight.cwiseProduct(cache->offset_slope);
  }
  return loss;
}

}  // namespace pega
