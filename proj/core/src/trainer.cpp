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

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "pega/errors.hpp"
#include "pega/eval.hpp"

namespace pega {
namespace {

// Independent, reproducible streams derived from the run seed.
enum class Stream : std::uint64_t {
  kUserInit = 1,
  kUserSampling = 2,
  kGroupInit = 3,
  kGroupSampling = 4,
  kDropout = 5,
};

std::mt19937_64 make_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

void check_finite(double loss, int epoch, const char* stage,
                  const TrainConfig& config) {
  if (!std::isfinite(loss)) {
    throw NumericError(std::string(stage) + " loss became non-finite at epoch " +
                       std::to_string(epoch) + "; learning rate " +
                       std::to_string(config.learning_rate) +
                       " is likely too high");
  }
}

std::span<double> span_of(RowMatrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

template <class Subjects>
std::vector<Triple> build_triples(const Subjects& positives,
                                  std::size_t num_items, int negatives,
                                  std::mt19937_64& rng,
                                  const std::vector<std::vector<Index>>& known) {
  std::vector<Triple> triples;
  for (const auto& [subject, item] : positives) {
    for (Index neg : sample_negatives(known[subject], num_items, negatives, rng)) {
      triples.push_back({subject, item, neg});
    }
  }
  std::shuffle(triples.begin(), triples.end(), rng);
  return triples;
}

}  // namespace

void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads,
               OptimizerState& state) {
  if (params.size() != grads.size()) {
    throw PreconditionError("adam_step: parameter/gradient block mismatch");
  }
  if (state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.size(), 0.0);
      state.second_moment.emplace_back(p.size(), 0.0);
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw PreconditionError("adam_step: optimizer state has wrong block count");
  }
  ++state.step;
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t b = 0; b < params.size(); ++b) {
    std::span<double> p = params[b];
    std::span<const double> g = grads[b];
    auto& m = state.first_moment[b];
    auto& v = state.second_moment[b];
    if (p.size() != g.size() || p.size() != m.size()) {
      throw PreconditionError("adam_step: block shape mismatch");
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

std::vector<Index> sample_negatives(const std::vector<Index>& interacted,
                                    std::size_t num_items, int k,
                                    std::mt19937_64& rng) {
  const auto n = static_cast<Index>(num_items);
  const std::size_t eligible = num_items - std::min(num_items, interacted.size());
  std::vector<Index> out;
  if (k <= 0 || eligible == 0) return out;
  if (eligible <= static_cast<std::size_t>(k)) {
    for (Index i = 0; i < n; ++i) {
      if (!contains_sorted(interacted, i)) out.push_back(i);
    }
    return out;
  }
  if (eligible * 2 < num_items) {
    // Dense history: partial Fisher-Yates over the eligible list.
    std::vector<Index> pool;
    pool.reserve(eligible);
    for (Index i = 0; i < n; ++i) {
      if (!contains_sorted(interacted, i)) pool.push_back(i);
    }
    for (int j = 0; j < k; ++j) {
      std::uniform_int_distribution<std::size_t> pick(j, pool.size() - 1);
      std::swap(pool[j], pool[pick(rng)]);
    }
    pool.resize(k);
    return pool;
  }
  std::uniform_int_distribution<Index> pick(0, n - 1);
  while (out.size() < static_cast<std::size_t>(k)) {
    const Index item = pick(rng);
    if (contains_sorted(interacted, item)) continue;
    if (std::find(out.begin(), out.end(), item) != out.end()) continue;
    out.push_back(item);
  }
  return out;
}

Stage1Result train_stage1(const InteractionStore& interactions,
                          const TrainConfig& config) {
  if (interactions.user_item_count() == 0) {
    throw PreconditionError("stage one needs user-item interactions");
  }
  std::mt19937_64 init_rng = make_rng(config.seed, Stream::kUserInit);
  std::mt19937_64 rng = make_rng(config.seed, Stream::kUserSampling);

  Stage1Result result;
  result.base = EmbeddingTable::normal(interactions.num_users(),
                                       interactions.num_items(),
                                       config.latent_dim, config.init_stddev,
                                       init_rng);
  const LightGraph graph(interactions, config.gcn_layers);

  std::vector<std::pair<Index, Index>> positives;
  for (std::size_t u = 0; u < interactions.user_items.size(); ++u) {
    for (Index item : interactions.user_items[u]) {
      positives.emplace_back(static_cast<Index>(u), item);
    }
  }

  OptimizerState opt;
  opt.learning_rate = config.learning_rate;
  const std::size_t batch = static_cast<std::size_t>(std::max(1, config.batch_size));

  for (int epoch = 1; epoch <= config.user_epochs; ++epoch) {
    const std::vector<Triple> triples =
        build_triples(positives, interactions.num_items(), config.negatives, rng,
                      interactions.user_items);
    double total = 0.0;
    for (std::size_t start = 0; start < triples.size(); start += batch) {
      const std::size_t end = std::min(triples.size(), start + batch);
      const std::span<const Triple> chunk(triples.data() + start, end - start);
      const EmbeddingTable final_emb = graph.propagate(result.base);
      BprResult bpr = user_bpr_loss(final_emb, chunk);
      EmbeddingTable grad = graph.backpropagate(bpr.grad);
      if (config.l2 > 0.0) {
        for (const Triple& t : chunk) {
          bpr.loss += config.l2 * (result.base.users.row(t.subject).squaredNorm() +
                                   result.base.items.row(t.positive).squaredNorm() +
                                   result.base.items.row(t.negative).squaredNorm());
          grad.users.row(t.subject) += 2.0 * config.l2 * result.base.users.row(t.subject);
          grad.items.row(t.positive) += 2.0 * config.l2 * result.base.items.row(t.positive);
          grad.items.row(t.negative) += 2.0 * config.l2 * result.base.items.row(t.negative);
        }
      }
      total += bpr.loss;
      const std::span<double> params[] = {span_of(result.base.users),
                                          span_of(result.base.items)};
      const std::span<const double> grads[] = {span_of(grad.users),
                                               span_of(grad.items)};
      adam_step(params, grads, opt);
    }
    const double mean = triples.empty() ? 0.0 : total / double(triples.size());
    check_finite(mean, epoch, "user-level", config);
    if (!result.base.all_finite()) {
      throw NumericError("user/item embeddings became non-finite at epoch " +
                         std::to_string(epoch));
    }
    result.loss_history.push_back(mean);
    spdlog::debug("stage 1 epoch {} loss {:.6f}", epoch, mean);
  }
  result.propagated = graph.propagate(result.base);
  return result;
}

AggregatorParams initial_aggregator(const TrainConfig& config) {
  std::mt19937_64 rng = make_rng(config.seed, Stream::kGroupInit);
  return AggregatorParams::random(config.latent_dim, config.attention_hidden,
                                  config.attention_layers, config.lambda, rng);
}

double group_loss(const AggregatorParams& params, AggregationMode mode,
                  const std::vector<GroupView>& views,
                  std::span<const Triple> triples, const EmbeddingTable& emb) {
  if (triples.empty()) return 0.0;
  AggregatorParams scratch = params.zeros_like();
  const ProjectionCache cache(params.projection);
  BackwardOptions options;
  options.cache = &cache;
  double total = 0.0;
  for (const Triple& t : triples) {
    total += group_bpr_accumulate(params, mode, views[t.subject],
                                  emb.items.row(t.positive).transpose(),
                                  emb.items.row(t.negative).transpose(), scratch,
                                  options);
  }
  return total / double(triples.size());
}

Stage2Result train_stage2(const GroupTrainData& data, const TrainConfig& config,
                          AggregationMode mode) {
  if (!data.store || !data.embeddings || !data.traits) {
    throw PreconditionError("stage two needs interactions, embeddings and traits");
  }
  if (data.train.empty()) {
    throw PreconditionError("stage two needs group-item training interactions");
  }
  const InteractionStore& store = *data.store;
  const EmbeddingTable& emb = *data.embeddings;
  if (emb.dim() != config.latent_dim) {
    throw ShapeError("stage-one embeddings have dimension " +
                     std::to_string(emb.dim()) + ", config expects " +
                     std::to_string(config.latent_dim));
  }

  std::vector<GroupView> views;
  views.reserve(store.num_groups());
  for (const auto& members : store.group_members) {
    views.push_back(make_group_view(members, emb, *data.traits));
  }
  // Negatives avoid the group's training positives only.
  std::vector<std::vector<Index>> known(store.num_groups());
  std::vector<std::pair<Index, Index>> positives;
  for (const GroupItem& p : data.train) {
    known[p.group].push_back(p.item);
    positives.emplace_back(p.group, p.item);
  }
  for (auto& k : known) {
    std::sort(k.begin(), k.end());
    k.erase(std::unique(k.begin(), k.end()), k.end());
  }

  std::mt19937_64 rng = make_rng(config.seed, Stream::kGroupSampling);
  std::mt19937_64 dropout_rng = make_rng(config.seed, Stream::kDropout);

  Stage2Result result;
  result.params = initial_aggregator(config);
  AggregatorParams best = result.params;
  double best_ndcg = -1.0;
  int stale = 0;

  OptimizerState opt;
  opt.learning_rate = config.learning_rate;
  const std::size_t batch = static_cast<std::size_t>(std::max(1, config.batch_size));
  const bool validate = config.patience > 0 && !data.validation.empty();
  const int ks[] = {10};

  for (int epoch = 1; epoch <= config.group_epochs; ++epoch) {
    const std::vector<Triple> triples = build_triples(
        positives, store.num_items(), config.negatives, rng, known);
    double total = 0.0;
    for (std::size_t start = 0; start < triples.size(); start += batch) {
      const std::size_t end = std::min(triples.size(), start + batch);
      AggregatorParams grad = result.params.zeros_like();
      const ProjectionCache cache(result.params.projection);
      BackwardOptions options;
      options.cache = &cache;
      options.dropout = config.dropout;
      options.rng = &dropout_rng;
      for (std::size_t i = start; i < end; ++i) {
        const Triple& t = triples[i];
        total += group_bpr_accumulate(result.params, mode, views[t.subject],
                                      emb.items.row(t.positive).transpose(),
                                      emb.items.row(t.negative).transpose(),
                                      grad, options);
      }
      std::vector<std::span<double>> params;
      std::vector<std::span<const double>> grads;
      for_each_block(result.params, [&](const std::string&, std::span<double> s) {
        params.push_back(s);
      });
      for_each_block(static_cast<const AggregatorParams&>(grad),
                     [&](const std::string&, std::span<const double> s) {
                       grads.push_back(s);
                     });
      adam_step(params, grads, opt);
    }
    const double mean = triples.empty() ? 0.0 : total / double(triples.size());
    check_finite(mean, epoch, "group-level", config);
    result.loss_history.push_back(mean);

    if (validate) {
      const GroupScorer scorer(result.params, mode);
      const MetricReport report = evaluate(
          store, data.validation, data.train,
          [&](Index g) { return scorer.score_all(views[g], emb.items); }, ks);
      const double ndcg = report.ndcg(10);
      result.validation_ndcg.push_back(ndcg);
      spdlog::debug("stage 2 [{}] epoch {} loss {:.6f} val N@10 {:.4f}",
                    mode_name(mode), epoch, mean, ndcg);
      if (ndcg > best_ndcg) {
        best_ndcg = ndcg;
        best = result.params;
        result.best_epoch = epoch;
        stale = 0;
      } else if (++stale >= config.patience) {
        spdlog::debug("stage 2 [{}] early stop at epoch {}", mode_name(mode), epoch);
        break;
      }
    } else {
      spdlog::debug("stage 2 [{}] epoch {} loss {:.6f}", mode_name(mode), epoch,
                    mean);
    }
  }
  if (validate && result.best_epoch > 0) result.params = std::move(best);
  return result;
}

}  // namespace pega
