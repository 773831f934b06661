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

#include "pega/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "pega/errors.hpp"

namespace pega {
namespace {

bool is_relevant(std::span<const Index> relevant, Index item) {
  return std::find(relevant.begin(), relevant.end(), item) != relevant.end();
}

void check_k(int k) {
  if (k < 1) throw PreconditionError("k must be >= 1");
}

std::size_t position_of(const std::vector<int>& ks, int k) {
  const auto it = std::find(ks.begin(), ks.end(), k);
  if (it == ks.end()) throw Error("K=" + std::to_string(k) + " not evaluated");
  return static_cast<std::size_t>(it - ks.begin());
}

}  // namespace

RankedList rank_items(std::span<const double> scores,
                      std::span<const Index> candidates) {
  std::vector<Index> order(candidates.begin(), candidates.end());
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return scores[a] > scores[b];
  });
  RankedList out;
  out.items = std::move(order);
  out.scores.reserve(out.items.size());
  for (Index item : out.items) out.scores.push_back(scores[item]);
  return out;
}

double recall_at_k(const RankedList& ranked, std::span<const Index> relevant,
                   int k) {
  check_k(k);
  if (relevant.empty()) {
    throw PreconditionError("recall is undefined for an empty relevant set");
  }
  const std::size_t top = std::min<std::size_t>(k, ranked.size());
  std::size_t hits = 0;
  for (std::size_t r = 0; r < top; ++r) {
    if (is_relevant(relevant, ranked.items[r])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

double ndcg_at_k(const RankedList& ranked, std::span<const Index> relevant,
                 int k) {
  check_k(k);
  if (relevant.empty()) {
    throw PreconditionError("NDCG is undefined for an empty relevant set");
  }
  const std::size_t top = std::min<std::size_t>(k, ranked.size());
  double dcg = 0.0;
  for (std::size_t r = 0; r < top; ++r) {
    if (is_relevant(relevant, ranked.items[r])) dcg += 1.0 / std::log2(r + 2.0);
  }
  const std::size_t ideal_hits = std::min<std::size_t>(k, relevant.size());
  double idcg = 0.0;
  for (std::size_t r = 0; r < ideal_hits; ++r) idcg += 1.0 / std::log2(r + 2.0);
  return dcg / idcg;
}

double vip(double ours, double compared) {
  if (!(compared > 0.0)) {
    throw PreconditionError("VIP needs a positive comparison value");
  }
  return (ours - compared) / compared;
}

std::string_view aggregation_name(ScoreAggregation strategy) {
  switch (strategy) {
    case ScoreAggregation::kAverage: return "AVG";
    case ScoreAggregation::kLeastMisery: return "LM";
    case ScoreAggregation::kMaximum: return "MAX";
  }
  return "?";
}

ScoreAggregation parse_aggregation(std::string_view name) {
  if (name == "AVG") return ScoreAggregation::kAverage;
  if (name == "LM") return ScoreAggregation::kLeastMisery;
  if (name == "MAX") return ScoreAggregation::kMaximum;
  throw PreconditionError("unknown score aggregation '" + std::string(name) +
                          "'");
}

double score_aggregate(std::span<const double> member_scores,
                       ScoreAggregation strategy) {
  if (member_scores.empty()) {
    throw PreconditionError("score aggregation needs at least one member");
  }
  switch (strategy) {
    case ScoreAggregation::kAverage:
      return std::accumulate(member_scores.begin(), member_scores.end(), 0.0) /
             static_cast<double>(member_scores.size());
    case ScoreAggregation::kLeastMisery:
      return *std::min_element(member_scores.begin(), member_scores.end());
    case ScoreAggregation::kMaximum:
      return *std::max_element(member_scores.begin(), member_scores.end());
  }
  throw PreconditionError("unknown score aggregation");
}

double permutation_test(std::span<const double> a, std::span<const double> b,
                        int iterations, std::uint64_t seed) {
  if (a.size() != b.size()) {
    throw PreconditionError("paired samples must have equal length");
  }
  if (iterations < 1) throw PreconditionError("need at least one iteration");
  const std::size_t n = a.size();
  if (n == 0) return 1.0;
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];
  const double observed =
      std::abs(std::accumulate(diff.begin(), diff.end(), 0.0) / double(n));

  // Relative slack so that sign patterns reproducing the observed statistic
  // are counted despite summation-order rounding.
  const double slack = 1e-12 * std::max(1.0, observed);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution flip(0.5);
  int extreme = 0;
  for (int it = 0; it < iterations; ++it) {
    double sum = 0.0;
    for (double d : diff) sum += flip(rng) ? -d : d;
    if (std::abs(sum / double(n)) >= observed - slack) ++extreme;
  }
  return (extreme + 1.0) / (iterations + 1.0);
}

std::string_view size_bucket(std::size_t group_size) {
  if (group_size < 5) return kBucketLabels[0];
  if (group_size <= 8) return kBucketLabels[1];
  if (group_size <= 12) return kBucketLabels[2];
  return kBucketLabels[3];
}

std::map<std::string, std::vector<Index>> bucket_by_size(
    const InteractionStore& store, std::span<const Index> groups) {
  std::map<std::string, std::vector<Index>> buckets;
  for (std::string_view label : kBucketLabels) buckets[std::string(label)];
  for (Index g : groups) {
    buckets[std::string(size_bucket(store.group_members.at(g).size()))]
        .push_back(g);
  }
  return buckets;
}

double MetricReport::ndcg(int k) const {
  return overall.ndcg.at(position_of(ks, k));
}

double MetricReport::recall(int k) const {
  return overall.recall.at(position_of(ks, k));
}

std::vector<double> MetricReport::group_ndcg(int k) const {
  const std::size_t pos = position_of(ks, k);
  std::vector<double> out;
  out.reserve(per_group.size());
  for (const auto& g : per_group) out.push_back(g.ndcg[pos]);
  return out;
}

MetricReport evaluate(const InteractionStore& store,
                      std::span<const GroupItem> targets,
                      std::span<const GroupItem> excluded,
                      const GroupScoreFn& score, std::span<const int> ks) {
  for (int k : ks) check_k(k);
  std::map<Index, std::vector<Index>> relevant;
  for (const GroupItem& p : targets) relevant[p.group].push_back(p.item);
  std::map<Index, std::vector<Index>> seen;
  for (const GroupItem& p : excluded) seen[p.group].push_back(p.item);

  MetricReport report;
  report.ks.assign(ks.begin(), ks.end());
  const std::size_t nk = ks.size();
  auto blank = [nk] {
    MetricSummary s;
    s.recall.assign(nk, 0.0);
    s.ndcg.assign(nk, 0.0);
    return s;
  };
  report.overall = blank();
  for (std::string_view label : kBucketLabels) {
    report.buckets[std::string(label)] = blank();
  }

  const auto n_items = static_cast<Index>(store.num_items());
  for (auto& [group, items] : relevant) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    std::vector<Index> skip = seen[group];
    std::sort(skip.begin(), skip.end());
    std::vector<Index> candidates;
    candidates.reserve(static_cast<std::size_t>(n_items));
    for (Index i = 0; i < n_items; ++i) {
      if (!std::binary_search(skip.begin(), skip.end(), i) ||
          std::binary_search(items.begin(), items.end(), i)) {
        candidates.push_back(i);
      }
    }
    const Vector scores = score(group);
    const RankedList ranked = rank_items(
        std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())),
        candidates);

    GroupMetrics gm;
    gm.group = group;
    MetricSummary& bucket =
        report.buckets[std::string(size_bucket(store.group_members.at(group).size()))];
    for (std::size_t j = 0; j < nk; ++j) {
      gm.recall.push_back(recall_at_k(ranked, items, ks[j]));
      gm.ndcg.push_back(ndcg_at_k(ranked, items, ks[j]));
      report.overall.recall[j] += gm.recall[j];
      report.overall.ndcg[j] += gm.ndcg[j];
      bucket.recall[j] += gm.recall[j];
      bucket.ndcg[j] += gm.ndcg[j];
    }
    ++report.overall.groups;
    ++bucket.groups;
    report.per_group.push_back(std::move(gm));
  }
  auto finish = [nk](MetricSummary& s) {
    if (s.groups == 0) return;
    for (std::size_t j = 0; j < nk; ++j) {
      s.recall[j] /= double(s.groups);
      s.ndcg[j] /= double(s.groups);
    }
  };
  finish(report.overall);
  for (auto& [label, s] : report.buckets) finish(s);
  return report;
}

}  // namespace pega
