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

// Ranking metrics, score-aggregation baselines, group-size buckets and the
// paired permutation test.

#ifndef PEGA_EVAL_HPP_
#define PEGA_EVAL_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pega/interactions.hpp"
#include "pega/types.hpp"

namespace pega {

/// Items ordered by score descending, ties by ascending item index.
struct RankedList {
  std::vector<Index> items;
  std::vector<double> scores;

  std::size_t size() const { return items.size(); }
};

/// Ranks `candidates` using `scores[item]`.
RankedList rank_items(std::span<const double> scores,
                      std::span<const Index> candidates);

/// |relevant in top-k| / |relevant|. `relevant` must be non-empty.
double recall_at_k(const RankedList& ranked, std::span<const Index> relevant,
                   int k);

/// Binary-gain DCG@k with 1/log2(rank+1) discount over the ideal DCG.
double ndcg_at_k(const RankedList& ranked, std::span<const Index> relevant,
                 int k);

/// (ours - compared) / compared. Throws PreconditionError if compared <= 0.
double vip(double ours, double compared);

enum class ScoreAggregation { kAverage, kLeastMisery, kMaximum };
std::string_view aggregation_name(ScoreAggregation strategy);
ScoreAggregation parse_aggregation(std::string_view name);

/// Collapses member-level scores for one item into a group score.
double score_aggregate(std::span<const double> member_scores,
                       ScoreAggregation strategy);

/// Two-sided paired sign-flip test on the mean difference:
/// p = (#{|permuted| >= |observed|} + 1) / (iterations + 1).
double permutation_test(std::span<const double> a, std::span<const double> b,
                        int iterations, std::uint64_t seed);

/// "<5", "5-8", "9-12", ">12"; bounds inclusive.
std::string_view size_bucket(std::size_t group_size);
inline constexpr std::string_view kBucketLabels[] = {"<5", "5-8", "9-12", ">12"};

/// Group indices partitioned by member count, keyed by bucket label.
std::map<std::string, std::vector<Index>> bucket_by_size(
    const InteractionStore& store, std::span<const Index> groups);

struct GroupMetrics {
  Index group = 0;
  std::vector<double> recall;  // aligned with MetricReport::ks
  std::vector<double> ndcg;
};

struct MetricSummary {
  std::vector<double> recall;
  std::vector<double> ndcg;
  std::size_t groups = 0;
};

struct MetricReport {
  std::vector<int> ks;
  MetricSummary overall;
  std::map<std::string, MetricSummary> buckets;
  std::vector<GroupMetrics> per_group;  // ascending group index

  /// Mean N@k / R@k; throws Error if k was not evaluated.
  double ndcg(int k) const;
  double recall(int k) const;
  /// Per-group N@k in per_group order.
  std::vector<double> group_ndcg(int k) const;
};

/// Scores of every catalog item for a group.
using GroupScoreFn = std::function<Vector(Index group)>;

/// Evaluates the groups appearing in `targets`. Each group's relevant set is
/// its target items; its candidates are the whole catalog minus `excluded`
/// pairs of that group. Groups without targets are skipped.
MetricReport evaluate(const InteractionStore& store,
                      std::span<const GroupItem> targets,
                      std::span<const GroupItem> excluded,
                      const GroupScoreFn& score, std::span<const int> ks);

}  // namespace pega

#endif  // PEGA_EVAL_HPP_
