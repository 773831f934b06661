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

// Review ingestion and filtering, group construction (co-check-in,
// rating similarity, random) and group-interaction splits.

#ifndef PEGA_DATASETS_HPP_
#define PEGA_DATASETS_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pega/interactions.hpp"

namespace pega {

/// Reviews per user, users in first-appearance order.
struct ReviewCorpus {
  std::vector<std::string> users;
  std::vector<std::vector<std::string>> reviews;  // parallel to users

  void add(const std::string& user, std::string text);
  std::size_t size() const { return users.size(); }
};

/// `user<TAB>review` lines; the review field is escaped.
ReviewCorpus read_reviews(const std::filesystem::path& path);
void write_reviews(const std::filesystem::path& path, const ReviewCorpus& corpus);

/// Number of UTF-8 code points.
std::size_t text_length(std::string_view text);

/// Users with at least `min_reviews` reviews of at least `min_length`
/// characters, in corpus order.
std::vector<std::string> filter_users(const ReviewCorpus& corpus,
                                      std::size_t min_reviews = 5,
                                      std::size_t min_length = 1000);

/// Retained users with only their qualifying reviews.
ReviewCorpus filter_corpus(const ReviewCorpus& corpus,
                           std::size_t min_reviews = 5,
                           std::size_t min_length = 1000);

struct CheckinRecord {
  std::string user;
  std::string item;
  std::int64_t timestamp = 0;
  std::optional<double> rating;
};

/// `user<TAB>item<TAB>timestamp[<TAB>rating]`.
std::vector<CheckinRecord> read_checkins(const std::filesystem::path& path);
void write_checkins(const std::filesystem::path& path,
                    std::span<const CheckinRecord> checkins);

class FriendGraph {
 public:
  /// Self-loops are ignored; edges are undirected.
  void add(const std::string& a, const std::string& b);
  bool friends(const std::string& a, const std::string& b) const;
  const std::set<std::string>& neighbours(const std::string& user) const;
  std::size_t edge_count() const;

  const std::map<std::string, std::set<std::string>>& adjacency() const {
    return adj_;
  }

 private:
  std::map<std::string, std::set<std::string>> adj_;
};

/// `user<TAB>user` lines.
FriendGraph read_friends(const std::filesystem::path& path);
void write_friends(const std::filesystem::path& path, const FriendGraph& graph);

/// Groups over external ids. members[g] is sorted; items[g] is sorted and
/// unique.
struct GroupSet {
  std::vector<std::vector<std::string>> members;
  std::vector<std::vector<std::string>> items;

  std::size_t size() const { return members.size(); }
};

struct CocheckinOptions {
  std::int64_t window = 900;  // seconds, max gap inside one event
  /// Without friendship data every co-present set of >= 2 users is a group.
  bool require_friends = true;
};

/// Per item, check-ins are clustered greedily in time order so that the
/// first and last check-in of a cluster are at most `window` apart. Each
/// maximal clique of >= 2 friends inside a cluster is one group event.
/// Identical member sets merge into one group.
GroupSet build_cocheckin_groups(std::span<const CheckinRecord> checkins,
                                const FriendGraph& friends,
                                const CocheckinOptions& options = {});

/// user -> item -> rating.
using Ratings = std::map<std::string, std::map<std::string, double>>;

Ratings ratings_from_checkins(std::span<const CheckinRecord> checkins);

/// Sample PCC; nullopt with fewer than two pairs or zero variance on either
/// side.
std::optional<double> pearson_correlation(std::span<const double> a,
                                          std::span<const double> b);

/// PCC over the items both users rated.
std::optional<double> user_similarity(const std::map<std::string, double>& a,
                                      const std::map<std::string, double>& b);

/// Items rated strictly above `floor` by every member.
std::vector<std::string> consensus_items(const Ratings& ratings,
                                         std::span<const std::string> members,
                                         double floor = 3.0);

struct GroupSizeSpec {
  double mean = 5.5;  // of the untruncated shifted geometric
  std::size_t min = 2;
  std::size_t max = 20;
};

/// Shifted geometric on [min, max], resampled when above max.
std::size_t sample_group_size(const GroupSizeSpec& spec, std::mt19937_64& rng);

struct SimilarityOptions {
  double threshold = 0.27;  // strict: PCC must exceed it
  std::size_t num_groups = 100;
  GroupSizeSpec size{5.5, 2, 20};
  std::size_t max_attempts = 0;  // 0 means 20 * num_groups
  std::uint64_t seed = 42;
};

/// Greedy growth from a random seed user, adding random users whose PCC with
/// every current member exceeds the threshold. Groups with no consensus
/// item or below the minimum size are discarded.
GroupSet build_similarity_groups(const Ratings& ratings,
                                 const SimilarityOptions& options);

struct RandomGroupOptions {
  std::size_t num_groups = 100;
  GroupSizeSpec size{9.0, 2, 30};
  std::size_t max_attempts = 0;  // 0 means 20 * num_groups
  std::uint64_t seed = 42;
};

/// Uniformly drawn members; same consensus rule as the similarity builder.
/// Throws PreconditionError when the minimum size is below two.
GroupSet build_random_groups(const Ratings& ratings,
                             const RandomGroupOptions& options);

/// Adds the groups and their items to `store`, interning unknown ids.
void add_groups(InteractionStore& store, const GroupSet& groups);

struct SplitSpec {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
  int folds = 5;
  std::uint64_t seed = 42;

  /// Throws PreconditionError unless the proportions are non-negative and sum
  /// to one.
  void validate() const;
};

struct Split {
  std::vector<GroupItem> train;
  std::vector<GroupItem> validation;
  std::vector<GroupItem> test;
};

/// Group-interaction split. Validation and test each receive
/// floor(n * proportion) pairs drawn at random from groups with at least
/// two interactions, never taking a group's last training pair. Output
/// vectors are sorted.
Split split_interactions(std::span<const GroupItem> pairs, const SplitSpec& spec);

/// Partitions the pairs into `spec.folds` disjoint test folds.
std::vector<std::vector<GroupItem>> kfold(std::span<const GroupItem> pairs,
                                          const SplitSpec& spec);

/// Fold `fold` as test, the next fold as validation, the rest as train.
Split fold_split(const std::vector<std::vector<GroupItem>>& folds, int fold);

}  // namespace pega

#endif  // PEGA_DATASETS_HPP_
