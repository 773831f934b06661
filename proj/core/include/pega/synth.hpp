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

// Synthetic data with planted dominant-member structure.
//
// Users belong to taste clusters and are either assertive (reviews lean on
// high Openness, Extraversion and Neuroticism categories) or easygoing
// (high Agreeableness). A dominant-driven group has one assertive leader and
// most of its items come from the leader's history; the rest come from an
// enthusiast, another member who pushes items they already like. A
// consensus-driven group draws most members from one cluster and takes the
// items most of them share.

#ifndef PEGA_SYNTH_HPP_
#define PEGA_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pega/datasets.hpp"
#include "pega/interactions.hpp"
#include "pega/lexicon.hpp"

namespace pega {

struct SynthSpec {
  std::size_t users = 500;
  std::size_t items = 200;
  std::size_t groups = 300;
  double dominance = 0.8;  // share of dominant-driven groups
  std::size_t clusters = 10;
  double assertive_share = 0.3;
  std::size_t items_per_user = 12;
  double in_cluster = 0.85;  // share of a user's items from their cluster
  std::size_t min_group_size = 3;
  std::size_t max_group_size = 6;
  std::size_t min_group_items = 5;
  std::size_t max_group_items = 8;
  std::size_t reviews_per_user = 6;
  std::size_t review_chars = 1000;
  /// Chance that a consensus group also contains an assertive outsider.
  double consensus_outsider = 0.5;
  /// Share of a dominant group's items taken from the enthusiast's history.
  double enthusiast_share = 0.3;
  std::uint64_t seed = 42;

  void validate() const;
};

struct GroupLabel {
  std::string group;
  bool dominant = false;
  std::string leader;  // dominant member id, empty for consensus groups
};

struct SynthData {
  InteractionStore store;
  ReviewCorpus reviews;
  std::vector<GroupLabel> labels;  // parallel to store.groups
  std::vector<bool> assertive;     // parallel to store.users
  std::vector<CheckinRecord> checkins;
  FriendGraph friends;
};

SynthData synthesize(const SynthSpec& spec, const Lexicon& lexicon);

/// Writes reviews.tsv, user_items.tsv, groups.tsv, group_items.tsv,
/// labels.tsv, checkins.tsv and friends.tsv into `dir`.
void write_synth(const std::filesystem::path& dir, const SynthData& data);

std::vector<GroupLabel> read_labels(const std::filesystem::path& path);

}  // namespace pega

#endif  // PEGA_SYNTH_HPP_
