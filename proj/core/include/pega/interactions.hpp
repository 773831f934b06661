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

// Sparse binary user-item / group-item interactions and group membership,
// plus the string-id <-> dense-index maps persisted with checkpoints.
//
// Text formats (one record per line, '#' comments allowed):
//   user_items.tsv   user_id<TAB>item_id
//   group_items.tsv  group_id<TAB>item_id
//   groups.tsv       group_id<TAB>user_id,user_id,...

#ifndef PEGA_INTERACTIONS_HPP_
#define PEGA_INTERACTIONS_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pega/types.hpp"

namespace pega {

/// Insertion-ordered mapping from external string ids to dense indices.
class IdMap {
 public:
  IdMap() = default;
  explicit IdMap(std::vector<std::string> names);

  Index intern(std::string_view id);
  std::optional<Index> find(std::string_view id) const;
  Index at(std::string_view id) const;  // throws Error when absent

  const std::string& name(Index index) const { return names_.at(index); }
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }

  bool operator==(const IdMap& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Index> index_;
};

struct GroupItem {
  Index group = 0;
  Index item = 0;
  bool operator==(const GroupItem&) const = default;
  auto operator<=>(const GroupItem&) const = default;
};

struct InteractionStore {
  IdMap users;
  IdMap items;
  IdMap groups;
  std::vector<std::vector<Index>> user_items;     // sorted, unique
  std::vector<std::vector<Index>> group_items;    // sorted, unique
  std::vector<std::vector<Index>> group_members;  // file order, unique

  std::size_t num_users() const { return users.size(); }
  std::size_t num_items() const { return items.size(); }
  std::size_t num_groups() const { return groups.size(); }

  /// Adds (user, item); duplicates are ignored. Grows tables as needed.
  void add_user_item(Index user, Index item);
  void add_group_item(Index group, Index item);

  /// Resizes adjacency tables to the id-map sizes.
  void sync_sizes();

  std::size_t user_item_count() const;
  std::vector<GroupItem> group_item_pairs() const;

  /// Throws StructuralError on out-of-range indices, duplicate pairs or
  /// memberless groups.
  void validate() const;
};

bool contains_sorted(const std::vector<Index>& sorted, Index value);

/// Loads the three interaction files. `group_items` and `groups` may be
/// empty paths for user-only data.
InteractionStore load_interactions(const std::filesystem::path& user_items,
                                   const std::filesystem::path& groups,
                                   const std::filesystem::path& group_items);

void write_user_items(const std::filesystem::path& path,
                      const InteractionStore& store);
void write_groups(const std::filesystem::path& path,
                  const InteractionStore& store);
void write_group_items(const std::filesystem::path& path,
                       const InteractionStore& store,
                       const std::vector<GroupItem>& pairs);

std::vector<GroupItem> read_group_item_pairs(const std::filesystem::path& path,
                                             const InteractionStore& store);

}  // namespace pega

#endif  // PEGA_INTERACTIONS_HPP_
