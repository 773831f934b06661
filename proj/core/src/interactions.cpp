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

#include "pega/interactions.hpp"

#include <algorithm>

#include "pega/errors.hpp"
#include "pega/text_io.hpp"

namespace pega {
namespace {

void insert_sorted(std::vector<Index>& v, Index value) {
  auto it = std::lower_bound(v.begin(), v.end(), value);
  if (it == v.end() || *it != value) v.insert(it, value);
}

std::pair<std::string_view, std::string_view> two_fields(
    std::string_view line, const std::string& source, std::size_t number) {
  const auto fields = split(line, '\t');
  if (fields.size() != 2 || trim(fields[0]).empty() || trim(fields[1]).empty()) {
    throw ParseError(source, number, "expected two tab-separated fields");
  }
  return {trim(fields[0]), trim(fields[1])};
}

}  // namespace

IdMap::IdMap(std::vector<std::string> names) {
  for (auto& n : names) intern(n);
}

Index IdMap::intern(std::string_view id) {
  std::string key(id);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  const auto index = static_cast<Index>(names_.size());
  names_.push_back(key);
  index_.emplace(std::move(key), index);
  return index;
}

std::optional<Index> IdMap::find(std::string_view id) const {
  if (auto it = index_.find(std::string(id)); it != index_.end()) {
    return it->second;
  }
  return std::nullopt;
}

Index IdMap::at(std::string_view id) const {
  if (auto found = find(id)) return *found;
  throw Error("unknown id '" + std::string(id) + "'");
}

bool contains_sorted(const std::vector<Index>& sorted, Index value) {
  return std::binary_search(sorted.begin(), sorted.end(), value);
}

void InteractionStore::sync_sizes() {
  user_items.resize(users.size());
  group_items.resize(groups.size());
  group_members.resize(groups.size());
}

void InteractionStore::add_user_item(Index user, Index item) {
  if (static_cast<std::size_t>(user) >= user_items.size()) {
    user_items.resize(user + 1);
  }
  insert_sorted(user_items[user], item);
}

void InteractionStore::add_group_item(Index group, Index item) {
  if (static_cast<std::size_t>(group) >= group_items.size()) {
    group_items.resize(group + 1);
  }
  insert_sorted(group_items[group], item);
}

std::size_t InteractionStore::user_item_count() const {
  std::size_t n = 0;
  for (const auto& v : user_items) n += v.size();
  return n;
}

std::vector<GroupItem> InteractionStore::group_item_pairs() const {
  std::vector<GroupItem> pairs;
  for (std::size_t g = 0; g < group_items.size(); ++g) {
    for (Index item : group_items[g]) {
      pairs.push_back({static_cast<Index>(g), item});
    }
  }
  return pairs;
}

void InteractionStore::validate() const {
  const auto n_users = static_cast<Index>(num_users());
  const auto n_items = static_cast<Index>(num_items());
  if (user_items.size() != num_users() || group_items.size() != num_groups() ||
      group_members.size() != num_groups()) {
    throw StructuralError("interaction tables disagree with id maps");
  }
  auto check_items = [&](const std::vector<Index>& items, const char* what) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (items[i] < 0 || items[i] >= n_items) {
        throw StructuralError(std::string(what) + " item index out of range");
      }
      if (i > 0 && items[i] <= items[i - 1]) {
        throw StructuralError(std::string(what) + " items unsorted or duplicated");
      }
    }
  };
  for (const auto& items : user_items) check_items(items, "user");
  for (const auto& items : group_items) check_items(items, "group");
  for (std::size_t g = 0; g < group_members.size(); ++g) {
    const auto& members = group_members[g];
    if (members.empty()) {
      throw StructuralError("group '" + groups.name(static_cast<Index>(g)) +
                            "' has no members");
    }
    std::vector<Index> sorted = members;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw StructuralError("group '" + groups.name(static_cast<Index>(g)) +
                            "' lists a member twice");
    }
    if (sorted.front() < 0 || sorted.back() >= n_users) {
      throw StructuralError("group member index out of range");
    }
  }
}

InteractionStore load_interactions(const std::filesystem::path& user_items,
                                   const std::filesystem::path& groups,
                                   const std::filesystem::path& group_items) {
  InteractionStore store;
  const std::string ui_source = user_items.string();
  for_each_record(user_items, [&](std::string_view line, std::size_t n) {
    const auto [user, item] = two_fields(line, ui_source, n);
    const Index u = store.users.intern(user);
    const Index i = store.items.intern(item);
    store.add_user_item(u, i);
  });

  if (!groups.empty()) {
    const std::string source = groups.string();
    for_each_record(groups, [&](std::string_view line, std::size_t n) {
      const auto [group, members] = two_fields(line, source, n);
      if (store.groups.find(group)) {
        throw ParseError(source, n, "group '" + std::string(group) +
                                        "' declared twice");
      }
      const Index g = store.groups.intern(group);
      store.group_members.resize(store.groups.size());
      for (std::string_view m : split(members, ',')) {
        m = trim(m);
        if (m.empty()) throw ParseError(source, n, "empty member id");
        const Index u = store.users.intern(m);
        auto& list = store.group_members[g];
        if (std::find(list.begin(), list.end(), u) != list.end()) {
          throw ParseError(source, n, "member '" + std::string(m) +
                                          "' listed twice");
        }
        list.push_back(u);
      }
    });
  }

  if (!group_items.empty()) {
    const std::string source = group_items.string();
    for_each_record(group_items, [&](std::string_view line, std::size_t n) {
      const auto [group, item] = two_fields(line, source, n);
      const auto g = store.groups.find(group);
      if (!g) {
        throw ParseError(source, n, "group '" + std::string(group) +
                                        "' has no membership record");
      }
      store.add_group_item(*g, store.items.intern(item));
    });
  }

  store.sync_sizes();
  store.validate();
  return store;
}

void write_user_items(const std::filesystem::path& path,
                      const InteractionStore& store) {
  auto out = open_output(path);
  for (std::size_t u = 0; u < store.user_items.size(); ++u) {
    for (Index item : store.user_items[u]) {
      out << store.users.name(static_cast<Index>(u)) << '\t'
          << store.items.name(item) << '\n';
    }
  }
}

void write_groups(const std::filesystem::path& path,
                  const InteractionStore& store) {
  auto out = open_output(path);
  for (std::size_t g = 0; g < store.group_members.size(); ++g) {
    out << store.groups.name(static_cast<Index>(g)) << '\t';
    const auto& members = store.group_members[g];
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (i) out << ',';
      out << store.users.name(members[i]);
    }
    out << '\n';
  }
}

void write_group_items(const std::filesystem::path& path,
                       const InteractionStore& store,
                       const std::vector<GroupItem>& pairs) {
  auto out = open_output(path);
  for (const GroupItem& p : pairs) {
    out << store.groups.name(p.group) << '\t' << store.items.name(p.item)
        << '\n';
  }
}

std::vector<GroupItem> read_group_item_pairs(const std::filesystem::path& path,
                                             const InteractionStore& store) {
  std::vector<GroupItem> pairs;
  const std::string source = path.string();
  for_each_record(path, [&](std::string_view line, std::size_t n) {
    const auto [group, item] = two_fields(line, source, n);
    const auto g = store.groups.find(group);
    const auto i = store.items.find(item);
    if (!g || !i) {
      throw ParseError(source, n, "unknown group or item id");
    }
    pairs.push_back({*g, *i});
  });
  return pairs;
}

}  // namespace pega
