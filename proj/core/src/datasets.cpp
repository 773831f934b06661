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

#include "pega/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

#include "pega/errors.hpp"
#include "pega/text_io.hpp"

namespace pega {
namespace {

std::vector<std::string_view> fields(std::string_view line, std::size_t min,
                                     std::size_t max, const std::string& source,
                                     std::size_t n) {
  auto f = split(line, '\t');
  if (f.size() < min || f.size() > max) {
    throw ParseError(source, n, "expected " + std::to_string(min) +
                                    (min == max ? "" : "-" + std::to_string(max)) +
                                    " tab-separated fields, got " +
                                    std::to_string(f.size()));
  }
  for (auto& x : f) x = trim(x);
  return f;
}

// Bron-Kerbosch with pivoting over a small vertex set.
void maximal_cliques(const std::vector<std::vector<bool>>& adj,
                     std::vector<int>& r, std::vector<int> p, std::vector<int> x,
                     std::vector<std::vector<int>>& out) {
  if (p.empty() && x.empty()) {
    out.push_back(r);
    return;
  }
  int pivot = p.empty() ? x.front() : p.front();
  std::size_t best = 0;
  for (const auto* set : {&p, &x}) {
    for (int u : *set) {
      std::size_t c = 0;
      for (int v : p) c += adj[u][v] ? 1 : 0;
      if (c > best) {
        best = c;
        pivot = u;
      }
    }
  }
  const std::vector<int> candidates = [&] {
    std::vector<int> c;
    for (int v : p) {
      if (!adj[pivot][v]) c.push_back(v);
    }
    return c;
  }();
  for (int v : candidates) {
    std::vector<int> np, nx;
    for (int u : p) {
      if (adj[v][u]) np.push_back(u);
    }
    for (int u : x) {
      if (adj[v][u]) nx.push_back(u);
    }
    r.push_back(v);
    maximal_cliques(adj, r, std::move(np), std::move(nx), out);
    r.pop_back();
    p.erase(std::find(p.begin(), p.end(), v));
    x.push_back(v);
  }
}

class GroupCollector {
 public:
  void add(std::vector<std::string> members, const std::string& item) {
    std::sort(members.begin(), members.end());
    auto [it, inserted] = index_.try_emplace(members, set_.size());
    if (inserted) {
      set_.members.push_back(members);
      set_.items.emplace_back();
    }
    auto& items = set_.items[it->second];
    if (std::find(items.begin(), items.end(), item) == items.end()) {
      items.push_back(item);
    }
  }
  GroupSet finish() {
    for (auto& items : set_.items) std::sort(items.begin(), items.end());
    return std::move(set_);
  }
  bool contains(std::vector<std::string> members) const {
    std::sort(members.begin(), members.end());
    return index_.contains(members);
  }

 private:
  GroupSet set_;
  std::map<std::vector<std::string>, std::size_t> index_;
};

void add_consensus_group(GroupCollector& out, const Ratings& ratings,
                         std::vector<std::string> members) {
  std::sort(members.begin(), members.end());
  for (const auto& item : consensus_items(ratings, members)) out.add(members, item);
}

std::size_t attempts_for(std::size_t max_attempts, std::size_t num_groups) {
  return max_attempts > 0 ? max_attempts : 20 * std::max<std::size_t>(1, num_groups);
}

}  // namespace

void ReviewCorpus::add(const std::string& user, std::string text) {
  auto it = std::find(users.begin(), users.end(), user);
  if (it == users.end()) {
    users.push_back(user);
    reviews.emplace_back();
    reviews.back().push_back(std::move(text));
  } else {
    reviews[static_cast<std::size_t>(it - users.begin())].push_back(std::move(text));
  }
}

ReviewCorpus read_reviews(const std::filesystem::path& path) {
  ReviewCorpus corpus;
  std::unordered_map<std::string, std::size_t> index;
  const std::string source = path.string();
  for_each_record(path, [&](std::string_view line, std::size_t n) {
    const auto f = fields(line, 2, 2, source, n);
    if (f[0].empty()) throw ParseError(source, n, "empty user id");
    std::string user(f[0]);
    auto [it, inserted] = index.try_emplace(user, corpus.users.size());
    if (inserted) {
      corpus.users.push_back(user);
      corpus.reviews.emplace_back();
    }
    corpus.reviews[it->second].push_back(unescape_field(f[1]));
  });
  return corpus;
}

void write_reviews(const std::filesystem::path& path, const ReviewCorpus& corpus) {
  std::ofstream out = open_output(path);
  for (std::size_t u = 0; u < corpus.size(); ++u) {
    for (const auto& text : corpus.reviews[u]) {
      out << corpus.users[u] << '\t' << escape_field(text) << '\n';
    }
  }
}

std::size_t text_length(std::string_view text) {
  std::size_t n = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

ReviewCorpus filter_corpus(const ReviewCorpus& corpus, std::size_t min_reviews,
                           std::size_t min_length) {
  ReviewCorpus out;
  for (std::size_t u = 0; u < corpus.size(); ++u) {
    std::vector<std::string> kept;
    for (const auto& text : corpus.reviews[u]) {
      if (text_length(text) >= min_length) kept.push_back(text);
    }
    if (kept.size() >= min_reviews && !kept.empty()) {
      out.users.push_back(corpus.users[u]);
      out.reviews.push_back(std::move(kept));
    }
  }
  return out;
}

std::vector<std::string> filter_users(const ReviewCorpus& corpus,
                                      std::size_t min_reviews,
                                      std::size_t min_length) {
  return filter_corpus(corpus, min_reviews, min_length).users;
}

std::vector<CheckinRecord> read_checkins(const std::filesystem::path& path) {
  std::vector<CheckinRecord> out;
  const std::string source = path.string();
  for_each_record(path, [&](std::string_view line, std::size_t n) {
    const auto f = fields(line, 3, 4, source, n);
    CheckinRecord r;
    r.user = std::string(f[0]);
    r.item = std::string(f[1]);
    r.timestamp = parse_int(f[2], source, n);
    if (r.timestamp < 0) throw ParseError(source, n, "negative timestamp");
    if (f.size() == 4 && !f[3].empty()) {
      const double rating = parse_double(f[3], source, n);
      if (rating < 1.0 || rating > 5.0) {
        throw ParseError(source, n, "rating outside [1, 5]");
      }
      r.rating = rating;
    }
    out.push_back(std::move(r));
  });
  return out;
}

void write_checkins(const std::filesystem::path& path,
                    std::span<const CheckinRecord> checkins) {
  std::ofstream out = open_output(path);
  for (const auto& c : checkins) {
    out << c.user << '\t' << c.item << '\t' << c.timestamp;
    if (c.rating) out << '\t' << format_double(*c.rating);
    out << '\n';
  }
}

void FriendGraph::add(const std::string& a, const std::string& b) {
  if (a == b) return;
  adj_[a].insert(b);
  adj_[b].insert(a);
}

bool FriendGraph::friends(const std::string& a, const std::string& b) const {
  const auto it = adj_.find(a);
  return it != adj_.end() && it->second.contains(b);
}

const std::set<std::string>& FriendGraph::neighbours(const std::string& user) const {
  static const std::set<std::string> kNone;
  const auto it = adj_.find(user);
  return it == adj_.end() ? kNone : it->second;
}

std::size_t FriendGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& [u, n] : adj_) twice += n.size();
  return twice / 2;
}

FriendGraph read_friends(const std::filesystem::path& path) {
  FriendGraph graph;
  const std::string source = path.string();
  for_each_record(path, [&](std::string_view line, std::size_t n) {
    const auto f = fields(line, 2, 2, source, n);
    graph.add(std::string(f[0]), std::string(f[1]));
  });
  return graph;
}

void write_friends(const std::filesystem::path& path, const FriendGraph& graph) {
  std::ofstream out = open_output(path);
  for (const auto& [u, ns] : graph.adjacency()) {
    for (const auto& v : ns) {
      if (u < v) out << u << '\t' << v << '\n';
    }
  }
}

GroupSet build_cocheckin_groups(std::span<const CheckinRecord> checkins,
                                const FriendGraph& friends,
                                const CocheckinOptions& options) {
  std::map<std::string, std::vector<const CheckinRecord*>> by_item;
  for (const auto& c : checkins) by_item[c.item].push_back(&c);

  GroupCollector out;
  for (auto& [item, events] : by_item) {
    std::sort(events.begin(), events.end(), [](const auto* a, const auto* b) {
      return std::tie(a->timestamp, a->user) < std::tie(b->timestamp, b->user);
    });
    std::size_t start = 0;
    while (start < events.size()) {
      std::size_t end = start + 1;
      while (end < events.size() &&
             events[end]->timestamp - events[start]->timestamp <= options.window) {
        ++end;
      }
      std::vector<std::string> present;
      for (std::size_t i = start; i < end; ++i) present.push_back(events[i]->user);
      std::sort(present.begin(), present.end());
      present.erase(std::unique(present.begin(), present.end()), present.end());
      start = end;
      if (present.size() < 2) continue;

      if (!options.require_friends) {
        out.add(present, item);
        continue;
      }
      const std::size_t n = present.size();
      std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
          adj[a][b] = adj[b][a] = friends.friends(present[a], present[b]);
        }
      }
      std::vector<int> all(n);
      for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<int>(i);
      std::vector<int> r;
      std::vector<std::vector<int>> cliques;
      maximal_cliques(adj, r, all, {}, cliques);
      std::sort(cliques.begin(), cliques.end());
      for (const auto& clique : cliques) {
        if (clique.size() < 2) continue;
        std::vector<std::string> members;
        for (int v : clique) members.push_back(present[v]);
        out.add(std::move(members), item);
      }
    }
  }
  return out.finish();
}

Ratings ratings_from_checkins(std::span<const CheckinRecord> checkins) {
  Ratings ratings;
  for (const auto& c : checkins) {
    if (c.rating) ratings[c.user][c.item] = *c.rating;
  }
  return ratings;
}

std::optional<double> pearson_correlation(std::span<const double> a,
                                          std::span<const double> b) {
  if (a.size() != b.size()) {
    throw PreconditionError("PCC needs paired samples of equal length");
  }
  const std::size_t n = a.size();
  if (n < 2) return std::nullopt;
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= double(n);
  mb /= double(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::optional<double> user_similarity(const std::map<std::string, double>& a,
                                      const std::map<std::string, double>& b) {
  std::vector<double> xa, xb;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      xa.push_back(ia->second);
      xb.push_back(ib->second);
      ++ia;
      ++ib;
    }
  }
  return pearson_correlation(xa, xb);
}

std::vector<std::string> consensus_items(const Ratings& ratings,
                                         std::span<const std::string> members,
                                         double floor) {
  if (members.empty()) return {};
  std::vector<std::string> out;
  const auto first = ratings.find(members[0]);
  if (first == ratings.end()) return out;
  for (const auto& [item, rating] : first->second) {
    bool all = rating > floor;
    for (std::size_t m = 1; all && m < members.size(); ++m) {
      const auto it = ratings.find(members[m]);
      if (it == ratings.end()) {
        all = false;
        break;
      }
      const auto r = it->second.find(item);
      all = r != it->second.end() && r->second > floor;
    }
    if (all) out.push_back(item);
  }
  return out;
}

std::size_t sample_group_size(const GroupSizeSpec& spec, std::mt19937_64& rng) {
  if (spec.min < 2) throw PreconditionError("groups need at least two members");
  if (spec.max < spec.min) throw PreconditionError("group size max below min");
  const double excess = spec.mean - double(spec.min);
  if (excess <= 0.0) return spec.min;
  std::geometric_distribution<std::size_t> geo(1.0 / (excess + 1.0));
  for (;;) {
    const std::size_t s = spec.min + geo(rng);
    if (s <= spec.max) return s;
  }
}

GroupSet build_similarity_groups(const Ratings& ratings,
                                 const SimilarityOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::vector<std::string> users;
  for (const auto& [u, r] : ratings) users.push_back(u);
  GroupCollector out;
  if (users.size() < 2) return out.finish();

  std::map<std::pair<std::size_t, std::size_t>, bool> similar;
  auto is_similar = [&](std::size_t a, std::size_t b) {
    const auto key = std::minmax(a, b);
    auto [it, inserted] = similar.try_emplace(key, false);
    if (inserted) {
      const auto pcc = user_similarity(ratings.at(users[key.first]),
                                       ratings.at(users[key.second]));
      it->second = pcc && *pcc > options.threshold;
    }
    return it->second;
  };

  std::uniform_int_distribution<std::size_t> pick(0, users.size() - 1);
  std::vector<std::size_t> order(users.size());
  const std::size_t attempts = attempts_for(options.max_attempts, options.num_groups);
  std::size_t made = 0;
  for (std::size_t a = 0; a < attempts && made < options.num_groups; ++a) {
    const std::size_t target = sample_group_size(options.size, rng);
    std::vector<std::size_t> group{pick(rng)};
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t cand : order) {
      if (group.size() >= target) break;
      if (std::find(group.begin(), group.end(), cand) != group.end()) continue;
      bool ok = true;
      for (std::size_t m : group) {
        if (!is_similar(m, cand)) {
          ok = false;
          break;
        }
      }
      if (ok) group.push_back(cand);
    }
    if (group.size() < options.size.min) continue;
    std::vector<std::string> members;
    for (std::size_t m : group) members.push_back(users[m]);
    if (out.contains(members)) continue;
    add_consensus_group(out, ratings, members);
    if (out.contains(members)) ++made;
  }
  return out.finish();
}

GroupSet build_random_groups(const Ratings& ratings,
                             const RandomGroupOptions& options) {
  if (options.size.min < 2) {
    throw PreconditionError("random groups need at least two members");
  }
  std::mt19937_64 rng(options.seed);
  std::vector<std::string> users;
  for (const auto& [u, r] : ratings) users.push_back(u);
  GroupCollector out;
  if (users.size() < options.size.min) return out.finish();

  const std::size_t attempts = attempts_for(options.max_attempts, options.num_groups);
  std::size_t made = 0;
  for (std::size_t a = 0; a < attempts && made < options.num_groups; ++a) {
    const std::size_t target =
        std::min(sample_group_size(options.size, rng), users.size());
    std::vector<std::string> members;
    std::sample(users.begin(), users.end(), std::back_inserter(members), target, rng);
    std::shuffle(members.begin(), members.end(), rng);
    if (out.contains(members)) continue;
    add_consensus_group(out, ratings, members);
    if (out.contains(members)) ++made;
  }
  return out.finish();
}

void add_groups(InteractionStore& store, const GroupSet& groups) {
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::string name = "g" + std::to_string(store.groups.size());
    const Index gi = store.groups.intern(name);
    store.group_members.resize(store.groups.size());
    for (const auto& m : groups.members[g]) {
      store.group_members[gi].push_back(store.users.intern(m));
    }
    for (const auto& item : groups.items[g]) {
      store.add_group_item(gi, store.items.intern(item));
    }
  }
  store.sync_sizes();
}

void SplitSpec::validate() const {
  if (train < 0.0 || validation < 0.0 || test < 0.0 ||
      std::abs(train + validation + test - 1.0) > 1e-9) {
    throw PreconditionError("split proportions must be non-negative and sum to 1");
  }
  if (folds < 2) throw PreconditionError("cross-validation needs at least 2 folds");
}

Split split_interactions(std::span<const GroupItem> pairs, const SplitSpec& spec) {
  spec.validate();
  std::vector<GroupItem> all(pairs.begin(), pairs.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  std::map<Index, std::size_t> count;
  for (const auto& p : all) ++count[p.group];
  const std::size_t n = all.size();
  const auto quota = [n](double share) {
    return static_cast<std::size_t>(std::floor(double(n) * share + 1e-9));
  };
  std::size_t want_test = quota(spec.test);
  std::size_t want_val = quota(spec.validation);

  std::mt19937_64 rng(spec.seed);
  std::vector<GroupItem> order = all;
  std::shuffle(order.begin(), order.end(), rng);

  std::map<Index, std::size_t> held;
  Split split;
  for (const auto& p : order) {
    const bool can_hold = count[p.group] >= 2 && held[p.group] + 1 < count[p.group];
    if (can_hold && want_test > 0) {
      split.test.push_back(p);
      ++held[p.group];
      --want_test;
    } else if (can_hold && want_val > 0) {
      split.validation.push_back(p);
      ++held[p.group];
      --want_val;
    } else {
      split.train.push_back(p);
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.validation.begin(), split.validation.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<std::vector<GroupItem>> kfold(std::span<const GroupItem> pairs,
                                          const SplitSpec& spec) {
  spec.validate();
  std::vector<GroupItem> all(pairs.begin(), pairs.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::mt19937_64 rng(spec.seed);
  std::shuffle(all.begin(), all.end(), rng);
  std::vector<std::vector<GroupItem>> folds(static_cast<std::size_t>(spec.folds));
  for (std::size_t i = 0; i < all.size(); ++i) folds[i % folds.size()].push_back(all[i]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

Split fold_split(const std::vector<std::vector<GroupItem>>& folds, int fold) {
  const int k = static_cast<int>(folds.size());
  if (k < 2 || fold < 0 || fold >= k) throw PreconditionError("fold index out of range");
  const int val = (fold + 1) % k;
  Split split;
  for (int f = 0; f < k; ++f) {
    auto& dst = f == fold ? split.test : f == val ? split.validation : split.train;
    dst.insert(dst.end(), folds[f].begin(), folds[f].end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.validation.begin(), split.validation.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace pega
