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

#include "pega/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pega/errors.hpp"
#include "pega/text_io.hpp"

namespace pega {
namespace {

constexpr std::string_view kFiller[] = {
    "the",     "a",       "of",      "and",     "in",      "on",
    "with",    "for",     "to",      "was",     "is",      "it",
    "this",    "that",    "place",   "food",    "menu",    "table",
    "order",   "plate",   "soup",    "bread",   "sauce",   "rice",
    "noodle",  "salad",   "dessert", "coffee",  "tea",     "waiter",
    "server",  "counter", "street",  "corner",  "parking", "window",
    "chair",   "booth",   "portion", "side",    "dish",    "flavor",
    "spice",   "pepper",  "garlic",  "onion",   "cheese",  "pizza",
    "burger",  "fries",   "steak",   "fish",    "shrimp",  "taco",
    "we",      "our",     "they",    "their",   "had",     "got",
    "ordered", "served",  "came",    "with",    "some",    "two",
    "three",   "small",   "large",   "warm",    "cold",    "fresh",
    "crispy",  "soft",    "sweet",   "salty",   "sour",    "spicy",
    "lunch",   "dinner",  "brunch",  "weekend", "evening", "morning",
    "downtown", "block",  "line",    "wait",    "bill",    "tip",
};

std::vector<std::string> neutral_words(const Lexicon& lexicon) {
  std::vector<std::string> out;
  std::vector<int> hits;
  for (std::string_view w : kFiller) {
    hits.clear();
    lexicon.match(w, hits);
    if (hits.empty()) out.emplace_back(w);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.size() < 10) throw PreconditionError("lexicon matches nearly every filler word");
  return out;
}

// A literal word for each pattern; wildcards become their bare prefix.
std::vector<std::vector<std::string>> category_words(const Lexicon& lexicon) {
  std::vector<std::vector<std::string>> out;
  for (const auto& cat : lexicon.categories()) {
    std::vector<std::string> words;
    for (std::string p : cat.patterns) {
      if (!p.empty() && p.back() == '*') p.pop_back();
      if (!p.empty()) words.push_back(p);
    }
    out.push_back(std::move(words));
  }
  return out;
}

std::vector<int> profile(const Lexicon& lexicon,
                         std::initializer_list<std::pair<Trait, Level>> parts) {
  std::vector<int> out;
  for (std::size_t c = 0; c < lexicon.size(); ++c) {
    const auto& cat = lexicon.categories()[c];
    for (const auto& [t, l] : parts) {
      if (cat.trait == t && cat.level == l) out.push_back(static_cast<int>(c));
    }
  }
  return out;
}

template <class T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
  return v[d(rng)];
}

std::size_t uniform(std::size_t lo, std::size_t hi, std::mt19937_64& rng) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::string compose_review(const std::vector<std::string>& filler,
                           const std::vector<std::vector<std::string>>& words,
                           const std::vector<int>& focus, std::size_t min_chars,
                           std::mt19937_64& rng) {
  std::bernoulli_distribution focus_use(0.5);
  std::bernoulli_distribution background(0.03);
  std::vector<std::string> planted;
  for (int c : focus) {
    if (!focus_use(rng)) continue;
    const std::size_t n = uniform(1, 3, rng);
    for (std::size_t i = 0; i < n; ++i) planted.push_back(pick(words[c], rng));
  }
  for (const auto& w : words) {
    if (background(rng)) planted.push_back(pick(w, rng));
  }

  std::vector<std::string> tokens = planted;
  std::size_t chars = 0;
  for (const auto& t : tokens) chars += t.size() + 1;
  const std::size_t target = min_chars + uniform(0, 400, rng);
  while (chars < target) {
    tokens.push_back(pick(filler, rng));
    chars += tokens.back().size() + 1;
  }
  std::shuffle(tokens.begin(), tokens.end(), rng);

  std::string text;
  std::size_t in_sentence = 0;
  std::size_t sentence_len = uniform(6, 16, rng);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string w = tokens[i];
    if (in_sentence == 0) w[0] = static_cast<char>(w[0] - 'a' + 'A');
    text += w;
    if (++in_sentence == sentence_len || i + 1 == tokens.size()) {
      text += ". ";
      in_sentence = 0;
      sentence_len = uniform(6, 16, rng);
    } else {
      text += ' ';
    }
  }
  while (!text.empty() && text.back() == ' ') text.pop_back();
  return text;
}

// Any member except the first.
std::size_t pick_other(const std::vector<std::size_t>& members, std::mt19937_64& rng) {
  return members[uniform(1, members.size() - 1, rng)];
}

}  // namespace

void SynthSpec::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw PreconditionError(what);
  };
  require(users >= 4 && items >= 2, "synthetic data needs at least 4 users and 2 items");
  require(clusters >= 2 && clusters <= items, "clusters must be in [2, items]");
  require(dominance >= 0.0 && dominance <= 1.0, "dominance must be in [0, 1]");
  require(assertive_share > 0.0 && assertive_share < 1.0,
          "assertive_share must be in (0, 1)");
  require(items_per_user >= 1 && items_per_user <= items,
          "items_per_user must be in [1, items]");
  require(in_cluster >= 0.0 && in_cluster <= 1.0, "in_cluster must be in [0, 1]");
  require(min_group_size >= 2 && min_group_size <= max_group_size,
          "group sizes must satisfy 2 <= min <= max");
  require(max_group_size < users, "max_group_size must be below the user count");
  require(min_group_items >= 1 && min_group_items <= max_group_items,
          "group item counts must satisfy 1 <= min <= max");
  require(reviews_per_user >= 1, "reviews_per_user must be >= 1");
  require(consensus_outsider >= 0.0 && consensus_outsider <= 1.0,
          "consensus_outsider must be in [0, 1]");
  require(enthusiast_share >= 0.0 && enthusiast_share <= 1.0,
          "enthusiast_share must be in [0, 1]");
}

SynthData synthesize(const SynthSpec& spec, const Lexicon& lexicon) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  SynthData data;
  InteractionStore& store = data.store;

  for (std::size_t u = 0; u < spec.users; ++u) store.users.intern("u" + std::to_string(u));
  for (std::size_t i = 0; i < spec.items; ++i) store.items.intern("i" + std::to_string(i));
  store.sync_sizes();

  const auto cluster_of_user = [&](std::size_t u) { return u % spec.clusters; };
  std::vector<std::vector<Index>> pool(spec.clusters);
  for (std::size_t i = 0; i < spec.items; ++i) {
    pool[i % spec.clusters].push_back(static_cast<Index>(i));
  }

  std::bernoulli_distribution assertive_draw(spec.assertive_share);
  data.assertive.resize(spec.users);
  // Guarantee both kinds exist.
  for (std::size_t u = 0; u < spec.users; ++u) data.assertive[u] = assertive_draw(rng);
  data.assertive[0] = true;
  data.assertive[1] = false;

  // User histories.
  for (std::size_t u = 0; u < spec.users; ++u) {
    const auto& own = pool[cluster_of_user(u)];
    const std::size_t want = spec.items_per_user;
    std::size_t n_in = static_cast<std::size_t>(std::lround(double(want) * spec.in_cluster));
    n_in = std::min(n_in, own.size());
    std::vector<Index> chosen;
    std::sample(own.begin(), own.end(), std::back_inserter(chosen), n_in, rng);
    std::uniform_int_distribution<Index> any(0, static_cast<Index>(spec.items - 1));
    std::size_t guard = 0;
    while (chosen.size() < want && guard++ < 100 * want) {
      const Index item = any(rng);
      if (std::find(chosen.begin(), chosen.end(), item) == chosen.end()) chosen.push_back(item);
    }
    for (Index item : chosen) store.add_user_item(static_cast<Index>(u), item);
  }

  // Reviews.
  const auto filler = neutral_words(lexicon);
  const auto words = category_words(lexicon);
  const auto bold = profile(lexicon, {{Trait::kOpenness, Level::kHigh},
                                      {Trait::kExtraversion, Level::kHigh},
                                      {Trait::kNeuroticism, Level::kHigh}});
  const auto easy = profile(lexicon, {{Trait::kAgreeableness, Level::kHigh},
                                      {Trait::kNeuroticism, Level::kLow}});
  std::bernoulli_distribution short_extra(0.1);
  for (std::size_t u = 0; u < spec.users; ++u) {
    const auto& focus = data.assertive[u] ? bold : easy;
    const std::string& name = store.users.name(static_cast<Index>(u));
    for (std::size_t r = 0; r < spec.reviews_per_user; ++r) {
      data.reviews.add(name, compose_review(filler, words, focus, spec.review_chars, rng));
    }
    if (short_extra(rng)) {
      data.reviews.add(name, compose_review(filler, words, focus, 200, rng).substr(0, 200));
    }
  }

  // Groups.
  std::vector<std::vector<std::size_t>> by_cluster(spec.clusters);
  std::vector<std::size_t> bold_users, all_users;
  for (std::size_t u = 0; u < spec.users; ++u) {
    if (data.assertive[u]) bold_users.push_back(u);
    all_users.push_back(u);
    by_cluster[cluster_of_user(u)].push_back(u);
  }
  const auto n_dominant =
      static_cast<std::size_t>(std::lround(double(spec.groups) * spec.dominance));
  std::vector<bool> kinds(spec.groups, false);
  for (std::size_t g = 0; g < n_dominant; ++g) kinds[g] = true;
  std::shuffle(kinds.begin(), kinds.end(), rng);

  std::bernoulli_distribution outsider(spec.consensus_outsider);
  store.group_members.resize(0);
  for (std::size_t g = 0; g < spec.groups; ++g) {
    const std::size_t size = uniform(spec.min_group_size, spec.max_group_size, rng);
    const std::size_t n_items = uniform(spec.min_group_items, spec.max_group_items, rng);
    std::vector<std::size_t> members;
    std::vector<Index> items;
    GroupLabel label;
    label.dominant = kinds[g];

    auto add_unique = [&](const std::vector<std::size_t>& from, std::size_t count) {
      std::vector<std::size_t> shuffled = from;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      for (std::size_t u : shuffled) {
        if (members.size() >= count) break;
        if (std::find(members.begin(), members.end(), u) == members.end()) {
          members.push_back(u);
        }
      }
    };

    if (label.dominant) {
      const std::size_t leader = pick(bold_users, rng);
      members.push_back(leader);
      add_unique(all_users, size);
      label.leader = store.users.name(static_cast<Index>(leader));
      const std::size_t enthusiast = members.size() > 1 ? pick_other(members, rng) : leader;
      std::bernoulli_distribution from_enthusiast(spec.enthusiast_share);
      std::size_t guard = 0;
      while (items.size() < n_items && guard++ < 100 * n_items) {
        const std::size_t source = from_enthusiast(rng) ? enthusiast : leader;
        const Index item = pick(store.user_items[source], rng);
        if (std::find(items.begin(), items.end(), item) == items.end()) items.push_back(item);
      }
    } else {
      const std::size_t c = uniform(0, spec.clusters - 1, rng);
      const bool with_outsider = outsider(rng);
      const std::size_t core = with_outsider ? size - 1 : size;
      add_unique(by_cluster[c], core);
      if (members.size() < core) add_unique(all_users, core);
      if (with_outsider) {
        std::vector<std::size_t> others;
        for (std::size_t u : bold_users) {
          if (cluster_of_user(u) != c) others.push_back(u);
        }
        if (!others.empty()) members.push_back(pick(others, rng));
      }
      // Cluster items ranked by how many core members interacted with them.
      std::vector<std::pair<int, Index>> ranked;
      std::vector<Index> candidates = pool[c];
      std::shuffle(candidates.begin(), candidates.end(), rng);
      for (Index item : candidates) {
        int votes = 0;
        for (std::size_t m = 0; m < core && m < members.size(); ++m) {
          votes += contains_sorted(store.user_items[members[m]], item) ? 1 : 0;
        }
        ranked.emplace_back(-votes, item);
      }
      std::stable_sort(ranked.begin(), ranked.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      for (std::size_t k = 0; k < ranked.size() && items.size() < n_items; ++k) {
        items.push_back(ranked[k].second);
      }
    }
    std::shuffle(members.begin(), members.end(), rng);

    label.group = "g" + std::to_string(g);
    const Index gi = store.groups.intern(label.group);
    store.group_members.resize(store.groups.size());
    for (std::size_t u : members) store.group_members[gi].push_back(static_cast<Index>(u));
    for (Index item : items) store.add_group_item(gi, item);
    data.labels.push_back(std::move(label));
  }
  store.sync_sizes();
  store.validate();

  // Check-ins, ratings and friendships for the dataset builders.
  constexpr std::int64_t kYear = 365LL * 24 * 3600;
  std::uniform_int_distribution<std::int64_t> when(0, kYear);
  for (std::size_t u = 0; u < spec.users; ++u) {
    for (Index item : store.user_items[u]) {
      const bool liked = static_cast<std::size_t>(item) % spec.clusters == cluster_of_user(u);
      const double rating = liked ? double(uniform(4, 5, rng)) : double(uniform(1, 3, rng));
      data.checkins.push_back({store.users.name(static_cast<Index>(u)),
                               store.items.name(item), when(rng), rating});
    }
  }
  std::uniform_int_distribution<std::int64_t> jitter(0, 600);
  for (std::size_t g = 0; g < store.num_groups(); ++g) {
    const auto& members = store.group_members[g];
    for (Index item : store.group_items[g]) {
      const std::int64_t t0 = when(rng);
      for (Index u : members) {
        data.checkins.push_back({store.users.name(u), store.items.name(item),
                                 t0 + jitter(rng), double(uniform(4, 5, rng))});
      }
    }
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        data.friends.add(store.users.name(members[a]), store.users.name(members[b]));
      }
    }
  }
  for (std::size_t u = 0; u < spec.users; ++u) {
    for (int k = 0; k < 2; ++k) {
      const std::size_t v = uniform(0, spec.users - 1, rng);
      if (cluster_of_user(v) == cluster_of_user(u)) {
        data.friends.add(store.users.name(static_cast<Index>(u)),
                         store.users.name(static_cast<Index>(v)));
      }
    }
  }
  return data;
}

void write_synth(const std::filesystem::path& dir, const SynthData& data) {
  write_reviews(dir / "reviews.tsv", data.reviews);
  write_user_items(dir / "user_items.tsv", data.store);
  write_groups(dir / "groups.tsv", data.store);
  write_group_items(dir / "group_items.tsv", data.store, data.store.group_item_pairs());
  {
    std::ofstream out = open_output(dir / "labels.tsv");
    for (const auto& l : data.labels) {
      out << l.group << '\t' << (l.dominant ? "dominant" : "consensus") << '\t'
          << (l.leader.empty() ? "-" : l.leader) << '\n';
    }
  }
  write_checkins(dir / "checkins.tsv", data.checkins);
  write_friends(dir / "friends.tsv", data.friends);
}

std::vector<GroupLabel> read_labels(const std::filesystem::path& path) {
  std::vector<GroupLabel> out;
  const std::string source = path.string();
  for_each_record(path, [&](std::string_view line, std::size_t n) {
    const auto f = split(line, '\t');
    if (f.size() != 3) throw ParseError(source, n, "expected 3 tab-separated fields");
    GroupLabel l;
    l.group = std::string(trim(f[0]));
    const auto kind = trim(f[1]);
    if (kind != "dominant" && kind != "consensus") {
      throw ParseError(source, n, "unknown group kind '" + std::string(kind) + "'");
    }
    l.dominant = kind == "dominant";
    if (trim(f[2]) != "-") l.leader = std::string(trim(f[2]));
    out.push_back(std::move(l));
  });
  return out;
}

}  // namespace pega
