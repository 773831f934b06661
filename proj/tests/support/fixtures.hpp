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

#ifndef PEGA_TESTS_SUPPORT_FIXTURES_HPP_
#define PEGA_TESTS_SUPPORT_FIXTURES_HPP_

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "pega/aggregator.hpp"
#include "pega/interactions.hpp"
#include "pega/lexicon.hpp"
#include "oracles.hpp"

namespace pega::testing {

#ifndef PEGA_SOURCE_DIR
#error "PEGA_SOURCE_DIR must be defined"
#endif

inline std::filesystem::path source_dir() { return PEGA_SOURCE_DIR; }
inline std::filesystem::path test_lexicon_path() {
  return source_dir() / "data" / "lexicon" / "test_lexicon.tsv";
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("pega-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string syllable_word(std::mt19937_64& rng, int syllables) {
  static constexpr const char* kParts[] = {"ka", "lo", "mi", "ne", "ru", "ti",
                                           "sa", "po", "be", "du"};
  std::uniform_int_distribution<int> pick(0, 9);
  std::string w;
  for (int i = 0; i < syllables; ++i) w += kParts[pick(rng)];
  return w;
}

/// 100 categories over a small vocabulary; some patterns are prefixes and
/// some words fall into several categories.
inline std::vector<Category> random_categories(std::mt19937_64& rng) {
  std::vector<Category> cats;
  const Trait traits[] = {Trait::kOpenness, Trait::kConscientiousness,
                          Trait::kExtraversion, Trait::kAgreeableness,
                          Trait::kNeuroticism};
  std::bernoulli_distribution wildcard(0.3);
  std::uniform_int_distribution<int> n_patterns(1, 3);
  std::uniform_int_distribution<int> syllables(1, 2);
  for (Trait t : traits) {
    for (Level l : {Level::kHigh, Level::kLow}) {
      for (int k = 0; k < 10; ++k) {
        Category c;
        c.name = std::string(1, trait_tag(t)) + std::string(level_name(l)) + std::to_string(k);
        c.trait = t;
        c.level = l;
        const int n = n_patterns(rng);
        for (int p = 0; p < n; ++p) {
          std::string w = syllable_word(rng, syllables(rng));
          if (wildcard(rng)) w += '*';
          if (std::find(c.patterns.begin(), c.patterns.end(), w) == c.patterns.end()) {
            c.patterns.push_back(w);
          }
        }
        cats.push_back(std::move(c));
      }
    }
  }
  return cats;
}

inline std::vector<std::string> random_review(std::mt19937_64& rng, std::size_t max_tokens) {
  std::uniform_int_distribution<std::size_t> len(0, max_tokens);
  std::uniform_int_distribution<int> syllables(1, 3);
  std::vector<std::string> out(len(rng));
  for (auto& t : out) t = syllable_word(rng, syllables(rng));
  return out;
}

inline TraitVector random_traits(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(0.0, scale);
  TraitVector v;
  for (int i = 0; i < kTraitDims; ++i) v[i] = u(rng);
  return v;
}

inline oracle::Vec as_vec(const TraitVector& v) { return {v.data(), v.data() + v.size()}; }

inline RowMatrix random_rows(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                             double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  RowMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

/// Store with `users` users, `items` items and random user-item edges.
inline InteractionStore random_store(std::mt19937_64& rng, std::size_t users,
                                     std::size_t items, double density) {
  InteractionStore s;
  for (std::size_t u = 0; u < users; ++u) s.users.intern("u" + std::to_string(u));
  for (std::size_t i = 0; i < items; ++i) s.items.intern("i" + std::to_string(i));
  s.sync_sizes();
  std::bernoulli_distribution edge(density);
  for (std::size_t u = 0; u < users; ++u) {
    for (std::size_t i = 0; i < items; ++i) {
      if (edge(rng)) s.add_user_item(Index(u), Index(i));
    }
  }
  return s;
}

/// Aggregator parameters at a scale where tanh and softmax are far from
/// saturation, so finite differences are well conditioned.
inline AggregatorParams random_params(std::mt19937_64& rng, int latent, int hidden,
                                      int layers, double lambda = 0.3) {
  AggregatorParams p = AggregatorParams::random(latent, hidden, layers, lambda, rng);
  return p;
}

inline std::vector<oracle::Vec> rows_as_vecs(const RowMatrix& m) {
  std::vector<oracle::Vec> out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out.emplace_back(m.row(r).data(), m.row(r).data() + m.cols());
  }
  return out;
}

}  // namespace pega::testing

#endif  // PEGA_TESTS_SUPPORT_FIXTURES_HPP_
