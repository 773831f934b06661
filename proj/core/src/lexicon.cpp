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

#include "pega/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "pega/errors.hpp"
#include "pega/text_io.hpp"

namespace pega {
namespace {

constexpr int kCategoriesPerTrait = 20;
constexpr int kCategoriesPerLevel = 10;

bool is_lower_alpha(char c) { return c >= 'a' && c <= 'z'; }

void add_unique(std::vector<int>& v, int category) {
  if (v.empty() || v.back() != category) v.push_back(category);
}

Trait parse_trait(std::string_view tag, const std::string& source,
                  std::size_t line) {
  if (tag == "O") return Trait::kOpenness;
  if (tag == "C") return Trait::kConscientiousness;
  if (tag == "E") return Trait::kExtraversion;
  if (tag == "A") return Trait::kAgreeableness;
  if (tag == "N") return Trait::kNeuroticism;
  throw ParseError(source, line,
                   "unknown trait tag '" + std::string(tag) + "'");
}

Level parse_level(std::string_view tag, const std::string& source,
                  std::size_t line) {
  if (tag == "High") return Level::kHigh;
  if (tag == "Low") return Level::kLow;
  throw ParseError(source, line, "unknown level '" + std::string(tag) + "'");
}

}  // namespace

char trait_tag(Trait trait) {
  switch (trait) {
    case Trait::kOpenness: return 'O';
    case Trait::kConscientiousness: return 'C';
    case Trait::kExtraversion: return 'E';
    case Trait::kAgreeableness: return 'A';
    case Trait::kNeuroticism: return 'N';
  }
  return '?';
}

std::string_view level_name(Level level) {
  return level == Level::kHigh ? "High" : "Low";
}

Lexicon::Lexicon(std::vector<Category> categories)
    : categories_(std::move(categories)) {
  if (categories_.size() != static_cast<std::size_t>(kTraitDims)) {
    throw StructuralError("lexicon must hold exactly " +
                          std::to_string(kTraitDims) + " categories, found " +
                          std::to_string(categories_.size()));
  }
  std::set<std::string> names;
  std::map<std::pair<Trait, Level>, int> per_level;
  for (const Category& cat : categories_) {
    if (!names.insert(cat.name).second) {
      throw StructuralError("duplicate category name '" + cat.name + "'");
    }
    if (cat.patterns.empty()) {
      throw StructuralError("category '" + cat.name + "' has no patterns");
    }
    ++per_level[{cat.trait, cat.level}];
  }
  for (Trait t : {Trait::kOpenness, Trait::kConscientiousness,
                  Trait::kExtraversion, Trait::kAgreeableness,
                  Trait::kNeuroticism}) {
    for (Level l : {Level::kHigh, Level::kLow}) {
      const int count = per_level[{t, l}];
      if (count != kCategoriesPerLevel) {
        throw StructuralError(
            std::string("trait ") + trait_tag(t) + "/" +
            std::string(level_name(l)) + " has " + std::to_string(count) +
            " categories, expected " + std::to_string(kCategoriesPerLevel) +
            " (" + std::to_string(kCategoriesPerTrait) + " per trait)");
      }
    }
  }

  for (int c = 0; c < kTraitDims; ++c) {
    for (const std::string& pattern : categories_[c].patterns) {
      const bool wildcard = !pattern.empty() && pattern.back() == '*';
      const std::string_view stem =
          wildcard ? std::string_view(pattern).substr(0, pattern.size() - 1)
                   : std::string_view(pattern);
      if (stem.empty() || !std::all_of(stem.begin(), stem.end(), is_lower_alpha)) {
        throw StructuralError("category '" + categories_[c].name +
                              "' has invalid pattern '" + pattern + "'");
      }
      auto& table = wildcard ? prefix_ : exact_;
      add_unique(table[std::string(stem)], c);
      if (wildcard) longest_prefix_ = std::max(longest_prefix_, stem.size());
    }
  }
}

void Lexicon::match(std::string_view token, std::vector<int>& out) const {
  const std::size_t first = out.size();
  if (auto it = exact_.find(std::string(token)); it != exact_.end()) {
    out.insert(out.end(), it->second.begin(), it->second.end());
  }
  const std::size_t limit = std::min(token.size(), longest_prefix_);
  std::string key;
  key.reserve(limit);
  for (std::size_t len = 1; len <= limit; ++len) {
    key.push_back(token[len - 1]);
    if (auto it = prefix_.find(key); it != prefix_.end()) {
      out.insert(out.end(), it->second.begin(), it->second.end());
    }
  }
  std::sort(out.begin() + first, out.end());
  out.erase(std::unique(out.begin() + first, out.end()), out.end());
}

Lexicon parse_lexicon(std::istream& in, const std::string& source) {
  std::vector<Category> categories;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 4) {
      throw ParseError(source, number,
                       "expected 4 tab-separated fields, found " +
                           std::to_string(fields.size()));
    }
    Category cat;
    cat.trait = parse_trait(trim(fields[0]), source, number);
    cat.level = parse_level(trim(fields[1]), source, number);
    cat.name = std::string(trim(fields[2]));
    if (cat.name.empty()) throw ParseError(source, number, "empty category name");
    for (std::string_view p : split(fields[3], ',')) {
      p = trim(p);
      if (p.empty()) throw ParseError(source, number, "empty pattern");
      std::string pattern(p);
      for (char c : pattern) {
        if (c >= 'A' && c <= 'Z') {
          throw ParseError(source, number,
                           "pattern '" + pattern + "' is not lowercase");
        }
      }
      cat.patterns.push_back(std::move(pattern));
    }
    categories.push_back(std::move(cat));
  }
  return Lexicon(std::move(categories));
}

Lexicon parse_lexicon(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return parse_lexicon(in, path.string());
}

Tokens tokenize(std::string_view text) {
  Tokens tokens;
  std::string current;
  for (char ch : text) {
    if (ch >= 'A' && ch <= 'Z') {
      current.push_back(static_cast<char>(ch - 'A' + 'a'));
    } else if (ch >= 'a' && ch <= 'z') {
      current.push_back(ch);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

CategoryFrequencies category_tf(std::span<const std::string> review,
                                const Lexicon& lexicon) {
  CategoryFrequencies tf{};
  if (review.empty()) return tf;
  std::vector<int> hits;
  for (const std::string& token : review) {
    hits.clear();
    lexicon.match(token, hits);
    for (int c : hits) tf[c] += 1.0;
  }
  const double n = static_cast<double>(review.size());
  for (double& v : tf) v /= n;
  return tf;
}

TraitVector extract_personality(std::span<const Tokens> reviews,
                                const Lexicon& lexicon) {
  if (reviews.empty()) {
    throw PreconditionError("extract_personality needs at least one review");
  }
  const double n = static_cast<double>(reviews.size());
  std::vector<CategoryFrequencies> tfs;
  tfs.reserve(reviews.size());
  std::array<int, kTraitDims> df{};
  for (const Tokens& review : reviews) {
    tfs.push_back(category_tf(review, lexicon));
    for (int c = 0; c < kTraitDims; ++c) {
      if (tfs.back()[c] > 0.0) ++df[c];
    }
  }
  TraitVector p = TraitVector::Zero();
  for (int c = 0; c < kTraitDims; ++c) {
    if (df[c] == 0) continue;
    const double idf = std::log(n / df[c]);
    double sum = 0.0;
    for (const auto& tf : tfs) sum += tf[c] * idf;
    p[c] = sum / n;
  }
  return p;
}

double trait_level_sum(const TraitVector& personality, const Lexicon& lexicon,
                       Trait trait, Level level) {
  double sum = 0.0;
  for (int c = 0; c < kTraitDims; ++c) {
    const Category& cat = lexicon.categories()[c];
    if (cat.trait == trait && cat.level == level) sum += personality[c];
  }
  return sum;
}

}  // namespace pega
