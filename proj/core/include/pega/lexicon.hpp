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

// Trait lexicons and review-based personality extraction.
//
// A lexicon holds exactly 100 word categories, 20 per Big-Five trait (10
// tagged High, 10 tagged Low). A user's personality vector is the averaged
// TF-IDF of each category over the user's reviews:
//
//   P_c = (1/N) * sum_i tf_{i,c} * ln(N / df_c)
//
// where tf_{i,c} is the fraction of review i's tokens matching category c and
// df_c counts the reviews with at least one match. Categories with df_c = 0
// contribute 0.

#ifndef PEGA_LEXICON_HPP_
#define PEGA_LEXICON_HPP_

#include <array>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pega/types.hpp"

namespace pega {

enum class Trait { kOpenness, kConscientiousness, kExtraversion,
                   kAgreeableness, kNeuroticism };
enum class Level { kHigh, kLow };

char trait_tag(Trait trait);
std::string_view level_name(Level level);

struct Category {
  std::string name;
  Trait trait = Trait::kOpenness;
  Level level = Level::kHigh;
  /// Lowercase terms; a trailing '*' turns the term into a prefix match.
  std::vector<std::string> patterns;
};

class Lexicon {
 public:
  /// Validates every invariant; throws StructuralError on violation.
  explicit Lexicon(std::vector<Category> categories);

  const std::vector<Category>& categories() const { return categories_; }
  std::size_t size() const { return categories_.size(); }

  /// Appends to `out` every category index matched by `token`, ascending and
  /// without repeats.
  void match(std::string_view token, std::vector<int>& out) const;

 private:
  std::vector<Category> categories_;
  std::unordered_map<std::string, std::vector<int>> exact_;
  std::unordered_map<std::string, std::vector<int>> prefix_;
  std::size_t longest_prefix_ = 0;
};

/// Parses `trait<TAB>level<TAB>name<TAB>p1,p2,...` lines. Blank lines and
/// lines starting with '#' are skipped.
Lexicon parse_lexicon(std::istream& in, const std::string& source = "<lexicon>");
Lexicon parse_lexicon(const std::filesystem::path& path);

using Tokens = std::vector<std::string>;

/// Lowercase runs of ASCII letters; everything else separates tokens.
Tokens tokenize(std::string_view text);

using CategoryFrequencies = std::array<double, kTraitDims>;

/// Per-category match count divided by the review's token count.
CategoryFrequencies category_tf(std::span<const std::string> review,
                                const Lexicon& lexicon);

/// Averaged TF-IDF over one user's tokenized reviews. Throws
/// PreconditionError when `reviews` is empty.
TraitVector extract_personality(std::span<const Tokens> reviews,
                                const Lexicon& lexicon);

/// Sum of the category values tagged (trait, level); used by explain dumps.
double trait_level_sum(const TraitVector& personality, const Lexicon& lexicon,
                       Trait trait, Level level);

}  // namespace pega

#endif  // PEGA_LEXICON_HPP_
