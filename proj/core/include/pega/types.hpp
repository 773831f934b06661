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

#ifndef PEGA_TYPES_HPP_
#define PEGA_TYPES_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace pega {

/// Number of lexicon categories, and therefore of personality dimensions.
inline constexpr int kTraitDims = 100;

/// Width of the concatenated (center, offset) group-personality query.
inline constexpr int kQueryDims = 2 * kTraitDims;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One user's implicit personality; entry i is aligned to lexicon category i.
using TraitVector = Eigen::Matrix<double, kTraitDims, 1>;

/// Personality vectors indexed by dense user index.
using TraitTable = std::vector<TraitVector>;

using Index = std::int32_t;

}  // namespace pega

#endif  // PEGA_TYPES_HPP_
