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

// Group personality as an axis-aligned hyper-rectangle over member traits.

#ifndef PEGA_GROUPSPACE_HPP_
#define PEGA_GROUPSPACE_HPP_

#include <random>
#include <span>

#include "pega/types.hpp"

namespace pega {

struct HyperRectangle {
  TraitVector center = TraitVector::Zero();
  TraitVector offset = TraitVector::Zero();  // >= 0

  /// center || offset, the attention query.
  Vector concat() const;

  /// center - offset <= p <= center + offset, with `tolerance` slack.
  bool contains(const TraitVector& p, double tolerance = 0.0) const;
};

/// Elementwise bounding box of the members. Throws PreconditionError on an
/// empty member list.
HyperRectangle raw_hyperrectangle(std::span<const TraitVector> members);

/// Learnable center/offset projections. The offset weights are stored
/// unconstrained and read through softplus, so every effective entry is > 0.
struct ProjectionParams {
  Matrix center_weight;      // kTraitDims x kTraitDims
  Matrix offset_weight_raw;  // kTraitDims x kTraitDims, pre-softplus

  Matrix offset_weight() const;

  /// Both matrices uniform in +-1/sqrt(kTraitDims).
  static ProjectionParams random(std::mt19937_64& rng);
};

double softplus(double x);
double sigmoid(double x);

HyperRectangle project(const HyperRectangle& raw, const ProjectionParams& params);

/// Projection with explicit effective weights; `offset_weight` must be
/// elementwise non-negative.
HyperRectangle project(const HyperRectangle& raw, const Matrix& center_weight,
                       const Matrix& offset_weight);

}  // namespace pega

#endif  // PEGA_GROUPSPACE_HPP_
