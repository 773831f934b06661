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

#include "pega/groupspace.hpp"

#include <cmath>
#include <limits>

#include "pega/errors.hpp"

namespace pega {

Vector HyperRectangle::concat() const {
  Vector q(kQueryDims);
  q << center, offset;
  return q;
}

bool HyperRectangle::contains(const TraitVector& p, double tolerance) const {
  return ((center - offset).array() <= p.array() + tolerance).all() &&
         (p.array() <= (center + offset).array() + tolerance).all();
}

HyperRectangle raw_hyperrectangle(std::span<const TraitVector> members) {
  if (members.empty()) {
    throw PreconditionError("a group personality needs at least one member");
  }
  TraitVector hi = members.front();
  TraitVector lo = members.front();
  for (const TraitVector& p : members.subspan(1)) {
    hi = hi.cwiseMax(p);
    lo = lo.cwiseMin(p);
  }
  HyperRectangle rect;
  rect.center = (hi + lo) / 2.0;
  rect.offset = (hi - lo).cwiseAbs() / 2.0;
  // Widen by ulps until center +- offset covers [lo, hi] exactly.
  for (int k = 0; k < kTraitDims; ++k) {
    double& o = rect.offset[k];
    const double c = rect.center[k];
    while (c - o > lo[k] || c + o < hi[k]) {
      o = std::nextafter(o, std::numeric_limits<double>::infinity());
    }
  }
  return rect;
}

double softplus(double x) {
  // log(1 + e^x) without overflow for large |x|.
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix ProjectionParams::offset_weight() const {
  return offset_weight_raw.unaryExpr([](double x) { return softplus(x); });
}

ProjectionParams ProjectionParams::random(std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(kTraitDims));
  std::uniform_real_distribution<double> dist(-bound, bound);
  ProjectionParams params;
  params.center_weight = Matrix(kTraitDims, kTraitDims);
  params.offset_weight_raw = Matrix(kTraitDims, kTraitDims);
  for (Eigen::Index i = 0; i < params.center_weight.size(); ++i) {
    params.center_weight.data()[i] = dist(rng);
  }
  for (Eigen::Index i = 0; i < params.offset_weight_raw.size(); ++i) {
    params.offset_weight_raw.data()[i] = dist(rng);
  }
  return params;
}

HyperRectangle project(const HyperRectangle& raw, const ProjectionParams& params) {
  return project(raw, params.center_weight, params.offset_weight());
}

HyperRectangle project(const HyperRectangle& raw, const Matrix& center_weight,
                       const Matrix& offset_weight) {
  if (center_weight.rows() != kTraitDims || center_weight.cols() != kTraitDims ||
      offset_weight.rows() != kTraitDims || offset_weight.cols() != kTraitDims) {
    throw ShapeError("projection weights must be 100x100");
  }
  if ((offset_weight.array() < 0.0).any()) {
    throw PreconditionError("offset projection must be non-negative");
  }
  HyperRectangle out;
  out.center = center_weight * raw.center;
  out.offset = offset_weight * raw.offset;
  return out;
}

}  // namespace pega
