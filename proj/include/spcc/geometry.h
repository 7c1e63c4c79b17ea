// Copyright 2026 The SPCC Authors. All Rights Reserved.
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

#ifndef SPCC_GEOMETRY_H_
#define SPCC_GEOMETRY_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spcc/tensor.h"

SPCC_NAMESPACE_BEGIN

struct PointCloud {
  Tensor coords;  // 3 x P
  Tensor attrs;   // A x P, undefined when the cloud carries no attributes
  std::optional<int> label;

  std::size_t size() const { return coords.dim(1); }
  bool has_attrs() const { return attrs.defined(); }
};

// Read-only view of a contiguous column range of a 3-row coordinate matrix.
// Lets batched tensors (columns ordered sample-major) be handled per sample.
class CoordsView {
 public:
  CoordsView(const Tensor& coords);  // NOLINT(runtime/explicit)
  CoordsView(const Real* data, std::size_t row_stride, std::size_t begin, std::size_t count)
      : data_(data), row_stride_(row_stride), begin_(begin), count_(count) {}

  Real operator()(std::size_t axis, std::size_t j) const {
    return data_[axis * row_stride_ + begin_ + j];
  }
  std::size_t size() const { return count_; }
  CoordsView Columns(std::size_t begin, std::size_t count) const;
  double SquaredDistance(std::size_t j, const CoordsView& other, std::size_t k) const;

 private:
  const Real* data_;
  std::size_t row_stride_;
  std::size_t begin_;
  std::size_t count_;
};

struct GroupIndex {
  std::vector<std::size_t> centroid_indices;  // empty when centroids came as coordinates
  std::size_t group_size = 0;
  std::vector<std::size_t> members;  // centroid-major, group_size per centroid
  std::vector<std::uint8_t> padded;  // 1 where a slot repeats an earlier member

  std::size_t groups() const { return group_size == 0 ? 0 : members.size() / group_size; }
  std::size_t member(std::size_t group, std::size_t slot) const {
    return members[group * group_size + slot];
  }
  bool is_padded(std::size_t group, std::size_t slot) const {
    return padded[group * group_size + slot] != 0;
  }
};

// Centers the cloud at its centroid and scales the farthest point to unit
// norm. A cloud of identical points keeps scale 1.
PointCloud Normalize(const PointCloud& cloud);

// Greedy max-min selection seeded at index 0. Ties go to the lowest index.
std::vector<std::size_t> FarthestPointSample(CoordsView coords, std::size_t count);

// First group_size parent points by ascending index within radius of each
// centroid. Short groups repeat their first member; empty balls fall back to
// the nearest parent point, with every slot flagged as padding.
GroupIndex BallQuery(CoordsView parent, CoordsView centroids, double radius,
                     std::size_t group_size);
GroupIndex BallQuery(CoordsView parent, std::span<const std::size_t> centroid_indices,
                     double radius, std::size_t group_size);

// Member coordinates minus their centroid, shaped 3 x groups x group_size.
Tensor GroupResiduals(CoordsView parent, CoordsView centroids, const GroupIndex& groups);

// Mean squared nearest-neighbour distance from a to b plus from b to a.
double ChamferValue(CoordsView a, CoordsView b);

// Differentiable Chamfer distance between two 3 x P clouds.
Tensor ChamferDistance(const Tensor& a, const Tensor& b);
// Mean Chamfer distance over a batch stored sample-major along columns.
Tensor BatchedChamferDistance(const Tensor& a, const Tensor& b, std::size_t batch);

SPCC_NAMESPACE_END

#endif  // SPCC_GEOMETRY_H_
