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

#include "spcc/geometry.h"

#include <cmath>
#include <limits>
#include <string>

#include "spcc/errors.h"

SPCC_NAMESPACE_BEGIN

namespace {

void RequireCoords(const Tensor& t, const char* what) {
  if (!t.defined() || t.rank() != 2 || t.dim(0) != 3) {
    throw ShapeError(std::string(what) + ": expected a 3 x P coordinate matrix");
  }
}

struct NearestMatch {
  std::size_t index;
  double distance;
};

NearestMatch Nearest(CoordsView from, std::size_t j, CoordsView to) {
  NearestMatch best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t k = 0; k < to.size(); ++k) {
    const double d = from.SquaredDistance(j, to, k);
    if (d < best.distance) best = {k, d};
  }
  return best;
}

}  // namespace

CoordsView::CoordsView(const Tensor& coords) : CoordsView(nullptr, 0, 0, 0) {
  RequireCoords(coords, "coords");
  data_ = coords.values().data();
  row_stride_ = coords.dim(1);
  count_ = coords.dim(1);
}

CoordsView CoordsView::Columns(std::size_t begin, std::size_t count) const {
  if (begin + count > count_) throw ShapeError("coordinate view: column range out of bounds");
  return CoordsView(data_, row_stride_, begin_ + begin, count);
}

double CoordsView::SquaredDistance(std::size_t j, const CoordsView& other, std::size_t k) const {
  double d = 0.0;
  for (std::size_t a = 0; a < 3; ++a) {
    const double diff = static_cast<double>((*this)(a, j)) - static_cast<double>(other(a, k));
    d += diff * diff;
  }
  return d;
}

PointCloud Normalize(const PointCloud& cloud) {
  RequireCoords(cloud.coords, "normalize");
  const std::size_t p = cloud.size();
  if (p == 0) throw ShapeError("normalize: empty cloud");
  const auto src = cloud.coords.values();
  double center[3] = {0.0, 0.0, 0.0};
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t j = 0; j < p; ++j) center[a] += src[a * p + j];
    center[a] /= static_cast<double>(p);
  }
  double max_norm = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    double n = 0.0;
    for (std::size_t a = 0; a < 3; ++a) {
      const double d = src[a * p + j] - center[a];
      n += d * d;
    }
    max_norm = std::max(max_norm, std::sqrt(n));
  }
  const double scale = max_norm > 1e-12 ? 1.0 / max_norm : 1.0;
  std::vector<Real> out(3 * p);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t j = 0; j < p; ++j) {
      out[a * p + j] = static_cast<Real>((src[a * p + j] - center[a]) * scale);
    }
  }
  PointCloud result = cloud;
  result.coords = Tensor({3, p}, std::move(out));
  return result;
}

std::vector<std::size_t> FarthestPointSample(CoordsView coords, std::size_t count) {
  const std::size_t p = coords.size();
  if (count == 0 || count > p) {
    throw ArgumentError("farthest point sampling: cannot pick " + std::to_string(count) +
                        " of " + std::to_string(p) + " points");
  }
  std::vector<std::size_t> picked{0};
  picked.reserve(count);
  std::vector<double> gap(p, std::numeric_limits<double>::infinity());
  std::vector<std::uint8_t> taken(p, 0);
  taken[0] = 1;
  while (picked.size() < count) {
    const std::size_t last = picked.back();
    std::size_t best = p;
    double best_gap = -1.0;
    for (std::size_t j = 0; j < p; ++j) {
      if (taken[j]) continue;
      gap[j] = std::min(gap[j], coords.SquaredDistance(j, coords, last));
      if (gap[j] > best_gap) {
        best_gap = gap[j];
        best = j;
      }
    }
    taken[best] = 1;
    picked.push_back(best);
  }
  return picked;
}

GroupIndex BallQuery(CoordsView parent, CoordsView centroids, double radius,
                     std::size_t group_size) {
  if (!(radius > 0.0)) throw ArgumentError("ball query: radius must be positive");
  if (group_size == 0) throw ArgumentError("ball query: group size must be at least 1");
  if (parent.size() == 0) throw ShapeError("ball query: empty parent cloud");
  const double r2 = radius * radius;
  GroupIndex g;
  g.group_size = group_size;
  g.members.reserve(centroids.size() * group_size);
  g.padded.reserve(centroids.size() * group_size);
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    std::size_t found = 0;
    for (std::size_t j = 0; j < parent.size() && found < group_size; ++j) {
      if (centroids.SquaredDistance(c, parent, j) <= r2) {
        g.members.push_back(j);
        g.padded.push_back(0);
        ++found;
      }
    }
    std::size_t fill;
    if (found == 0) {
      fill = Nearest(centroids, c, parent).index;
    } else {
      fill = g.members[c * group_size];
    }
    for (; found < group_size; ++found) {
      g.members.push_back(fill);
      g.padded.push_back(1);
    }
  }
  return g;
}

GroupIndex BallQuery(CoordsView parent, std::span<const std::size_t> centroid_indices,
                     double radius, std::size_t group_size) {
  std::vector<Real> centers(3 * centroid_indices.size());
  const std::size_t n = centroid_indices.size();
  for (std::size_t c = 0; c < n; ++c) {
    if (centroid_indices[c] >= parent.size()) {
      throw ArgumentError("ball query: centroid index out of range");
    }
    for (std::size_t a = 0; a < 3; ++a) centers[a * n + c] = parent(a, centroid_indices[c]);
  }
  GroupIndex g = BallQuery(parent, CoordsView(centers.data(), n, 0, n), radius, group_size);
  g.centroid_indices.assign(centroid_indices.begin(), centroid_indices.end());
  return g;
}

Tensor GroupResiduals(CoordsView parent, CoordsView centroids, const GroupIndex& groups) {
  const std::size_t n = groups.groups(), s = groups.group_size;
  if (n != centroids.size() || groups.padded.size() != groups.members.size()) {
    throw ArgumentError("group residuals: grouping does not match the centroid set");
  }
  std::vector<Real> out(3 * n * s);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t k = 0; k < s; ++k) {
      const std::size_t m = groups.member(c, k);
      if (m >= parent.size()) throw ArgumentError("group residuals: member index out of range");
      for (std::size_t a = 0; a < 3; ++a) {
        out[(a * n + c) * s + k] = parent(a, m) - centroids(a, c);
      }
    }
  }
  return Tensor({3, n, s}, std::move(out));
}

double ChamferValue(CoordsView a, CoordsView b) {
  if (a.size() == 0 || b.size() == 0) throw ArgumentError("chamfer distance: empty cloud");
  double forward = 0.0, backward = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) forward += Nearest(a, j, b).distance;
  for (std::size_t k = 0; k < b.size(); ++k) backward += Nearest(b, k, a).distance;
  return forward / static_cast<double>(a.size()) + backward / static_cast<double>(b.size());
}

Tensor BatchedChamferDistance(const Tensor& a, const Tensor& b, std::size_t batch) {
  RequireCoords(a, "chamfer distance");
  RequireCoords(b, "chamfer distance");
  if (batch == 0 || a.dim(1) % batch != 0 || b.dim(1) % batch != 0) {
    throw ShapeError("chamfer distance: column counts are not divisible by the batch size");
  }
  const std::size_t pa = a.dim(1) / batch, pb = b.dim(1) / batch;
  if (pa == 0 || pb == 0) throw ArgumentError("chamfer distance: empty cloud");
  const CoordsView va(a), vb(b);
  // Global column index of the nearest neighbour for every point.
  std::vector<std::size_t> match_ab(a.dim(1)), match_ba(b.dim(1));
  double total = 0.0;
  for (std::size_t s = 0; s < batch; ++s) {
    const CoordsView ca = va.Columns(s * pa, pa), cb = vb.Columns(s * pb, pb);
    double forward = 0.0, backward = 0.0;
    for (std::size_t j = 0; j < pa; ++j) {
      const NearestMatch m = Nearest(ca, j, cb);
      match_ab[s * pa + j] = s * pb + m.index;
      forward += m.distance;
    }
    for (std::size_t k = 0; k < pb; ++k) {
      const NearestMatch m = Nearest(cb, k, ca);
      match_ba[s * pb + k] = s * pa + m.index;
      backward += m.distance;
    }
    total += forward / static_cast<double>(pa) + backward / static_cast<double>(pb);
  }
  const double nb = static_cast<double>(batch);
  return detail::MakeResult(
      {}, {static_cast<Real>(total / nb)}, {a, b},
      [pa, pb, nb, match_ab = std::move(match_ab),
       match_ba = std::move(match_ba)](detail::Node& self) {
        detail::Node& an = *self.inputs[0];
        detail::Node& bn = *self.inputs[1];
        const std::size_t na = an.value.size() / 3, nbc = bn.value.size() / 3;
        std::vector<Real> unused;
        std::vector<Real>& ga = an.requires_grad ? an.EnsureGrad() : unused;
        std::vector<Real>& gb = bn.requires_grad ? bn.EnsureGrad() : unused;
        const double wa = 2.0 * self.grad[0] / (nb * static_cast<double>(pa));
        const double wb = 2.0 * self.grad[0] / (nb * static_cast<double>(pb));
        // Each matched pair pulls its two endpoints together.
        auto pull = [&](std::size_t j, std::size_t k, double w) {
          for (std::size_t axis = 0; axis < 3; ++axis) {
            const double d = static_cast<double>(an.value[axis * na + j]) -
                             static_cast<double>(bn.value[axis * nbc + k]);
            if (an.requires_grad) ga[axis * na + j] += static_cast<Real>(w * d);
            if (bn.requires_grad) gb[axis * nbc + k] -= static_cast<Real>(w * d);
          }
        };
        for (std::size_t j = 0; j < na; ++j) pull(j, match_ab[j], wa);
        for (std::size_t k = 0; k < nbc; ++k) pull(match_ba[k], k, wb);
      });
}

Tensor ChamferDistance(const Tensor& a, const Tensor& b) {
  return BatchedChamferDistance(a, b, 1);
}

SPCC_NAMESPACE_END
