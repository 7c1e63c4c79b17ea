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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "gradcheck.h"
#include "oracles.h"
#include "spcc/errors.h"
#include "spcc/ops.h"
#include "spcc/random.h"

namespace spcc {
namespace {

using testing::CheckGradients;
using testing::RandomTensor;
using testing::BallOracle;
using testing::ChamferOracle;
using testing::Dist2;
using testing::GreedyFpsOracle;
using testing::OracleGroup;

Tensor Cloud(std::vector<std::array<double, 3>> pts) {
  const std::size_t p = pts.size();
  std::vector<Real> v(3 * p);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t a = 0; a < 3; ++a) v[a * p + j] = pts[j][a];
  return Tensor({3, p}, v);
}

TEST(NormalizeTest, Examples) {
  PointCloud single{Cloud({{5, 5, 5}}), {}, {}};
  PointCloud n = Normalize(single);
  for (Real v : n.coords.values()) EXPECT_EQ(v, 0.0);

  Rng rng(1);
  std::vector<std::array<double, 3>> sphere;
  // Antipodal pairs keep the centroid at the origin exactly.
  for (int i = 0; i < 100; ++i) {
    double p[3] = {rng.Normal(), rng.Normal(), rng.Normal()};
    const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    sphere.push_back({p[0] / r, p[1] / r, p[2] / r});
    sphere.push_back({-p[0] / r, -p[1] / r, -p[2] / r});
  }
  PointCloud s{Cloud(sphere), {}, {}};
  PointCloud ns = Normalize(s);
  for (std::size_t i = 0; i < s.coords.size(); ++i) {
    EXPECT_NEAR(ns.coords.values()[i], s.coords.values()[i], 1e-6);
  }

  PointCloud r{RandomTensor({3, 50}, rng, -3, 7, false), {}, {}};
  PointCloud once = Normalize(r), twice = Normalize(once);
  double max_norm = 0.0;
  for (std::size_t j = 0; j < 50; ++j) {
    max_norm = std::max(max_norm, std::sqrt(Dist2(once.coords, j, Cloud({{0, 0, 0}}), 0)));
  }
  EXPECT_NEAR(max_norm, 1.0, 1e-12);
  for (std::size_t i = 0; i < once.coords.size(); ++i) {
    EXPECT_NEAR(once.coords.values()[i], twice.coords.values()[i], 1e-6);
  }
}

TEST(FpsTest, FullSelectionAndAnalyticCase) {
  Tensor line = Cloud({{0, 0, 0}, {1, 0, 0}, {10, 0, 0}});
  EXPECT_EQ(FarthestPointSample(line, 2), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(FarthestPointSample(line, 3), (std::vector<std::size_t>{0, 2, 1}));
  EXPECT_THROW(FarthestPointSample(line, 4), ArgumentError);
  EXPECT_THROW(FarthestPointSample(line, 0), ArgumentError);
}

TEST(FpsTest, TiesGoToLowestIndex) {
  // Points 1 and 2 are equidistant from point 0.
  Tensor c = Cloud({{0, 0, 0}, {1, 0, 0}, {-1, 0, 0}, {0, 0.5, 0}});
  EXPECT_EQ(FarthestPointSample(c, 2), (std::vector<std::size_t>{0, 1}));
}

TEST(FpsTest, MatchesGreedyOracleOnRandomClouds) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t p = 2 + rng.Index(127);
    Tensor x = RandomTensor({3, p}, rng, -1, 1, false);
    const std::size_t n = 1 + rng.Index(p);
    ASSERT_EQ(FarthestPointSample(x, n), GreedyFpsOracle(x, n)) << "trial " << trial;
  }
  Tensor x = RandomTensor({3, 64}, rng, -1, 1, false);
  std::vector<std::size_t> all = FarthestPointSample(x, 64);
  EXPECT_EQ(all, GreedyFpsOracle(x, 64));
  std::set<std::size_t> distinct(all.begin(), all.end());
  EXPECT_EQ(distinct.size(), 64u);
}

TEST(FpsTest, PermutationCovariant) {
  Rng rng(3);
  Tensor x = RandomTensor({3, 40}, rng, -1, 1, false);
  // Keep index 0 in place, shuffle the rest.
  std::vector<std::size_t> perm(40);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = 39; i > 1; --i) std::swap(perm[i], perm[1 + rng.Index(i)]);
  std::vector<Real> v(120);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t j = 0; j < 40; ++j) v[a * 40 + j] = x.values()[a * 40 + perm[j]];
  Tensor y({3, 40}, v);
  const auto px = FarthestPointSample(x, 12), py = FarthestPointSample(y, 12);
  for (std::size_t k = 0; k < 12; ++k) EXPECT_EQ(perm[py[k]], px[k]);
}

TEST(BallQueryTest, PaddingRule) {
  Tensor parent = Cloud({{0, 0, 0}, {0.1, 0, 0}, {2, 0, 0}, {3, 0, 0}});
  Tensor center = Cloud({{0, 0, 0}});
  GroupIndex g = BallQuery(parent, center, 0.5, 4);
  EXPECT_EQ(g.members, (std::vector<std::size_t>{0, 1, 0, 0}));
  EXPECT_EQ(g.padded, (std::vector<std::uint8_t>{0, 0, 1, 1}));
  OracleGroup o = BallOracle(parent, center, 0, 0.5, 4);
  EXPECT_EQ(o.members, g.members);
}

TEST(BallQueryTest, CoincidentCentroidTakesSlotZero) {
  // No lower-index point lies inside the ball, so the centroid itself leads.
  Tensor parent = Cloud({{5, 5, 5}, {1, 0, 0}, {1.1, 0, 0}});
  const std::vector<std::size_t> centroid{1};
  GroupIndex g = BallQuery(parent, centroid, 0.2, 3);
  EXPECT_EQ(g.member(0, 0), 1u);
  EXPECT_FALSE(g.is_padded(0, 0));
  EXPECT_EQ(g.member(0, 1), 2u);
}

TEST(BallQueryTest, EmptyBallFallsBackToNearest) {
  Tensor parent = Cloud({{0, 0, 0}, {1, 0, 0}, {3, 0, 0}});
  Tensor center = Cloud({{2.2, 0, 0}});
  GroupIndex g = BallQuery(parent, center, 0.1, 3);
  EXPECT_EQ(g.members, (std::vector<std::size_t>{2, 2, 2}));
  EXPECT_EQ(g.padded, (std::vector<std::uint8_t>{1, 1, 1}));
}

TEST(BallQueryTest, MatchesBruteForceOnRandomClouds) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t p = 4 + rng.Index(125);
    Tensor parent = RandomTensor({3, p}, rng, -1, 1, false);
    const std::size_t n = 1 + rng.Index(std::min<std::size_t>(p, 32));
    const auto picks = FarthestPointSample(parent, n);
    const double r = rng.Uniform(0.05, 0.8);
    const std::size_t s = 1 + rng.Index(16);
    GroupIndex g = BallQuery(parent, picks, r, s);
    std::vector<Real> cv(3 * n);
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t c = 0; c < n; ++c) cv[a * n + c] = parent.values()[a * p + picks[c]];
    Tensor centers({3, n}, cv);
    for (std::size_t c = 0; c < n; ++c) {
      OracleGroup o = BallOracle(parent, centers, c, r, s);
      for (std::size_t k = 0; k < s; ++k) {
        ASSERT_EQ(g.member(c, k), o.members[k]);
        ASSERT_EQ(g.is_padded(c, k), o.padded[k]);
      }
    }
    Tensor res = GroupResiduals(parent, centers, g);
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t k = 0; k < s; ++k) {
        double norm2 = 0.0;
        for (std::size_t a = 0; a < 3; ++a) {
          const double direct =
              parent.values()[a * p + g.member(c, k)] - centers.values()[a * n + c];
          const double got = res.values()[(a * n + c) * s + k];
          ASSERT_EQ(got, direct);
          norm2 += got * got;
        }
        if (!g.is_padded(c, k)) {
          EXPECT_LE(std::sqrt(norm2), r + 1e-12);
        }
      }
    }
  }
}

TEST(GroupResidualsTest, IdentityGroupingIsZero) {
  Rng rng(5);
  Tensor x = RandomTensor({3, 20}, rng, -1, 1, false);
  std::vector<std::size_t> all(20);
  std::iota(all.begin(), all.end(), 0);
  GroupIndex g = BallQuery(x, all, 1e-9, 1);
  Tensor r = GroupResiduals(x, x, g);
  for (Real v : r.values()) EXPECT_EQ(v, 0.0);
}

TEST(ChamferTest, AnalyticExamples) {
  Tensor a = Cloud({{0, 0, 0}}), b = Cloud({{1, 0, 0}});
  EXPECT_EQ(ChamferValue(a, b), 2.0);
  EXPECT_EQ(ChamferDistance(a, b).item(), 2.0);
  Rng rng(6);
  Tensor x = RandomTensor({3, 30}, rng, -1, 1, false);
  EXPECT_EQ(ChamferValue(x, x), 0.0);
  Tensor empty({3, 0}, {});
  EXPECT_THROW(ChamferValue(x, empty), ArgumentError);
}

TEST(ChamferTest, MatchesOracleAndIsSymmetric) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor a = RandomTensor({3, 32}, rng, -1, 1, false);
    Tensor b = RandomTensor({3, 1 + rng.Index(40)}, rng, -1, 1, false);
    const double oracle = ChamferOracle(a, b);
    EXPECT_NEAR(ChamferValue(a, b), oracle, 1e-10);
    EXPECT_NEAR(ChamferDistance(a, b).item(), oracle, 1e-10);
    EXPECT_NEAR(ChamferValue(b, a), oracle, 1e-10);
  }
}

TEST(ChamferTest, GradientMatchesFiniteDifferences) {
  Rng rng(8);
  Tensor a = RandomTensor({3, 32}, rng);
  Tensor b = RandomTensor({3, 32}, rng);
  auto report = CheckGradients([&] { return ChamferDistance(a, b); }, {a, b});
  EXPECT_LT(report.max_error, 1e-3) << report.worst;
}

TEST(ChamferTest, BatchedIsMeanOfPerSampleDistances) {
  Rng rng(9);
  Tensor a = RandomTensor({3, 3 * 16}, rng);
  Tensor b = RandomTensor({3, 3 * 16}, rng);
  double expected = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    expected += ChamferValue(CoordsView(a).Columns(16 * k, 16), CoordsView(b).Columns(16 * k, 16));
  }
  EXPECT_NEAR(BatchedChamferDistance(a, b, 3).item(), expected / 3.0, 1e-12);
  auto report = CheckGradients([&] { return BatchedChamferDistance(a, b, 3); }, {a, b});
  EXPECT_LT(report.max_error, 1e-3) << report.worst;
}

}  // namespace
}  // namespace spcc
