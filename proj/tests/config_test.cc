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

#include "spcc/config.h"

#include <gtest/gtest.h>

#include "spcc/errors.h"

namespace spcc {
namespace {

TEST(ConfigTest, FullPresetTable) {
  const CodecConfig c = CodecConfig::Full(40);
  const int points[] = {1024, 256, 64, 1}, groups[] = {0, 4, 4, 64};
  const double radii[] = {0, 0.2, 0.4, 0};
  const int features[] = {3, 128, 192, 256}, up[] = {3, 64, 32, 16}, latent[] = {0, 0, 64, 64};
  for (int i = 0; i < kNumLevels; ++i) {
    EXPECT_EQ(c.levels[i].points, points[i]);
    if (i > 0) {
      EXPECT_EQ(c.levels[i].group_size, groups[i]);
    }
    if (i == 1 || i == 2) {
      EXPECT_EQ(c.levels[i].radius, radii[i]);
    }
    EXPECT_EQ(c.levels[i].features, features[i]);
    EXPECT_EQ(c.levels[i].up_channels, up[i]);
    EXPECT_EQ(c.levels[i].latent, latent[i]);
  }
  EXPECT_EQ(c.base_latent, 48);
  EXPECT_EQ(c.enhancement_latent, 16);
  EXPECT_EQ((c.classifier_hidden), (std::array<int, 2>{128, 64}));
  EXPECT_EQ(c.side_mask(), (std::array<bool, 3>{false, false, true}));
  for (int i = 1; i < kNumLevels; ++i) {
    EXPECT_EQ(c.levels[i - 1].points, c.levels[i].points * c.levels[i].group_size);
  }
}

TEST(ConfigTest, LitePresetTable) {
  const CodecConfig c = CodecConfig::Lite(6);
  const int features[] = {3, 32, 48, 64}, up[] = {3, 32, 16, 8}, latent[] = {0, 0, 16, 64};
  for (int i = 0; i < kNumLevels; ++i) {
    EXPECT_EQ(c.levels[i].features, features[i]);
    EXPECT_EQ(c.levels[i].up_channels, up[i]);
    EXPECT_EQ(c.levels[i].latent, latent[i]);
  }
  EXPECT_EQ(c.classes, 6);
  EXPECT_EQ((c.classifier_hidden), (std::array<int, 2>{64, 32}));
  EXPECT_EQ(c.top_latent(), 64);
  EXPECT_EQ(c.input_points(), 1024);
}

TEST(ConfigTest, ParseRoundTripsCanonicalForm) {
  for (const char* preset : {"full", "lite"}) {
    const CodecConfig c = CodecConfig::Preset(preset, 10);
    const CodecConfig back = CodecConfig::Parse(c.Canonical());
    EXPECT_EQ(back.Canonical(), c.Canonical());
    EXPECT_EQ(back.Hash(), c.Hash());
  }
  EXPECT_NE(CodecConfig::Full(10).Hash(), CodecConfig::Lite(10).Hash());
  EXPECT_NE(CodecConfig::Lite(10).Hash(), CodecConfig::Lite(11).Hash());
}

TEST(ConfigTest, OverridesAndComments) {
  const CodecConfig c = CodecConfig::Parse(
      "# miniature\npreset = lite\nclasses = 3\n"
      "level0.points = 64\nlevel1.points = 16\nlevel2.points = 4\n"
      "level3.group_size = 4   # all of level 2\nlevel1.latent = 5\n");
  EXPECT_EQ(c.classes, 3);
  EXPECT_EQ(c.input_points(), 64);
  EXPECT_EQ(c.levels[3].group_size, 4);
  EXPECT_TRUE(c.side_enabled(1));
  EXPECT_EQ(c.levels[2].features, 48);
}

TEST(ConfigTest, Rejections) {
  EXPECT_THROW(CodecConfig::Preset("huge"), ArgumentError);
  EXPECT_THROW(CodecConfig::Parse("level9.points = 3"), ArgumentError);
  EXPECT_THROW(CodecConfig::Parse("nonsense"), ArgumentError);
  EXPECT_THROW(CodecConfig::Parse("level1.points = abc"), ArgumentError);
  // Breaks P(i-1) = P(i) * S(i).
  EXPECT_THROW(CodecConfig::Parse("level1.points = 100"), ShapeError);
}

}  // namespace
}  // namespace spcc
