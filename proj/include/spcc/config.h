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

#ifndef SPCC_CONFIG_H_
#define SPCC_CONFIG_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace spcc {

inline constexpr int kNumLevels = 4;
inline constexpr int kTopLevel = 3;

// Hyperparameters of one level of the hierarchy. Level 0 is the input
// cloud; group_size and radius are unused there, and radius is unused at the
// top level where all points form one group.
struct LevelConfig {
  int points = 0;       // centroids kept at this level
  int group_size = 0;   // points gathered per centroid
  double radius = 0.0;  // ball-query radius
  int features = 0;     // feature channels produced by downsampling
  int up_channels = 0;  // channels produced by the upsampling block
  int latent = 0;       // side-stream latent channels; 0 disables the stream
};

struct CodecConfig {
  std::string preset = "custom";
  std::array<LevelConfig, kNumLevels> levels{};
  int classes = 40;
  int attribute_channels = 0;
  // Channel split of the top latent into base and enhancement parts.
  int base_latent = 48;
  int enhancement_latent = 16;
  std::array<int, 2> classifier_hidden{64, 32};
  std::vector<int> entropy_filters{3, 3, 3};
  int min_symbol = -127;
  int max_symbol = 127;

  static CodecConfig Full(int classes = 40);
  static CodecConfig Lite(int classes = 40);
  // "full" or "lite"; anything else raises ArgumentError.
  static CodecConfig Preset(std::string_view name, int classes = 40);

  int top_latent() const { return base_latent + enhancement_latent; }
  bool side_enabled(int level) const;
  std::array<bool, 3> side_mask() const;
  int input_points() const { return levels[0].points; }

  // Raises ShapeError when the level chain is inconsistent.
  void Validate() const;

  // One "key = value" line per field in a fixed order.
  std::string Canonical() const;
  std::uint64_t Hash() const;

  // Reads "key = value" lines ('#' starts a comment). A "preset" key seeds
  // the defaults; remaining keys override individual fields.
  static CodecConfig Parse(std::string_view text);
  static CodecConfig Load(const std::filesystem::path& path);
};

}  // namespace spcc

#endif  // SPCC_CONFIG_H_
