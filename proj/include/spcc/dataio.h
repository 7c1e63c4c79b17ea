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

#ifndef SPCC_DATAIO_H_
#define SPCC_DATAIO_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "spcc/geometry.h"
#include "spcc/random.h"

SPCC_NAMESPACE_BEGIN

inline constexpr std::size_t kDefaultPoints = 1024;

struct Dataset {
  std::vector<PointCloud> items;  // every item carries a label
  std::vector<std::string> class_names;
  std::string split;       // "train" or "test"
  std::string provenance;  // corpus path or generator parameters
  std::vector<std::string> warnings;

  std::size_t size() const { return items.size(); }
  std::size_t classes() const { return class_names.size(); }
};

// ---- Synthetic shapes ----

const std::vector<std::string>& SyntheticShapeNames();

// Area-uniform samples on the canonical (unrotated, unit-scale) surface.
// Raises ArgumentError for unknown shapes.
Tensor SampleShapeSurface(std::string_view shape, std::size_t points, Rng& rng);

struct SyntheticOptions {
  std::vector<std::string> shapes = SyntheticShapeNames();
  std::size_t train_per_class = 200;
  std::size_t test_per_class = 50;
  std::size_t points = kDefaultPoints;
  std::uint64_t seed = 0;
  double jitter = 0.02;
};

// One item: surface sample, Gaussian jitter, random rotation, normalization.
PointCloud SyntheticItem(std::string_view shape, std::size_t points, double jitter, Rng& rng);

// Train and test draw from distinct random streams of the same seed.
Dataset SyntheticShapes(const SyntheticOptions& options, std::string_view split);

// ---- Meshes ----

struct Mesh {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;  // polygons fan-triangulated
};

// Accepts '#' comments and the "OFF<counts>" first-line variant. Raises
// FormatError on malformed input.
Mesh ParseOff(std::string_view text);
Mesh LoadOff(const std::filesystem::path& path);

struct SurfaceSample {
  Tensor coords;                             // 3 x points
  std::vector<std::size_t> triangle_ids;     // source triangle per point
};

// Area-weighted triangle choice, uniform position inside the triangle.
SurfaceSample SampleSurface(const Mesh& mesh, std::size_t points, Rng& rng);

// Class folders under root, each holding .off files directly or in a
// <split> subfolder. Malformed meshes are skipped and listed in warnings;
// a class without usable meshes raises DatasetError.
Dataset LoadOffCorpus(const std::filesystem::path& root, std::string_view split,
                      std::size_t points, std::uint64_t seed);

// Rotation about the vertical (y) axis plus Gaussian jitter clipped to
// +-jitter_clip. Meant for training items only.
PointCloud Augment(const PointCloud& cloud, Rng& rng, double jitter_sigma = 0.01,
                   double jitter_clip = 0.05);

// ---- Files ----

void SaveDataset(const std::filesystem::path& path, const Dataset& dataset);
Dataset LoadDataset(const std::filesystem::path& path);

// Reads .xyz/.txt (whitespace columns), .ply (ascii or binary little endian)
// or .off (surface-sampled to kDefaultPoints). Returns raw coordinates.
PointCloud ReadPointFile(const std::filesystem::path& path, std::uint64_t seed = 0);
// Brings a cloud to exactly the requested point count (seeded subset or
// repeats) and normalizes it.
PointCloud PrepareCloud(const PointCloud& cloud, std::size_t points, std::uint64_t seed);

void WriteXyz(const std::filesystem::path& path, const Tensor& coords);
void WritePly(const std::filesystem::path& path, const Tensor& coords);

SPCC_NAMESPACE_END

#endif  // SPCC_DATAIO_H_
