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

#ifndef SPCC_CHECKPOINT_H_
#define SPCC_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "spcc/archive.h"
#include "spcc/model.h"

SPCC_NAMESPACE_BEGIN

struct CheckpointMeta {
  std::uint64_t seed = 0;
  double lambda_x = 0.0;
  double lambda_t = 0.0;
  int epochs = 0;
  std::vector<std::string> class_names;
  std::string dataset;  // provenance description
};

Archive CheckpointArchive(const ScalableCodecModel& model, const CheckpointMeta& meta);
void SaveCheckpoint(const std::filesystem::path& path, const ScalableCodecModel& model,
                    const CheckpointMeta& meta);

struct LoadedCheckpoint {
  std::unique_ptr<ScalableCodecModel> model;
  CheckpointMeta meta;
};

// Raises FormatError for unreadable or inconsistent files.
LoadedCheckpoint ReadCheckpoint(const Archive& archive);
LoadedCheckpoint LoadCheckpoint(const std::filesystem::path& path);

SPCC_NAMESPACE_END

#endif  // SPCC_CHECKPOINT_H_
