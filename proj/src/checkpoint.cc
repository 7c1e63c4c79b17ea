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

#include "spcc/checkpoint.h"

#include <sstream>

#include "spcc/errors.h"

SPCC_NAMESPACE_BEGIN

namespace {

std::string JoinLines(const std::vector<std::string>& items) {
  std::string out;
  for (const std::string& s : items) out += s + "\n";
  return out;
}

std::vector<std::string> SplitLines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

void PutScalar(Archive& a, const std::string& key, double v) {
  const double values[] = {v};
  a.PutFloat64(key, {}, values);
}

void PutScalar(Archive& a, const std::string& key, std::int64_t v) {
  const std::int64_t values[] = {v};
  a.PutInt64(key, {}, values);
}

}  // namespace

Archive CheckpointArchive(const ScalableCodecModel& model, const CheckpointMeta& meta) {
  Archive a;
  a.PutString("meta/kind", "spcc-checkpoint");
  a.PutString("meta/config", model.config().Canonical());
  PutScalar(a, "meta/config_hash", static_cast<std::int64_t>(model.config().Hash()));
  PutScalar(a, "meta/seed", static_cast<std::int64_t>(meta.seed));
  PutScalar(a, "meta/lambda_x", meta.lambda_x);
  PutScalar(a, "meta/lambda_t", meta.lambda_t);
  PutScalar(a, "meta/epochs", static_cast<std::int64_t>(meta.epochs));
  a.PutString("meta/class_names", JoinLines(meta.class_names));
  a.PutString("meta/dataset", meta.dataset);
  model.params().Store(a);
  return a;
}

void SaveCheckpoint(const std::filesystem::path& path, const ScalableCodecModel& model,
                    const CheckpointMeta& meta) {
  CheckpointArchive(model, meta).Save(path);
}

LoadedCheckpoint ReadCheckpoint(const Archive& archive) {
  if (!archive.Contains("meta/kind") || archive.GetString("meta/kind") != "spcc-checkpoint") {
    throw FormatError("not a checkpoint archive");
  }
  CodecConfig config;
  try {
    config = CodecConfig::Parse(archive.GetString("meta/config"));
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("checkpoint config is invalid: ") + e.what());
  } catch (const ShapeError& e) {
    throw FormatError(std::string("checkpoint config is invalid: ") + e.what());
  }
  const auto stored = static_cast<std::uint64_t>(archive.GetScalarInt("meta/config_hash"));
  if (stored != config.Hash()) throw FormatError("checkpoint config hash mismatch");
  LoadedCheckpoint out;
  out.meta.seed = static_cast<std::uint64_t>(archive.GetScalarInt("meta/seed"));
  out.meta.lambda_x = archive.GetScalarReal("meta/lambda_x");
  out.meta.lambda_t = archive.GetScalarReal("meta/lambda_t");
  out.meta.epochs = static_cast<int>(archive.GetScalarInt("meta/epochs"));
  out.meta.class_names = SplitLines(archive.GetString("meta/class_names"));
  out.meta.dataset = archive.GetString("meta/dataset");
  out.model = std::make_unique<ScalableCodecModel>(config, out.meta.seed);
  out.model->params().Restore(archive);
  return out;
}

LoadedCheckpoint LoadCheckpoint(const std::filesystem::path& path) {
  return ReadCheckpoint(Archive::Load(path));
}

SPCC_NAMESPACE_END
