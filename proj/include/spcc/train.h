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

#ifndef SPCC_TRAIN_H_
#define SPCC_TRAIN_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spcc/dataio.h"
#include "spcc/model.h"
#include "spcc/nn.h"

SPCC_NAMESPACE_BEGIN

struct LossBreakdown {
  double base_bits = 0.0;
  double enhancement_bits = 0.0;
  std::array<double, 3> side_bits{};
  double rate_bits = 0.0;  // all streams, whole batch
  double rate_bpp = 0.0;   // rate_bits / (batch * points)
  double chamfer = 0.0;
  double cross_entropy = 0.0;
  double lambda_x = 0.0;
  double lambda_t = 0.0;
  double total = 0.0;
};

struct CompositeLossResult {
  Tensor total;
  LossBreakdown breakdown;
};

// total = rate_bpp + lambda_x * chamfer + lambda_t * cross_entropy.
CompositeLossResult CompositeLoss(const TrainOutputs& outputs, std::size_t batch,
                                  std::size_t points, double lambda_x, double lambda_t);

struct TrainPlan {
  double lambda_x = 250.0;
  double lambda_t = 0.25;
  int epochs = 30;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  double min_learning_rate = 1e-5;  // floor of the cosine schedule
  double entropy_learning_rate = 1e-3;
  double clip_norm = 10.0;
  bool augment = true;
  std::uint64_t seed = 0;
  // Where to write the offending batch if the loss goes non-finite.
  std::optional<std::filesystem::path> dump_path;
};

struct EpochMetrics {
  int epoch = 0;
  std::size_t samples = 0;
  std::size_t steps = 0;
  double loss = 0.0;
  double rate_bpp = 0.0;
  double base_bpp = 0.0;  // model estimate, base stream only
  double chamfer = 0.0;
  double cross_entropy = 0.0;
  double accuracy = 0.0;
  double learning_rate = 0.0;
};

class Trainer {
 public:
  Trainer(ScalableCodecModel& model, TrainPlan plan, std::size_t train_size);

  // One shuffled pass. Raises NumericalError on a non-finite loss.
  EpochMetrics TrainEpoch(const Dataset& data);
  // Single optimization step on a fixed batch; returns its breakdown.
  LossBreakdown Step(const Batch& batch, Rng& noise);

  int epoch() const { return epoch_; }
  double CurrentLearningRate() const;
  const TrainPlan& plan() const { return plan_; }

 private:
  ScalableCodecModel& model_;
  TrainPlan plan_;
  std::vector<Tensor> network_params_;
  std::vector<Tensor> entropy_params_;
  Adam optimizer_;
  std::size_t total_steps_;
  std::size_t step_ = 0;
  std::size_t last_correct_ = 0;
  int epoch_ = 0;
};

struct EvalMetrics {
  std::size_t samples = 0;
  double accuracy = 0.0;            // from full files
  double base_only_accuracy = 0.0;  // from base-only files
  double chamfer = 0.0;
  double bpp_base = 0.0;   // measured segment lengths
  double bpp_total = 0.0;
  double estimated_bpp_base = 0.0;
  double estimated_bpp_total = 0.0;
};

// Runs the real coding path for every item: compress, classify from the
// base segment, decompress, Chamfer against the input.
EvalMetrics Evaluate(const ScalableCodecModel& model, const Dataset& data,
                     std::size_t threads = 1);

// Appends one JSON object per line.
void AppendMetricsRecord(const std::filesystem::path& path, int epoch, const std::string& split,
                         double bpp_base, double bpp_total, double accuracy, double chamfer,
                         double lambda_x, double lambda_t, std::uint64_t seed,
                         std::optional<double> loss = std::nullopt);

SPCC_NAMESPACE_END

#endif  // SPCC_TRAIN_H_
