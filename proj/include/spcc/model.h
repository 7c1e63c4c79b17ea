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

#ifndef SPCC_MODEL_H_
#define SPCC_MODEL_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spcc/config.h"
#include "spcc/entropy.h"
#include "spcc/geometry.h"
#include "spcc/nn.h"
#include "spcc/random.h"

SPCC_NAMESPACE_BEGIN

// Named tensor shapes recorded while a graph is built.
using ShapeTrace = std::vector<std::pair<std::string, Shape>>;

// Clouds stacked sample-major along columns.
struct Batch {
  Tensor coords;  // 3 x (B * P)
  Tensor attrs;   // A x (B * P), undefined without attributes
  std::vector<int> labels;
  std::size_t size = 0;
};

// Stacks equally sized clouds. Labels default to 0 when absent.
Batch MakeBatch(std::span<const PointCloud> clouds);

struct Analysis {
  std::array<Tensor, 3> side;  // y for levels 0..2, undefined when disabled
  Tensor top;                  // top latent, M x B
};

struct TrainOutputs {
  Tensor base_bits;
  Tensor enhancement_bits;
  std::array<Tensor, 3> side_bits;  // undefined when disabled
  Tensor chamfer;
  Tensor cross_entropy;
  Tensor logits;
  Tensor reconstruction;
  // Quantized base latent as fed to the classifier and (detached) the
  // synthesis path.
  Tensor base_latent;
};

class ScalableCodecModel {
 public:
  ScalableCodecModel(CodecConfig config, std::uint64_t seed);

  const CodecConfig& config() const { return config_; }
  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }
  const FactorizedEntropyModel& top_entropy() const { return top_entropy_; }
  const FactorizedEntropyModel& side_entropy(int level) const;

  // Entropy-model parameters and everything else, for separate optimizer
  // groups.
  std::vector<Tensor> NetworkParameters() const;
  std::vector<Tensor> EntropyParameters() const;

  // Encoder side: continuous latents for every enabled stream.
  Analysis Analyze(const Batch& batch, bool training, ShapeTrace* trace = nullptr) const;

  // Class logits (K x B) from the quantized base latent alone.
  Tensor Classify(const Tensor& base) const;

  // Reconstruction (3 x B*P) from quantized latents. The base latent is
  // detached before synthesis.
  Tensor Synthesize(const Tensor& base, const Tensor& enhancement,
                    const std::array<Tensor, 3>& side, bool training,
                    ShapeTrace* trace = nullptr) const;

  // Full training graph with noise-mode quantization.
  TrainOutputs ForwardTrain(const Batch& batch, Rng& noise, bool training = true,
                            ShapeTrace* trace = nullptr) const;

  // Sum of the entropy models' median losses.
  Tensor MedianLoss() const;

 private:
  struct DownBlock {
    LinearLayer fc0, fc1;
    BatchNormLayer bn0, bn1;
  };
  struct Transform {
    LinearLayer fc0, fc1;
    Tensor operator()(const Tensor& x) const;
  };
  struct UpBlock {
    LinearLayer fc0, fc1;
    BatchNormLayer bn0, bn1;
    bool normalized = false;
  };

  Tensor Upsample(int level, const Tensor& input, bool training) const;

  CodecConfig config_;
  ParameterSet params_;
  std::array<DownBlock, kNumLevels> down_;
  std::array<Transform, 3> side_analysis_;
  std::array<Transform, 3> side_synthesis_;
  Transform top_analysis_;
  Transform top_synthesis_;
  std::array<UpBlock, kNumLevels> up_;
  std::array<LinearLayer, 3> classifier_;
  FactorizedEntropyModel top_entropy_;
  std::array<FactorizedEntropyModel, 3> side_entropy_;
};

SPCC_NAMESPACE_END

#endif  // SPCC_MODEL_H_
