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

#ifndef SPCC_NN_H_
#define SPCC_NN_H_

#include <cstddef>
#include <string>
#include <vector>

#include "spcc/archive.h"
#include "spcc/random.h"
#include "spcc/tensor.h"

SPCC_NAMESPACE_BEGIN

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

// Registry of trainable parameters and non-trainable buffers, keyed by
// hierarchical names. Entries share storage with the layers that own them.
class ParameterSet {
 public:
  // Marks the tensor trainable. Duplicate names raise ArgumentError.
  Tensor Add(const std::string& name, Tensor tensor);
  Tensor AddBuffer(const std::string& name, Tensor tensor);

  const std::vector<NamedTensor>& parameters() const { return parameters_; }
  const std::vector<NamedTensor>& buffers() const { return buffers_; }
  // Null when absent.
  const Tensor* Find(const std::string& name) const;
  std::size_t ParameterCount() const;

  void ZeroGrad();

  // Writes "param/<name>" and "buffer/<name>" entries.
  void Store(Archive& archive) const;
  // Copies stored values into the registered tensors; missing entries or
  // shape mismatches raise FormatError.
  void Restore(const Archive& archive);

 private:
  void CheckUnique(const std::string& name) const;

  std::vector<NamedTensor> parameters_;
  std::vector<NamedTensor> buffers_;
};

class LinearLayer {
 public:
  LinearLayer() = default;
  // Weights and bias are uniform in +-1/sqrt(in_channels).
  LinearLayer(ParameterSet& params, const std::string& name, std::size_t in_channels,
              std::size_t out_channels, Rng& rng);

  Tensor operator()(const Tensor& input) const;
  std::size_t in_channels() const { return weight_.dim(1); }
  std::size_t out_channels() const { return weight_.dim(0); }
  const Tensor& weight() const { return weight_; }
  const Tensor& bias() const { return bias_; }

 private:
  Tensor weight_;
  Tensor bias_;
};

class BatchNormLayer {
 public:
  BatchNormLayer() = default;
  BatchNormLayer(ParameterSet& params, const std::string& name, std::size_t channels);

  Tensor operator()(const Tensor& input, bool training) const;

 private:
  Tensor scale_;
  Tensor shift_;
  // Handles share nodes, so updates through these copies persist.
  mutable Tensor running_mean_;
  mutable Tensor running_var_;
};

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  // Each group has its own learning rate, set per step.
  explicit Adam(std::vector<std::vector<Tensor>> groups, AdamOptions options = {});

  void Step(const std::vector<double>& learning_rates);
  std::size_t step_count() const { return steps_; }

 private:
  struct Slot {
    Tensor param;
    std::vector<double> m;
    std::vector<double> v;
  };
  std::vector<std::vector<Slot>> groups_;
  AdamOptions options_;
  std::size_t steps_ = 0;
};

// Rescales gradients in place so their global L2 norm is at most max_norm.
// Returns the norm before clipping.
double ClipGradNorm(const std::vector<Tensor>& params, double max_norm);

SPCC_NAMESPACE_END

#endif  // SPCC_NN_H_
