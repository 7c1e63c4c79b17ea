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

#ifndef SPCC_OPS_H_
#define SPCC_OPS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "spcc/tensor.h"

SPCC_NAMESPACE_BEGIN

// Shared pointwise affine map over columns: input C_in x N, weight
// C_out x C_in, bias C_out. Column j of the result is W * input[:, j] + b.
Tensor Linear(const Tensor& input, const Tensor& weight, const Tensor& bias);

Tensor Relu(const Tensor& input);

struct BatchNormOptions {
  Real momentum = Real(0.1);
  Real epsilon = Real(1e-5);
};

// Per-channel normalization of a C x N input. Training mode normalizes with
// batch statistics (N >= 2) and updates the running statistics in place;
// evaluation mode uses the running statistics.
Tensor BatchNorm(const Tensor& input, const Tensor& scale, const Tensor& shift,
                 Tensor& running_mean, Tensor& running_var, bool training,
                 BatchNormOptions options = {});

// C x P x S -> C x P, maximum over the last axis. The gradient goes to the
// first maximal element.
Tensor MaxPoolGroups(const Tensor& input);

Tensor Concat(const std::vector<Tensor>& parts, std::size_t axis);
Tensor Slice(const Tensor& input, std::size_t axis, std::size_t begin, std::size_t length);
std::vector<Tensor> Split(const Tensor& input, std::span<const std::size_t> sizes,
                          std::size_t axis);

// Same values, no path back to the input.
Tensor Detach(const Tensor& input);

// Mean over the batch of -log softmax(logits[:, b])[labels[b]] for K x B
// logits.
Tensor CrossEntropy(const Tensor& logits, std::span<const int> labels);

Tensor Reshape(const Tensor& input, Shape shape);

// out[:, m] = input[:, columns[m]] for a C x N input.
Tensor GatherColumns(const Tensor& input, std::span<const std::size_t> columns);

// (E*S) x N -> E x (N*S) with out[e, n*S + s] = input[e*S + s, n]: each
// column's channel block becomes S consecutive columns.
Tensor InterleaveGroups(const Tensor& input, std::size_t group_size);
Tensor DeinterleaveGroups(const Tensor& input, std::size_t group_size);

Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor Scale(const Tensor& input, Real factor);
Tensor Log(const Tensor& input);
Tensor Sum(const Tensor& input);
Tensor Mean(const Tensor& input);

SPCC_NAMESPACE_END

#endif  // SPCC_OPS_H_
