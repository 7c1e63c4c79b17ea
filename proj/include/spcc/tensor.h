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

#ifndef SPCC_TENSOR_H_
#define SPCC_TENSOR_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "spcc/precision.h"

SPCC_NAMESPACE_BEGIN

using Shape = std::vector<std::size_t>;

std::size_t NumElements(const Shape& shape);
std::string ShapeToString(const Shape& shape);

namespace detail {

// One vertex of the autodiff graph. `backward` reads this node's grad and
// accumulates into the grads of `inputs`; leaves have no backward.
struct Node {
  Shape shape;
  std::vector<Real> value;
  std::vector<Real> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;

  std::vector<Real>& EnsureGrad() {
    if (grad.size() != value.size()) grad.assign(value.size(), Real(0));
    return grad;
  }
};

}  // namespace detail

// Graph recording is on by default, per thread.
bool GradEnabled();

class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Dense row-major array that records the operations producing it. Copies are
// shallow handles to the same storage, as with framework tensors.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<Real> values, bool requires_grad = false);

  static Tensor Zeros(Shape shape, bool requires_grad = false);
  static Tensor Full(Shape shape, Real value, bool requires_grad = false);
  static Tensor Scalar(Real value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const;

  std::span<const Real> values() const;
  std::span<Real> mutable_values();
  Real item() const;

  bool requires_grad() const;
  void set_requires_grad(bool requires_grad);
  bool is_leaf() const;

  // Accumulated gradient; zeros when no backward pass reached this tensor.
  std::vector<Real> grad() const;
  std::span<Real> mutable_grad();
  void ZeroGrad();

  // Reverse-mode pass from a single-element tensor. Leaf gradients
  // accumulate across calls; intermediate gradients are reset each call.
  void Backward() const;

  const std::shared_ptr<detail::Node>& node() const { return node_; }
  static Tensor FromNode(std::shared_ptr<detail::Node> node);

 private:
  std::shared_ptr<detail::Node> node_;
};

// True when a differentiable path leads from `target` to `root`.
bool ReachesInBackward(const Tensor& root, const Tensor& target);

namespace detail {

// Wraps a computed value into a tensor. When recording is enabled and any
// input requires grad, the result joins the graph with `backward`.
Tensor MakeResult(Shape shape, std::vector<Real> value,
                  const std::vector<Tensor>& inputs,
                  std::function<void(Node&)> backward);

}  // namespace detail

SPCC_NAMESPACE_END

#endif  // SPCC_TENSOR_H_
