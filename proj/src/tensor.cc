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

#include "spcc/tensor.h"

#include <algorithm>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "spcc/errors.h"

SPCC_NAMESPACE_BEGIN

namespace {
thread_local bool grad_enabled = true;

void TopologicalOrder(detail::Node* root, std::vector<detail::Node*>& order) {
  // Iterative post-order DFS; inputs are visited in argument order, which
  // makes the replay order deterministic.
  std::unordered_set<detail::Node*> visited;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  stack.emplace_back(root, 0);
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      detail::Node* child = node->inputs[next++].get();
      if (child->requires_grad && visited.insert(child).second) {
        stack.emplace_back(child, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
}

}  // namespace

std::size_t NumElements(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::ostringstream o;
  o << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) o << (i ? "x" : "") << shape[i];
  o << "]";
  return o.str();
}

bool GradEnabled() { return grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(grad_enabled) { grad_enabled = false; }
NoGradGuard::~NoGradGuard() { grad_enabled = previous_; }

Tensor::Tensor(Shape shape, std::vector<Real> values, bool requires_grad) {
  if (NumElements(shape) != values.size()) {
    throw ShapeError("tensor shape " + ShapeToString(shape) + " does not hold " +
                     std::to_string(values.size()) + " values");
  }
  node_ = std::make_shared<detail::Node>();
  node_->shape = std::move(shape);
  node_->value = std::move(values);
  node_->requires_grad = requires_grad;
}

Tensor Tensor::Zeros(Shape shape, bool requires_grad) {
  const std::size_t n = NumElements(shape);
  return Tensor(std::move(shape), std::vector<Real>(n, Real(0)), requires_grad);
}

Tensor Tensor::Full(Shape shape, Real value, bool requires_grad) {
  const std::size_t n = NumElements(shape);
  return Tensor(std::move(shape), std::vector<Real>(n, value), requires_grad);
}

Tensor Tensor::Scalar(Real value, bool requires_grad) {
  return Tensor({}, {value}, requires_grad);
}

Tensor Tensor::FromNode(std::shared_ptr<detail::Node> node) {
  Tensor t;
  t.node_ = std::move(node);
  return t;
}

const Shape& Tensor::shape() const { return node_->shape; }

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= rank()) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for " +
                     ShapeToString(shape()));
  }
  return node_->shape[axis];
}

std::size_t Tensor::size() const { return node_->value.size(); }

std::span<const Real> Tensor::values() const { return node_->value; }
std::span<Real> Tensor::mutable_values() { return node_->value; }

Real Tensor::item() const {
  if (size() != 1) throw ShapeError("item() needs a single-element tensor");
  return node_->value[0];
}

bool Tensor::requires_grad() const { return node_->requires_grad; }

void Tensor::set_requires_grad(bool requires_grad) {
  if (!is_leaf()) throw ArgumentError("requires_grad can only be set on leaf tensors");
  node_->requires_grad = requires_grad;
}

bool Tensor::is_leaf() const { return !node_->backward; }

std::vector<Real> Tensor::grad() const {
  if (node_->grad.size() == node_->value.size()) return node_->grad;
  return std::vector<Real>(size(), Real(0));
}

std::span<Real> Tensor::mutable_grad() { return node_->EnsureGrad(); }

void Tensor::ZeroGrad() {
  if (!node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), Real(0));
}

void Tensor::Backward() const {
  if (size() != 1) {
    throw ShapeError("backward needs a scalar loss, got shape " + ShapeToString(shape()));
  }
  if (!node_->requires_grad) return;
  std::vector<detail::Node*> order;
  TopologicalOrder(node_.get(), order);
  for (detail::Node* n : order) {
    if (n->backward) n->grad.assign(n->value.size(), Real(0));
  }
  node_->EnsureGrad()[0] += Real(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backward) (*it)->backward(**it);
  }
}

bool ReachesInBackward(const Tensor& root, const Tensor& target) {
  if (!root.defined() || !target.defined() || !root.requires_grad()) return false;
  std::vector<detail::Node*> order;
  TopologicalOrder(root.node().get(), order);
  return std::find(order.begin(), order.end(), target.node().get()) != order.end();
}

namespace detail {

Tensor MakeResult(Shape shape, std::vector<Real> value, const std::vector<Tensor>& inputs,
                  std::function<void(Node&)> backward) {
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  if (GradEnabled()) {
    for (const Tensor& t : inputs) {
      if (t.defined() && t.requires_grad()) {
        node->requires_grad = true;
        break;
      }
    }
  }
  if (node->requires_grad) {
    node->inputs.reserve(inputs.size());
    for (const Tensor& t : inputs) node->inputs.push_back(t.node());
    node->backward = std::move(backward);
  }
  return Tensor::FromNode(std::move(node));
}

}  // namespace detail

SPCC_NAMESPACE_END
