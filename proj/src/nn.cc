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

#include "spcc/nn.h"

#include <cmath>

#include "spcc/errors.h"
#include "spcc/ops.h"

SPCC_NAMESPACE_BEGIN

namespace {

std::vector<std::uint64_t> ArchiveShape(const Shape& shape) {
  return std::vector<std::uint64_t>(shape.begin(), shape.end());
}

void StoreTensor(Archive& archive, const std::string& key, const Tensor& t) {
  archive.PutFloat64(key, ArchiveShape(t.shape()),
                     std::vector<double>(t.values().begin(), t.values().end()));
}

void RestoreTensor(const Archive& archive, const std::string& key, Tensor& t) {
  const ArchiveEntry& entry = archive.Get(key);
  if (entry.shape != ArchiveShape(t.shape())) {
    throw FormatError("archive entry '" + key + "' has the wrong shape for " +
                      ShapeToString(t.shape()));
  }
  const std::vector<double> values = archive.GetReals(key);
  auto dst = t.mutable_values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<Real>(values[i]);
}

}  // namespace

void ParameterSet::CheckUnique(const std::string& name) const {
  if (Find(name) != nullptr) throw ArgumentError("duplicate parameter name '" + name + "'");
}

Tensor ParameterSet::Add(const std::string& name, Tensor tensor) {
  CheckUnique(name);
  tensor.set_requires_grad(true);
  parameters_.push_back({name, tensor});
  return tensor;
}

Tensor ParameterSet::AddBuffer(const std::string& name, Tensor tensor) {
  CheckUnique(name);
  buffers_.push_back({name, tensor});
  return tensor;
}

const Tensor* ParameterSet::Find(const std::string& name) const {
  for (const auto* list : {&parameters_, &buffers_}) {
    for (const NamedTensor& e : *list) {
      if (e.name == name) return &e.tensor;
    }
  }
  return nullptr;
}

std::size_t ParameterSet::ParameterCount() const {
  std::size_t n = 0;
  for (const NamedTensor& e : parameters_) n += e.tensor.size();
  return n;
}

void ParameterSet::ZeroGrad() {
  for (NamedTensor& e : parameters_) e.tensor.ZeroGrad();
}

void ParameterSet::Store(Archive& archive) const {
  for (const NamedTensor& e : parameters_) StoreTensor(archive, "param/" + e.name, e.tensor);
  for (const NamedTensor& e : buffers_) StoreTensor(archive, "buffer/" + e.name, e.tensor);
}

void ParameterSet::Restore(const Archive& archive) {
  for (NamedTensor& e : parameters_) RestoreTensor(archive, "param/" + e.name, e.tensor);
  for (NamedTensor& e : buffers_) RestoreTensor(archive, "buffer/" + e.name, e.tensor);
}

LinearLayer::LinearLayer(ParameterSet& params, const std::string& name,
                         std::size_t in_channels, std::size_t out_channels, Rng& rng) {
  if (in_channels == 0 || out_channels == 0) {
    throw ShapeError("linear layer '" + name + "' needs positive channel counts");
  }
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_channels));
  std::vector<Real> w(out_channels * in_channels), b(out_channels);
  for (Real& v : w) v = static_cast<Real>(rng.Uniform(-bound, bound));
  for (Real& v : b) v = static_cast<Real>(rng.Uniform(-bound, bound));
  weight_ = params.Add(name + "/weight", Tensor({out_channels, in_channels}, std::move(w)));
  bias_ = params.Add(name + "/bias", Tensor({out_channels}, std::move(b)));
}

Tensor LinearLayer::operator()(const Tensor& input) const {
  return Linear(input, weight_, bias_);
}

BatchNormLayer::BatchNormLayer(ParameterSet& params, const std::string& name,
                               std::size_t channels) {
  scale_ = params.Add(name + "/scale", Tensor::Full({channels}, Real(1)));
  shift_ = params.Add(name + "/shift", Tensor::Zeros({channels}));
  running_mean_ = params.AddBuffer(name + "/running_mean", Tensor::Zeros({channels}));
  running_var_ = params.AddBuffer(name + "/running_var", Tensor::Full({channels}, Real(1)));
}

Tensor BatchNormLayer::operator()(const Tensor& input, bool training) const {
  return BatchNorm(input, scale_, shift_, running_mean_, running_var_, training);
}

Adam::Adam(std::vector<std::vector<Tensor>> groups, AdamOptions options) : options_(options) {
  for (auto& group : groups) {
    std::vector<Slot> slots;
    for (Tensor& p : group) {
      slots.push_back({p, std::vector<double>(p.size(), 0.0), std::vector<double>(p.size(), 0.0)});
    }
    groups_.push_back(std::move(slots));
  }
}

void Adam::Step(const std::vector<double>& learning_rates) {
  if (learning_rates.size() != groups_.size()) {
    throw ArgumentError("adam: one learning rate per parameter group required");
  }
  ++steps_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
    const double lr = learning_rates[gi];
    for (Slot& slot : groups_[gi]) {
      const std::vector<Real> grad = slot.param.grad();
      auto values = slot.param.mutable_values();
      for (std::size_t i = 0; i < values.size(); ++i) {
        const double g = grad[i];
        slot.m[i] = b1 * slot.m[i] + (1.0 - b1) * g;
        slot.v[i] = b2 * slot.v[i] + (1.0 - b2) * g * g;
        if (lr == 0.0) continue;
        const double update = lr * (slot.m[i] / c1) / (std::sqrt(slot.v[i] / c2) + options_.epsilon);
        values[i] = static_cast<Real>(values[i] - update);
      }
    }
  }
}

double ClipGradNorm(const std::vector<Tensor>& params, double max_norm) {
  double total = 0.0;
  for (const Tensor& p : params) {
    const auto& g = p.node()->grad;
    for (Real v : g) total += static_cast<double>(v) * v;
  }
  const double norm = std::sqrt(total);
  if (norm > max_norm && norm > 0.0) {
    const Real factor = static_cast<Real>(max_norm / norm);
    for (const Tensor& p : params) {
      for (Real& v : p.node()->grad) v *= factor;
    }
  }
  return norm;
}

SPCC_NAMESPACE_END
