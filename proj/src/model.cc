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

#include "spcc/model.h"

#include <algorithm>
#include <string>

#include "spcc/errors.h"
#include "spcc/ops.h"

SPCC_NAMESPACE_BEGIN

namespace {

std::size_t U(int v) { return static_cast<std::size_t>(v); }

void Record(ShapeTrace* trace, std::string name, Shape shape) {
  if (trace) trace->emplace_back(std::move(name), std::move(shape));
}

std::string Level(const char* prefix, int i) { return prefix + std::to_string(i); }

}  // namespace

Batch MakeBatch(std::span<const PointCloud> clouds) {
  if (clouds.empty()) throw ArgumentError("batch: no clouds");
  const std::size_t p = clouds[0].size();
  const bool attrs = clouds[0].has_attrs();
  const std::size_t a = attrs ? clouds[0].attrs.dim(0) : 0;
  const std::size_t b = clouds.size();
  std::vector<Real> coords(3 * b * p), features(a * b * p);
  Batch batch;
  batch.size = b;
  for (std::size_t s = 0; s < b; ++s) {
    const PointCloud& c = clouds[s];
    if (c.size() != p || c.has_attrs() != attrs || (attrs && c.attrs.dim(0) != a)) {
      throw ShapeError("batch: clouds differ in point count or attributes");
    }
    for (std::size_t r = 0; r < 3; ++r) {
      std::copy_n(c.coords.values().data() + r * p, p, coords.data() + r * b * p + s * p);
    }
    for (std::size_t r = 0; r < a; ++r) {
      std::copy_n(c.attrs.values().data() + r * p, p, features.data() + r * b * p + s * p);
    }
    batch.labels.push_back(c.label.value_or(0));
  }
  batch.coords = Tensor({3, b * p}, std::move(coords));
  if (attrs) batch.attrs = Tensor({a, b * p}, std::move(features));
  return batch;
}

Tensor ScalableCodecModel::Transform::operator()(const Tensor& x) const {
  return fc1(Relu(fc0(x)));
}

ScalableCodecModel::ScalableCodecModel(CodecConfig config, std::uint64_t seed)
    : config_(std::move(config)) {
  config_.Validate();
  Rng rng(seed);
  const auto& lv = config_.levels;
  for (int i = 1; i < kNumLevels; ++i) {
    const std::string name = Level("down", i);
    const std::size_t in = U(lv[i - 1].features) + 3, d = U(lv[i].features);
    DownBlock& b = down_[i];
    b.fc0 = LinearLayer(params_, name + "/fc0", in, d, rng);
    b.bn0 = BatchNormLayer(params_, name + "/bn0", d);
    b.fc1 = LinearLayer(params_, name + "/fc1", d, d, rng);
    b.bn1 = BatchNormLayer(params_, name + "/bn1", d);
  }
  for (int i = 0; i < kTopLevel; ++i) {
    if (!config_.side_enabled(i)) continue;
    const std::string name = Level("side", i);
    const std::size_t d = U(lv[i].features), m = U(lv[i].latent);
    side_analysis_[i] = {LinearLayer(params_, name + "/analysis0", d + 3, d, rng),
                         LinearLayer(params_, name + "/analysis1", d, m, rng)};
    side_synthesis_[i] = {LinearLayer(params_, name + "/synthesis0", m, d, rng),
                          LinearLayer(params_, name + "/synthesis1", d, d + 3, rng)};
  }
  const std::size_t d3 = U(lv[kTopLevel].features), m3 = U(config_.top_latent());
  top_analysis_ = {LinearLayer(params_, "top/analysis0", d3, d3, rng),
                   LinearLayer(params_, "top/analysis1", d3, m3, rng)};
  top_synthesis_ = {LinearLayer(params_, "top/synthesis0", m3, d3, rng),
                    LinearLayer(params_, "top/synthesis1", d3, d3, rng)};
  for (int i = kTopLevel; i >= 0; --i) {
    const std::string name = Level("up", i);
    std::size_t in = i == kTopLevel ? d3 : U(lv[i + 1].up_channels);
    if (i < kTopLevel && config_.side_enabled(i)) in += U(lv[i].features) + 3;
    UpBlock& b = up_[i];
    if (i > 0) {
      const std::size_t width = U(lv[i].up_channels) * U(lv[i].group_size);
      b.fc0 = LinearLayer(params_, name + "/fc0", in, width, rng);
      b.bn0 = BatchNormLayer(params_, name + "/bn0", width);
      b.fc1 = LinearLayer(params_, name + "/fc1", width, width, rng);
      b.bn1 = BatchNormLayer(params_, name + "/bn1", width);
      b.normalized = true;
    } else {
      const std::size_t hidden = U(lv[1].up_channels);
      b.fc0 = LinearLayer(params_, name + "/fc0", in, hidden, rng);
      b.fc1 = LinearLayer(params_, name + "/fc1", hidden, U(lv[0].up_channels), rng);
    }
  }
  const std::size_t h1 = U(config_.classifier_hidden[0]), h2 = U(config_.classifier_hidden[1]);
  classifier_[0] = LinearLayer(params_, "classifier/fc0", U(config_.base_latent), h1, rng);
  classifier_[1] = LinearLayer(params_, "classifier/fc1", h1, h2, rng);
  classifier_[2] = LinearLayer(params_, "classifier/fc2", h2, U(config_.classes), rng);

  top_entropy_ = FactorizedEntropyModel(params_, "entropy/top", m3, config_.entropy_filters, rng);
  for (int i = 0; i < kTopLevel; ++i) {
    if (!config_.side_enabled(i)) continue;
    side_entropy_[i] = FactorizedEntropyModel(params_, Level("entropy/side", i),
                                              U(lv[i].latent), config_.entropy_filters, rng);
  }
}

const FactorizedEntropyModel& ScalableCodecModel::side_entropy(int level) const {
  if (!config_.side_enabled(level)) {
    throw ArgumentError("side level " + std::to_string(level) + " is disabled");
  }
  return side_entropy_[level];
}

std::vector<Tensor> ScalableCodecModel::NetworkParameters() const {
  std::vector<Tensor> out;
  for (const NamedTensor& p : params_.parameters()) {
    if (p.name.rfind("entropy/", 0) != 0) out.push_back(p.tensor);
  }
  return out;
}

std::vector<Tensor> ScalableCodecModel::EntropyParameters() const {
  std::vector<Tensor> out;
  for (const NamedTensor& p : params_.parameters()) {
    if (p.name.rfind("entropy/", 0) == 0) out.push_back(p.tensor);
  }
  return out;
}

Analysis ScalableCodecModel::Analyze(const Batch& batch, bool training, ShapeTrace* trace) const {
  const auto& lv = config_.levels;
  const std::size_t b = batch.size;
  if (!batch.coords.defined() || batch.coords.rank() != 2 || batch.coords.dim(0) != 3 ||
      batch.coords.dim(1) != b * U(lv[0].points)) {
    throw ShapeError("analysis: expected coordinates of shape 3 x " +
                     std::to_string(b * U(lv[0].points)));
  }
  const std::size_t attr_rows = batch.attrs.defined() ? batch.attrs.dim(0) : 0;
  if (attr_rows != U(config_.attribute_channels)) {
    throw ShapeError("analysis: attribute channel count does not match the model");
  }
  Tensor coords = batch.coords;
  Tensor features = attr_rows > 0 ? Concat({coords, batch.attrs}, 0) : coords;
  Record(trace, "input.features", features.shape());
  Analysis out;
  for (int i = 1; i < kNumLevels; ++i) {
    const std::size_t parent = U(lv[i - 1].points), p = U(lv[i].points);
    const std::size_t s = U(lv[i].group_size), c = U(lv[i - 1].features) + 3;
    std::vector<Real> centers(3 * b * p), residuals(3 * b * p * s);
    std::vector<std::size_t> gather(b * p * s);
    const CoordsView all(coords);
    for (std::size_t k = 0; k < b; ++k) {
      const CoordsView cloud = all.Columns(k * parent, parent);
      const std::vector<std::size_t> picks = FarthestPointSample(cloud, p);
      GroupIndex groups;
      if (i < kTopLevel) {
        groups = BallQuery(cloud, picks, lv[i].radius, s);
      } else {
        // Global grouping: every point joins the single centroid's group.
        groups.centroid_indices = picks;
        groups.group_size = s;
        for (std::size_t j = 0; j < parent; ++j) groups.members.push_back(j);
        groups.padded.assign(parent, 0);
      }
      for (std::size_t g = 0; g < p; ++g) {
        for (std::size_t a = 0; a < 3; ++a) {
          centers[a * b * p + k * p + g] = cloud(a, picks[g]);
        }
        for (std::size_t m = 0; m < s; ++m) {
          const std::size_t member = groups.member(g, m);
          const std::size_t col = (k * p + g) * s + m;
          gather[col] = k * parent + member;
          for (std::size_t a = 0; a < 3; ++a) {
            residuals[a * b * p * s + col] = cloud(a, member) - cloud(a, picks[g]);
          }
        }
      }
    }
    Tensor grouped = Concat(
        {Tensor({3, b * p * s}, std::move(residuals)), GatherColumns(features, gather)}, 0);
    Record(trace, Level("down", i) + ".grouped", {c, b * p, s});
    const DownBlock& blk = down_[i];
    Tensor h = Relu(blk.bn0(blk.fc0(grouped), training));
    h = Relu(blk.bn1(blk.fc1(h), training));
    features = MaxPoolGroups(Reshape(h, {U(lv[i].features), b * p, s}));
    coords = Tensor({3, b * p}, std::move(centers));
    Record(trace, Level("down", i) + ".centroids", coords.shape());
    Record(trace, Level("down", i) + ".features", features.shape());
    const int side = i - 1;
    if (config_.side_enabled(side)) {
      Record(trace, Level("side", side) + ".input", grouped.shape());
      out.side[side] = side_analysis_[side](grouped);
      Record(trace, Level("side", side) + ".latent", out.side[side].shape());
    }
  }
  out.top = top_analysis_(features);
  Record(trace, "top.latent", out.top.shape());
  return out;
}

Tensor ScalableCodecModel::Classify(const Tensor& base) const {
  if (base.rank() != 2 || base.dim(0) != U(config_.base_latent)) {
    throw ShapeError("classify: base latent must have " + std::to_string(config_.base_latent) +
                     " rows");
  }
  Tensor h = Relu(classifier_[0](base));
  h = Relu(classifier_[1](h));
  return classifier_[2](h);
}

Tensor ScalableCodecModel::Upsample(int level, const Tensor& input, bool training) const {
  const UpBlock& b = up_[level];
  if (!b.normalized) return b.fc1(Relu(b.fc0(input)));
  Tensor h = Relu(b.bn0(b.fc0(input), training));
  h = Relu(b.bn1(b.fc1(h), training));
  return InterleaveGroups(h, U(config_.levels[level].group_size));
}

Tensor ScalableCodecModel::Synthesize(const Tensor& base, const Tensor& enhancement,
                                      const std::array<Tensor, 3>& side, bool training,
                                      ShapeTrace* trace) const {
  if (!base.defined() || !enhancement.defined()) {
    throw IncompleteBitstreamError("reconstruction needs both base and enhancement latents");
  }
  Tensor latent = Concat({Detach(base), enhancement}, 0);
  Tensor h = top_synthesis_(latent);
  Record(trace, "top.synthesis", h.shape());
  for (int i = kTopLevel; i >= 0; --i) {
    if (i < kTopLevel && config_.side_enabled(i)) {
      if (!side[i].defined()) {
        throw IncompleteBitstreamError("reconstruction needs the level " + std::to_string(i) +
                                       " side latent");
      }
      Tensor grouped = side_synthesis_[i](side[i]);
      Record(trace, Level("side", i) + ".synthesis", grouped.shape());
      h = Concat({h, grouped}, 0);
    }
    Record(trace, Level("up", i) + ".input", h.shape());
    h = Upsample(i, h, training);
    Record(trace, Level("up", i) + ".output", h.shape());
  }
  return h;
}

TrainOutputs ScalableCodecModel::ForwardTrain(const Batch& batch, Rng& noise, bool training,
                                              ShapeTrace* trace) const {
  const Analysis a = Analyze(batch, training, trace);
  TrainOutputs out;
  const Tensor top = AddUniformNoise(a.top, noise);
  const std::size_t sizes[2] = {U(config_.base_latent), U(config_.enhancement_latent)};
  const std::vector<Tensor> parts = Split(top, sizes, 0);
  out.base_latent = parts[0];
  out.base_bits = top_entropy_.RateBits(parts[0], 0);
  out.enhancement_bits = top_entropy_.RateBits(parts[1], sizes[0]);
  std::array<Tensor, 3> side_hat;
  for (int i = 0; i < kTopLevel; ++i) {
    if (!config_.side_enabled(i)) continue;
    side_hat[i] = AddUniformNoise(a.side[i], noise);
    out.side_bits[i] = side_entropy_[i].RateBits(side_hat[i]);
  }
  out.logits = Classify(parts[0]);
  Record(trace, "classifier.logits", out.logits.shape());
  out.cross_entropy = CrossEntropy(out.logits, batch.labels);
  out.reconstruction = Synthesize(parts[0], parts[1], side_hat, training, trace);
  out.chamfer = BatchedChamferDistance(batch.coords, out.reconstruction, batch.size);
  return out;
}

Tensor ScalableCodecModel::MedianLoss() const {
  Tensor total = top_entropy_.MedianLoss();
  for (int i = 0; i < kTopLevel; ++i) {
    if (config_.side_enabled(i)) total = Add(total, side_entropy_[i].MedianLoss());
  }
  return total;
}

SPCC_NAMESPACE_END
