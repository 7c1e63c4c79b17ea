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

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "gradcheck.h"
#include "oracles.h"
#include "spcc/dataio.h"
#include "spcc/errors.h"
#include "spcc/ops.h"
#include "spcc/train.h"

namespace spcc {
namespace {

using testing::CheckGradients;
using testing::Miniature;
using testing::ExpectedTrace;
using testing::RandomBatch;

std::size_t U(int v) { return static_cast<std::size_t>(v); }

void AuditShapes(const CodecConfig& config, std::size_t b) {
  ScalableCodecModel model(config, 1);
  Batch batch = RandomBatch(b, U(config.input_points()), 2, config.classes);
  ShapeTrace trace;
  Rng noise(3);
  TrainOutputs out = model.ForwardTrain(batch, noise, true, &trace);
  const auto expected = ExpectedTrace(config, b);
  std::map<std::string, Shape> got(trace.begin(), trace.end());
  EXPECT_EQ(got.size(), trace.size()) << "duplicate trace names";
  for (const auto& [name, shape] : expected) {
    ASSERT_TRUE(got.count(name)) << name;
    EXPECT_EQ(got[name], shape) << name;
  }
  EXPECT_EQ(got.size(), expected.size());
  EXPECT_EQ(out.reconstruction.shape(), (Shape{3, b * U(config.input_points())}));
}

TEST(ModelShapeTest, FullPresetMatchesTable) {
  const CodecConfig full = CodecConfig::Full(40);
  AuditShapes(full, 2);
  // Spot values from the table: block 1 groups 6 x 256 x 4 into 128 x 256,
  // the level-2 stream maps 131 x 64 x 4 ... to 64 x 64 per sample.
  const auto e = ExpectedTrace(full, 1);
  EXPECT_EQ(e.at("down1.grouped"), (Shape{6, 256, 4}));
  EXPECT_EQ(e.at("down1.features"), (Shape{128, 256}));
  EXPECT_EQ(e.at("side2.latent"), (Shape{64, 64}));
  EXPECT_EQ(e.at("up3.input"), (Shape{256, 1}));
  EXPECT_EQ(e.at("up2.input"), (Shape{16 + 192 + 3, 64}));
  EXPECT_EQ(e.at("up0.output"), (Shape{3, 1024}));
}

TEST(ModelShapeTest, LitePresetMatchesTable) { AuditShapes(CodecConfig::Lite(6), 2); }

TEST(ModelShapeTest, MiniatureAllSideStreams) { AuditShapes(Miniature(), 3); }

TEST(ModelTest, LossComponentsFiniteAtInit) {
  const CodecConfig c = CodecConfig::Lite(6);
  ScalableCodecModel model(c, 4);
  Batch batch = RandomBatch(8, 1024, 5, 6);
  Rng noise(6);
  TrainOutputs out = model.ForwardTrain(batch, noise);
  for (const Tensor& t : {out.base_bits, out.enhancement_bits, out.side_bits[2], out.chamfer,
                          out.cross_entropy}) {
    EXPECT_TRUE(std::isfinite(t.item()));
    EXPECT_GE(t.item(), 0.0);
  }
  EXPECT_FALSE(out.side_bits[0].defined());
  EXPECT_THROW(model.side_entropy(0), ArgumentError);
}

TEST(ModelTest, DetachBarrier) {
  const CodecConfig c = CodecConfig::Lite(6);
  ScalableCodecModel model(c, 7);
  Batch batch = RandomBatch(4, 1024, 8, 6);
  Rng noise(9);
  TrainOutputs out = model.ForwardTrain(batch, noise);
  EXPECT_FALSE(ReachesInBackward(out.chamfer, out.base_latent));
  EXPECT_TRUE(ReachesInBackward(out.cross_entropy, out.base_latent));

  model.params().ZeroGrad();
  out.chamfer.Backward();
  const Tensor* w = model.params().Find("top/analysis1/weight");
  ASSERT_NE(w, nullptr);
  const std::vector<Real> g = w->grad();
  const std::size_t cols = w->dim(1);
  double base_rows = 0.0, enh_rows = 0.0;
  for (std::size_t r = 0; r < w->dim(0); ++r) {
    for (std::size_t k = 0; k < cols; ++k) {
      (r < U(c.base_latent) ? base_rows : enh_rows) += std::abs(g[r * cols + k]);
    }
  }
  EXPECT_EQ(base_rows, 0.0);
  EXPECT_GT(enh_rows, 0.0);
  for (const NamedTensor& p : model.params().parameters()) {
    if (p.name.rfind("classifier/", 0) != 0) continue;
    for (Real v : p.tensor.grad()) ASSERT_EQ(v, 0.0) << p.name;
  }

  model.params().ZeroGrad();
  out.cross_entropy.Backward();
  double base_ce = 0.0;
  for (std::size_t i = 0; i < U(c.base_latent) * cols; ++i) base_ce += std::abs(w->grad()[i]);
  EXPECT_GT(base_ce, 0.0);
}

TEST(ModelTest, ClassifierDependsOnBaseOnly) {
  ScalableCodecModel model(CodecConfig::Lite(6), 10);
  Tensor zero = Tensor::Zeros({48, 1});
  Tensor logits = model.Classify(zero);
  double total = 0.0, mx = -1e300;
  for (Real v : logits.values()) {
    ASSERT_TRUE(std::isfinite(v));
    mx = std::max(mx, double(v));
  }
  for (Real v : logits.values()) total += std::exp(v - mx);
  double softmax_sum = 0.0;
  for (Real v : logits.values()) softmax_sum += std::exp(v - mx) / total;
  EXPECT_NEAR(softmax_sum, 1.0, 1e-6);
  EXPECT_THROW(model.Classify(Tensor::Zeros({64, 1})), ShapeError);
}

TEST(ModelTest, SynthesisNeedsEveryEnabledStream) {
  ScalableCodecModel model(CodecConfig::Lite(6), 11);
  std::array<Tensor, 3> side;
  EXPECT_THROW(model.Synthesize(Tensor::Zeros({48, 1}), Tensor(), side, false),
               IncompleteBitstreamError);
  EXPECT_THROW(model.Synthesize(Tensor::Zeros({48, 1}), Tensor::Zeros({16, 1}), side, false),
               IncompleteBitstreamError);
  side[2] = Tensor::Zeros({16, 64});
  EXPECT_EQ(model.Synthesize(Tensor::Zeros({48, 1}), Tensor::Zeros({16, 1}), side, false)
                .shape(),
            (Shape{3, 1024}));
}

TEST(ModelTest, IdenticalPointsGiveConstantLatentColumns) {
  const CodecConfig c = CodecConfig::Lite(6);
  ScalableCodecModel model(c, 12);
  PointCloud cloud{Tensor::Full({3, 1024}, 0.25), {}, 0};
  std::vector<PointCloud> one{cloud};
  Analysis a = model.Analyze(MakeBatch(one), false);
  const Tensor& y = a.side[2];
  ASSERT_EQ(y.shape(), (Shape{16, 64}));
  for (std::size_t r = 0; r < 16; ++r)
    for (std::size_t j = 1; j < 64; ++j) EXPECT_EQ(y.values()[r * 64 + j], y.values()[r * 64]);
}

TEST(ModelTest, GroupedMlpIsInvariantToMemberOrder) {
  // The downsampling summary is a shared per-column MLP then a max over the
  // member axis, so permuting members within each group cannot matter.
  ParameterSet params;
  Rng rng(13);
  LinearLayer fc0(params, "fc0", 6, 8, rng), fc1(params, "fc1", 8, 8, rng);
  BatchNormLayer bn0(params, "bn0", 8), bn1(params, "bn1", 8);
  const std::size_t p = 5, s = 4;
  Tensor grouped = testing::RandomTensor({6, p * s}, rng, -1, 1, false);
  std::vector<std::size_t> perm;
  for (std::size_t g = 0; g < p; ++g) {
    std::vector<std::size_t> m{0, 1, 2, 3};
    for (std::size_t i = 3; i > 0; --i) std::swap(m[i], m[rng.Index(i + 1)]);
    for (std::size_t k : m) perm.push_back(g * s + k);
  }
  auto summary = [&](const Tensor& x) {
    Tensor h = Relu(bn0(fc0(x), true));
    h = Relu(bn1(fc1(h), true));
    return MaxPoolGroups(Reshape(h, {8, p, s}));
  };
  Tensor a = summary(grouped), b = summary(GatherColumns(grouped, perm));
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.values()[i], b.values()[i], 1e-12);
}

TEST(ModelGradientTest, MiniatureGraphMatchesFiniteDifferences) {
  const testing::GraphCheck g = testing::CheckTrainingGraph(Miniature(), 14, 3);
  EXPECT_LT(g.value_mismatch, 1e-12);
  EXPECT_LT(g.tape_mismatch, 1e-12);
  EXPECT_LT(g.network.max_error, 1e-3) << g.worst_name << " " << g.network.worst;
  EXPECT_GT(g.network.checked, 1000u);
  EXPECT_LT(g.medians.max_error, 1e-3) << g.medians.worst;
}

TEST(ModelGradientTest, LiteGraphSampledEntriesMatchFiniteDifferences) {
  const testing::GraphCheck g = testing::CheckTrainingGraph(CodecConfig::Lite(6), 16, 2, 3);
  EXPECT_LT(g.value_mismatch, 1e-12);
  EXPECT_LT(g.tape_mismatch, 1e-12);
  EXPECT_LT(g.network.max_error, 1e-3) << g.worst_name << " " << g.network.worst;
  EXPECT_LT(g.medians.max_error, 1e-3) << g.medians.worst;
}

}  // namespace
}  // namespace spcc
