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


// Double-precision criteria: gradients, geometry oracles, detach barrier.

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "../gradcheck.h"
#include "../oracles.h"
#include "acceptance.h"
#include "spcc/entropy.h"
#include "spcc/geometry.h"
#include "spcc/model.h"
#include "spcc/nn.h"
#include "spcc/ops.h"
#include "spcc/train.h"

namespace spcc::acceptance {
namespace {

using testing::CheckGradients;
using testing::RandomTensor;

constexpr double kGradTolerance = 1e-3;
constexpr double kChamferTolerance = 1e-10;
constexpr double kDetachTolerance = 1e-12;
constexpr double kTapeTolerance = 1e-12;

Tensor Probe(const Tensor& out, std::uint64_t seed) {
  Rng rng(seed);
  return Sum(Mul(out, RandomTensor(out.shape(), rng, -1.0, 1.0, false)));
}

struct OpCase {
  std::string name;
  std::function<Tensor()> loss;
  std::vector<Tensor> inputs;
};

std::vector<OpCase> OpCases() {
  Rng rng(101);
  std::vector<OpCase> cases;
  auto r = [&](Shape s, double lo = -1.0, double hi = 1.0) { return RandomTensor(s, rng, lo, hi); };

  Tensor x = r({6, 12}), w = r({4, 6}), b = r({4});
  cases.push_back({"linear", [=] { return Probe(Linear(x, w, b), 1); }, {x, w, b}});
  Tensor xr = r({5, 9});
  cases.push_back({"relu", [=] { return Probe(Relu(xr), 2); }, {xr}});

  Tensor xb = r({4, 10}, -2, 2), g = r({4}, 0.5, 1.5), sh = r({4});
  cases.push_back({"batchnorm", [=] {
                     Tensor mean = Tensor::Zeros({4}), var = Tensor::Full({4}, 1.0);
                     return Probe(BatchNorm(xb, g, sh, mean, var, true), 3);
                   },
                   {xb, g, sh}});

  Tensor xm = r({3, 5, 4});
  cases.push_back({"maxpool", [=] { return Probe(MaxPoolGroups(xm), 4); }, {xm}});
  Tensor c0 = r({2, 6}), c1 = r({3, 6});
  cases.push_back({"concat", [=] { return Probe(Concat({c0, c1}, 0), 5); }, {c0, c1}});
  Tensor xs = r({5, 7});
  cases.push_back({"slice", [=] { return Probe(Slice(xs, 1, 2, 4), 6); }, {xs}});
  cases.push_back({"split", [=] {
                     const std::size_t sizes[2] = {2, 3};
                     const std::vector<Tensor> parts = Split(xs, sizes, 0);
                     return Add(Probe(parts[0], 7), Probe(parts[1], 8));
                   },
                   {xs}});
  Tensor logits = r({6, 5}, -3, 3);
  cases.push_back({"cross_entropy", [=] {
                     const std::vector<int> labels{0, 5, 2, 2, 1};
                     return CrossEntropy(logits, labels);
                   },
                   {logits}});
  cases.push_back({"reshape", [=] { return Probe(Reshape(xs, {35}), 9); }, {xs}});
  cases.push_back({"gather", [=] {
                     const std::vector<std::size_t> cols{3, 0, 0, 6, 2};
                     return Probe(GatherColumns(xs, cols), 10);
                   },
                   {xs}});
  Tensor xi = r({8, 3});
  cases.push_back({"interleave", [=] { return Probe(InterleaveGroups(xi, 4), 11); }, {xi}});
  Tensor xd = r({2, 12});
  cases.push_back({"deinterleave", [=] { return Probe(DeinterleaveGroups(xd, 4), 12); }, {xd}});
  Tensor ea = r({3, 4}), eb = r({3, 4});
  cases.push_back({"add", [=] { return Probe(Add(ea, eb), 13); }, {ea, eb}});
  cases.push_back({"sub", [=] { return Probe(Sub(ea, eb), 14); }, {ea, eb}});
  cases.push_back({"mul", [=] { return Probe(Mul(ea, eb), 15); }, {ea, eb}});
  cases.push_back({"scale", [=] { return Probe(Scale(ea, Real(-2.5)), 16); }, {ea}});
  Tensor pos = r({3, 4}, 0.2, 3.0);
  cases.push_back({"log", [=] { return Probe(Log(pos), 17); }, {pos}});
  cases.push_back({"sum", [=] { return Sum(ea); }, {ea}});
  cases.push_back({"mean", [=] { return Mean(ea); }, {ea}});

  Tensor pa = r({3, 20}), pb = r({3, 15});
  cases.push_back({"chamfer", [=] { return ChamferDistance(pa, pb); }, {pa, pb}});
  Tensor qa = r({3, 24}), qb = r({3, 24});
  cases.push_back({"batched_chamfer", [=] { return BatchedChamferDistance(qa, qb, 3); }, {qa, qb}});

  Tensor xn = r({4, 6});
  cases.push_back({"uniform_noise", [=] {
                     Rng noise(18);
                     return Probe(AddUniformNoise(xn, noise), 19);
                   },
                   {xn}});

  auto params = std::make_shared<ParameterSet>();
  const int filters[3] = {3, 3, 3};
  auto em = std::make_shared<FactorizedEntropyModel>(*params, "em", 4, filters, rng);
  // Medians start on the kink of |logit|; move them off it.
  for (Real& v : em->Parameters().back().mutable_values()) v += Real(0.25);
  Tensor y = r({4, 9}, -4, 4);
  std::vector<Tensor> rate_inputs = em->Parameters();
  rate_inputs.push_back(y);
  cases.push_back({"rate_bits", [=] { return em->RateBits(y); }, rate_inputs});
  // The median loss reaches the medians only.
  cases.push_back({"median_loss", [=] { return em->MedianLoss(); }, {em->Parameters().back()}});
  return cases;
}

}  // namespace

Verdict GradientCorrectness() {
  double worst = 0.0;
  std::string worst_name;
  std::size_t checked = 0, ops = 0;
  for (OpCase& c : OpCases()) {
    const testing::GradCheckReport rep = CheckGradients(c.loss, c.inputs);
    checked += rep.checked;
    ++ops;
    if (rep.max_error > worst) {
      worst = rep.max_error;
      worst_name = c.name + " (" + rep.worst + ")";
    }
  }
  const testing::GraphCheck g = testing::CheckTrainingGraph(testing::Miniature(), 14, 3);
  const double graph = std::max(g.network.max_error, g.medians.max_error);
  char buf[320];
  std::snprintf(buf, sizeof(buf),
                "%zu ops, %zu entries, worst op error %.2e; miniature graph %zu entries, worst "
                "%.2e, tape vs frozen-base oracle %.1e (tolerance %.0e)",
                ops, checked, worst, g.network.checked + g.medians.checked, graph,
                g.tape_mismatch, kGradTolerance);
  std::string detail = buf;
  if (worst >= kGradTolerance) detail += "; worst op " + worst_name;
  if (graph >= kGradTolerance) detail += "; worst graph entry " + g.worst_name + " " + g.network.worst;
  const bool pass = worst < kGradTolerance && graph < kGradTolerance &&
                    g.tape_mismatch < kTapeTolerance && g.value_mismatch < kTapeTolerance;
  return {pass, detail};
}

Verdict GeometryOracles() {
  Rng rng(2024);
  std::size_t fps_bad = 0, ball_bad = 0;
  double chamfer_err = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t p = 2 + rng.Index(127);
    const Tensor x = RandomTensor({3, p}, rng, -1, 1, false);
    const std::size_t n = 1 + rng.Index(p);
    const std::vector<std::size_t> picks = FarthestPointSample(x, n);
    if (picks != testing::GreedyFpsOracle(x, n)) ++fps_bad;

    const std::size_t groups = std::min<std::size_t>(n, 32);
    const std::vector<std::size_t> centroid_idx(picks.begin(), picks.begin() + groups);
    const double radius = rng.Uniform(0.05, 0.8);
    const std::size_t s = 1 + rng.Index(16);
    const GroupIndex gi = BallQuery(x, centroid_idx, radius, s);
    std::vector<Real> cv(3 * groups);
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t c = 0; c < groups; ++c) cv[a * groups + c] = x.values()[a * p + centroid_idx[c]];
    const Tensor centers({3, groups}, cv);
    bool ok = true;
    for (std::size_t c = 0; c < groups && ok; ++c) {
      const testing::OracleGroup o = testing::BallOracle(x, centers, c, radius, s);
      for (std::size_t k = 0; k < s; ++k) {
        if (gi.member(c, k) != o.members[k] || gi.is_padded(c, k) != o.padded[k]) ok = false;
      }
    }
    if (!ok) ++ball_bad;

    const Tensor y = RandomTensor({3, 1 + rng.Index(128)}, rng, -1, 1, false);
    const double oracle = testing::ChamferOracle(x, y);
    chamfer_err = std::max({chamfer_err, std::abs(ChamferValue(x, y) - oracle),
                            std::abs(ChamferDistance(x, y).item() - oracle)});
  }
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "500 clouds: FPS mismatches %zu, ball-query mismatches %zu, max Chamfer error "
                "%.2e (tolerance %.0e)",
                fps_bad, ball_bad, chamfer_err, kChamferTolerance);
  return {fps_bad == 0 && ball_bad == 0 && chamfer_err <= kChamferTolerance, buf};
}

Verdict DetachContract() {
  const CodecConfig config = CodecConfig::Lite(6);
  double max_chamfer_grad = 0.0, min_ce_norm = 1e300;
  for (std::uint64_t trial = 0; trial < 3; ++trial) {
    ScalableCodecModel model(config, 300 + trial);
    const Batch batch = testing::RandomBatch(4, 1024, 400 + trial, config.classes);
    Rng noise(500 + trial);
    const TrainOutputs out = model.ForwardTrain(batch, noise);
    out.chamfer.Backward();
    for (Real v : out.base_latent.grad()) max_chamfer_grad = std::max(max_chamfer_grad, std::abs(double(v)));
    out.cross_entropy.Backward();
    double norm = 0.0;
    for (Real v : out.base_latent.grad()) norm += double(v) * double(v);
    min_ce_norm = std::min(min_ce_norm, std::sqrt(norm));
  }
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "3 random batches: max |dChamfer/dbase| %.2e (limit %.0e), min |dCE/dbase| %.3e",
                max_chamfer_grad, kDetachTolerance, min_ce_norm);
  return {max_chamfer_grad < kDetachTolerance && min_ce_norm > 0.0, buf};
}

}  // namespace spcc::acceptance
