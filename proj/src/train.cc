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

#include "spcc/train.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <thread>

#include <nlohmann/json.hpp>

#include "spcc/archive.h"
#include "spcc/codec.h"
#include "spcc/errors.h"
#include "spcc/ops.h"

SPCC_NAMESPACE_BEGIN

namespace {

double Value(const Tensor& t) { return t.defined() ? static_cast<double>(t.item()) : 0.0; }

std::size_t CountCorrect(const Tensor& logits, std::span<const int> labels) {
  const std::size_t k = logits.dim(0), b = logits.dim(1);
  std::size_t correct = 0;
  for (std::size_t col = 0; col < b; ++col) {
    std::size_t best = 0;
    for (std::size_t r = 1; r < k; ++r) {
      if (logits.values()[r * b + col] > logits.values()[best * b + col]) best = r;
    }
    if (static_cast<int>(best) == labels[col]) ++correct;
  }
  return correct;
}

void DumpBatch(const std::filesystem::path& path, const Batch& batch, const LossBreakdown& loss) {
  Archive a;
  a.PutString("meta/kind", "spcc-nonfinite-batch");
  const std::vector<double> coords(batch.coords.values().begin(), batch.coords.values().end());
  a.PutFloat64("batch/coords", {3, batch.coords.dim(1)}, coords);
  const std::vector<std::int64_t> labels(batch.labels.begin(), batch.labels.end());
  a.PutInt64("batch/labels", {labels.size()}, labels);
  const double parts[] = {loss.rate_bits, loss.chamfer, loss.cross_entropy, loss.total};
  a.PutFloat64("loss/rate_chamfer_ce_total", {4}, parts);
  a.Save(path);
}

}  // namespace

CompositeLossResult CompositeLoss(const TrainOutputs& outputs, std::size_t batch,
                                  std::size_t points, double lambda_x, double lambda_t) {
  if (batch == 0 || points == 0) throw ArgumentError("composite loss: empty batch");
  CompositeLossResult out;
  LossBreakdown& b = out.breakdown;
  Tensor rate = Add(outputs.base_bits, outputs.enhancement_bits);
  for (const Tensor& side : outputs.side_bits) {
    if (side.defined()) rate = Add(rate, side);
  }
  const Real per_point = static_cast<Real>(1.0 / (static_cast<double>(batch) * points));
  out.total = Add(Add(Scale(rate, per_point), Scale(outputs.chamfer, static_cast<Real>(lambda_x))),
                  Scale(outputs.cross_entropy, static_cast<Real>(lambda_t)));
  b.base_bits = Value(outputs.base_bits);
  b.enhancement_bits = Value(outputs.enhancement_bits);
  for (int i = 0; i < 3; ++i) b.side_bits[i] = Value(outputs.side_bits[i]);
  b.rate_bits = Value(rate);
  b.rate_bpp = b.rate_bits / (static_cast<double>(batch) * static_cast<double>(points));
  b.chamfer = Value(outputs.chamfer);
  b.cross_entropy = Value(outputs.cross_entropy);
  b.lambda_x = lambda_x;
  b.lambda_t = lambda_t;
  b.total = Value(out.total);
  return out;
}

Trainer::Trainer(ScalableCodecModel& model, TrainPlan plan, std::size_t train_size)
    : model_(model),
      plan_(std::move(plan)),
      network_params_(model.NetworkParameters()),
      entropy_params_(model.EntropyParameters()),
      optimizer_({network_params_, entropy_params_}) {
  if (plan_.batch_size < 2) throw ArgumentError("training needs a batch size of at least 2");
  if (plan_.epochs < 0) throw ArgumentError("epoch count must be non-negative");
  const std::size_t per_epoch = std::max<std::size_t>(1, train_size / plan_.batch_size +
                                                             (train_size % plan_.batch_size >= 2));
  total_steps_ = std::max<std::size_t>(1, per_epoch * static_cast<std::size_t>(plan_.epochs));
}

double Trainer::CurrentLearningRate() const {
  const double t = std::min(1.0, static_cast<double>(step_) / static_cast<double>(total_steps_));
  const double lo = std::min(plan_.min_learning_rate, plan_.learning_rate);
  return lo + (plan_.learning_rate - lo) * 0.5 * (1.0 + std::cos(std::numbers::pi * t));
}

LossBreakdown Trainer::Step(const Batch& batch, Rng& noise) {
  model_.params().ZeroGrad();
  const std::size_t points = static_cast<std::size_t>(model_.config().input_points());
  const TrainOutputs out = model_.ForwardTrain(batch, noise, /*training=*/true);
  const CompositeLossResult loss =
      CompositeLoss(out, batch.size, points, plan_.lambda_x, plan_.lambda_t);
  if (!std::isfinite(loss.breakdown.total)) {
    const std::filesystem::path dump =
        plan_.dump_path.value_or(std::filesystem::temp_directory_path() / "spcc_nonfinite_batch.spck");
    std::string where = dump.string();
    try {
      DumpBatch(dump, batch, loss.breakdown);
    } catch (const std::exception& e) {
      where = std::string("(dump failed: ") + e.what() + ")";
    }
    throw NumericalError("non-finite training loss at step " + std::to_string(step_) +
                         " (rate " + std::to_string(loss.breakdown.rate_bits) + ", chamfer " +
                         std::to_string(loss.breakdown.chamfer) + ", cross-entropy " +
                         std::to_string(loss.breakdown.cross_entropy) + "); batch written to " +
                         where);
  }
  Add(loss.total, model_.MedianLoss()).Backward();
  ClipGradNorm(network_params_, plan_.clip_norm);
  optimizer_.Step({CurrentLearningRate(), plan_.entropy_learning_rate});
  ++step_;
  last_correct_ = CountCorrect(out.logits, batch.labels);
  return loss.breakdown;
}

EpochMetrics Trainer::TrainEpoch(const Dataset& data) {
  if (data.items.empty()) throw DatasetError("training set is empty");
  ++epoch_;
  const auto e = static_cast<std::uint64_t>(epoch_);
  Rng order_rng = Rng::Derive(plan_.seed, 1000 + e);
  Rng noise = Rng::Derive(plan_.seed, 2000 + e);
  Rng augment = Rng::Derive(plan_.seed, 3000 + e);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[order_rng.Index(i)]);

  EpochMetrics m;
  m.epoch = epoch_;
  m.learning_rate = CurrentLearningRate();
  std::size_t correct = 0;
  for (std::size_t begin = 0; begin < order.size(); begin += plan_.batch_size) {
    const std::size_t end = std::min(order.size(), begin + plan_.batch_size);
    if (end - begin < 2) break;  // batch norm needs two samples
    std::vector<PointCloud> clouds;
    for (std::size_t i = begin; i < end; ++i) {
      const PointCloud& item = data.items[order[i]];
      clouds.push_back(plan_.augment ? Augment(item, augment) : item);
    }
    const Batch batch = MakeBatch(clouds);
    const LossBreakdown b = Step(batch, noise);
    const double w = static_cast<double>(batch.size);
    const double points = static_cast<double>(model_.config().input_points());
    m.loss += b.total * w;
    m.rate_bpp += b.rate_bpp * w;
    m.base_bpp += b.base_bits / points;
    m.chamfer += b.chamfer * w;
    m.cross_entropy += b.cross_entropy * w;
    correct += last_correct_;
    m.samples += batch.size;
    ++m.steps;
  }
  if (m.samples > 0) {
    const double n = static_cast<double>(m.samples);
    m.loss /= n;
    m.rate_bpp /= n;
    m.base_bpp /= n;
    m.chamfer /= n;
    m.cross_entropy /= n;
    m.accuracy = static_cast<double>(correct) / n;
  }
  return m;
}

EvalMetrics Evaluate(const ScalableCodecModel& model, const Dataset& data, std::size_t threads) {
  if (data.items.empty()) throw DatasetError("evaluation set is empty");
  const Codec codec(model);
  const double points = static_cast<double>(model.config().input_points());
  struct ItemResult {
    bool correct = false;
    bool base_correct = false;
    double chamfer = 0.0, bits_base = 0.0, bits_total = 0.0, est_base = 0.0, est_total = 0.0;
  };
  std::vector<ItemResult> results(data.size());
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < data.size(); i += stride) {
      const PointCloud& cloud = data.items[i];
      RateEstimate estimate;
      const StreamSet streams = codec.Encode(cloud, &estimate);
      const std::vector<std::uint8_t> full = WriteBitstream(streams, codec.digest(), true);
      const std::vector<std::uint8_t> base_only = WriteBitstream(streams, codec.digest(), false);
      const ParsedBitstream parsed = codec.Read(full);
      const int label = cloud.label.value_or(-1);
      ItemResult& r = results[i];
      r.correct = codec.Classify(parsed).label == label;
      r.base_correct = codec.Classify(base_only).label == label;
      const Tensor recon = codec.Decompress(parsed);
      r.chamfer = ChamferValue(cloud.coords, recon);
      r.bits_base = static_cast<double>(parsed.PayloadBits(SegmentKind::kBase));
      r.bits_total = static_cast<double>(parsed.TotalPayloadBits());
      r.est_base = estimate.base_bits;
      r.est_total = estimate.total_bits();
    }
  };
  threads = std::clamp<std::size_t>(threads, 1, data.size());
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  }
  EvalMetrics m;
  m.samples = data.size();
  for (const ItemResult& r : results) {
    m.accuracy += r.correct;
    m.base_only_accuracy += r.base_correct;
    m.chamfer += r.chamfer;
    m.bpp_base += r.bits_base / points;
    m.bpp_total += r.bits_total / points;
    m.estimated_bpp_base += r.est_base / points;
    m.estimated_bpp_total += r.est_total / points;
  }
  const double n = static_cast<double>(m.samples);
  for (double* v : {&m.accuracy, &m.base_only_accuracy, &m.chamfer, &m.bpp_base, &m.bpp_total,
                    &m.estimated_bpp_base, &m.estimated_bpp_total}) {
    *v /= n;
  }
  return m;
}

void AppendMetricsRecord(const std::filesystem::path& path, int epoch, const std::string& split,
                         double bpp_base, double bpp_total, double accuracy, double chamfer,
                         double lambda_x, double lambda_t, std::uint64_t seed,
                         std::optional<double> loss) {
  nlohmann::ordered_json j;
  j["epoch"] = epoch;
  j["split"] = split;
  j["bpp_base"] = bpp_base;
  j["bpp_total"] = bpp_total;
  j["accuracy"] = accuracy;
  j["chamfer"] = chamfer;
  j["lambda_x"] = lambda_x;
  j["lambda_t"] = lambda_t;
  j["seed"] = seed;
  if (loss) j["loss"] = *loss;
  std::ofstream out(path, std::ios::app);
  if (!out) throw ArgumentError("cannot append metrics to " + path.string());
  out << j.dump() << "\n";
}

SPCC_NAMESPACE_END
