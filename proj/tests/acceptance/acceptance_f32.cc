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


// Single-precision criteria: shapes, coding, scalability, training runs.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.h"
#include "acceptance.h"
#include "spcc/bitstream.h"
#include "spcc/checkpoint.h"
#include "spcc/codec.h"
#include "spcc/dataio.h"
#include "spcc/errors.h"
#include "spcc/model.h"
#include "spcc/range_coder.h"
#include "spcc/train.h"

namespace spcc::acceptance {
namespace {

namespace fs = std::filesystem;

// End-to-end targets.
constexpr double kMinAccuracy = 0.90;
constexpr double kMaxBaseBpp = 2.0;
constexpr double kMaxChamfer = 0.05;
constexpr double kMaxTotalBpp = 3.0;
constexpr double kLambdaX = 250.0;
constexpr int kEpochs = 30;

// Coding bound: Shannon <= bits <= Shannon * 1.02 + 256.
constexpr double kShannonSlope = 1.02;
constexpr double kShannonSlack = 256.0;

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Audits one preset; returns the number of mismatched trace entries.
std::size_t AuditPreset(const CodecConfig& config, std::string& note) {
  std::size_t bad = 0;
  for (int i = 1; i < kNumLevels; ++i) {
    const auto& l = config.levels;
    if (l[i - 1].points != l[i].points * l[i].group_size) {
      ++bad;
      note += Format(" P%d!=P%d*S%d", i - 1, i, i);
    }
  }
  const std::size_t b = 2;
  ScalableCodecModel model(config, 1);
  const Batch batch =
      testing::RandomBatch(b, static_cast<std::size_t>(config.input_points()), 2, config.classes);
  ShapeTrace trace;
  Rng noise(3);
  const TrainOutputs out = model.ForwardTrain(batch, noise, true, &trace);
  const auto expected = testing::ExpectedTrace(config, b);
  std::map<std::string, Shape> got(trace.begin(), trace.end());
  if (got.size() != trace.size() || got.size() != expected.size()) {
    ++bad;
    note += Format(" trace has %zu entries, expected %zu", trace.size(), expected.size());
  }
  for (const auto& [name, shape] : expected) {
    auto it = got.find(name);
    if (it == got.end() || it->second != shape) {
      ++bad;
      note += " " + name;
    }
  }
  if (out.reconstruction.shape() != Shape{3, b * static_cast<std::size_t>(config.input_points())}) {
    ++bad;
    note += " reconstruction";
  }
  return bad;
}

struct Run {
  int code = -1;
  std::string out;
};

Run Exec(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(SPCC_BINARY) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::ofstream out(log);
  char buf[4096];
  while (std::fgets(buf, sizeof(buf), pipe) != nullptr) {
    r.out += buf;
    out << buf << std::flush;
  }
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Q(const fs::path& p) { return "'" + p.string() + "'"; }

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream s(line);
  std::string cell;
  while (std::getline(s, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

Verdict ShapeAudit() {
  std::string note;
  const std::size_t bad = AuditPreset(CodecConfig::Full(40), note) +
                          AuditPreset(CodecConfig::Lite(6), note) +
                          AuditPreset(testing::Miniature(), note);
  return {bad == 0, Format("full, lite and miniature traces, %zu mismatches", bad) + note};
}

Verdict EntropyCoding() {
  Rng rng(77);
  std::size_t failures = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t channels = 1 + rng.Index(4);
    const int lo = -static_cast<int>(rng.Index(130));
    const int hi = lo + static_cast<int>(rng.Index(260));
    std::vector<CdfTable> tables;
    for (std::size_t c = 0; c < channels; ++c)
      tables.push_back(testing::RandomTable(rng, lo, hi, 1.0));
    const std::size_t per = rng.Index(40);
    const double escapes = trial % 3 == 0 ? 0.1 : 0.0;
    std::vector<std::int32_t> symbols;
    for (const CdfTable& t : tables)
      for (std::size_t j = 0; j < per; ++j) symbols.push_back(testing::DrawSymbol(t, rng, escapes));
    if (RangeDecode(RangeEncode(symbols, tables), symbols.size(), tables) != symbols) ++failures;
  }

  // Length bound on random tables and on tables built from an entropy model.
  ScalableCodecModel model(CodecConfig::Lite(6), 8);
  const Codec codec(model);
  std::vector<std::vector<CdfTable>> table_sets;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<CdfTable> tables;
    for (int c = 0; c < 8; ++c) tables.push_back(testing::RandomTable(rng, -127, 127, 1.0));
    table_sets.push_back(std::move(tables));
  }
  table_sets.push_back(codec.base_tables());
  table_sets.push_back(codec.enhancement_tables());
  double worst_excess = -1e300, min_gap = 1e300;
  std::size_t out_of_bound = 0;
  for (const auto& tables : table_sets) {
    const std::size_t per = std::max<std::size_t>(512, 4096 / tables.size() + 1);
    std::vector<std::int32_t> symbols;
    for (const CdfTable& t : tables)
      for (std::size_t j = 0; j < per; ++j) symbols.push_back(testing::DrawSymbol(t, rng, 0.001));
    const double shannon = ShannonBits(symbols, tables);
    const double bits = 8.0 * static_cast<double>(RangeEncode(symbols, tables).size());
    const double upper = shannon * kShannonSlope + kShannonSlack;
    if (bits < shannon || bits > upper) ++out_of_bound;
    worst_excess = std::max(worst_excess, bits - upper);
    min_gap = std::min(min_gap, bits - shannon);
  }
  return {failures == 0 && out_of_bound == 0,
          Format("10000 round trips, %zu mismatches; %zu batches of >= 4096 symbols, %zu outside "
                 "bound (min bits-Shannon %.1f, max bits-upper %.1f)",
                 failures, table_sets.size(), out_of_bound, min_gap, worst_excess)};
}

Verdict Scalability() {
  ScalableCodecModel model(CodecConfig::Lite(6), 21);
  const Codec codec(model);
  SyntheticOptions o;
  o.seed = 5;
  o.test_per_class = 17;
  const Dataset data = SyntheticShapes(o, "test");
  std::size_t base_diff = 0, class_diff = 0, n = 0;
  for (const PointCloud& cloud : data.items) {
    if (n == 100) break;
    ++n;
    const std::vector<std::uint8_t> full = codec.Compress(cloud, true);
    const std::vector<std::uint8_t> base = codec.Compress(cloud, false);
    const ParsedBitstream pf = codec.Read(full), pb = codec.Read(base);
    const auto a = pf.Payload(SegmentKind::kBase), b = pb.Payload(SegmentKind::kBase);
    if (!std::equal(a.begin(), a.end(), b.begin(), b.end())) ++base_diff;
    const std::vector<std::uint8_t> prefix(full.begin(), full.begin() + (full.size() * 2) / 3);
    const Classification cf = codec.Classify(full), cb = codec.Classify(base);
    bool same = cf.label == cb.label && cf.logits == cb.logits;
    try {
      const Classification ct = codec.Classify(prefix);
      same = same && ct.label == cf.label && ct.logits == cf.logits;
    } catch (const Error&) {
      // The prefix cut into the base segment; base-only files cover this.
    }
    if (!same) ++class_diff;
  }
  return {base_diff == 0 && class_diff == 0 && n == 100,
          Format("%zu samples: base segment differences %zu, classification differences %zu",
                 n, base_diff, class_diff)};
}

Verdict EndToEnd(const fs::path& work) {
  const auto start = std::chrono::steady_clock::now();
  SyntheticOptions o;  // 6 classes, 200/50 per class
  const Dataset train = SyntheticShapes(o, "train");
  const Dataset test = SyntheticShapes(o, "test");
  const CodecConfig config = CodecConfig::Lite(static_cast<int>(train.classes()));
  ScalableCodecModel model(config, 0);
  TrainPlan plan;
  plan.lambda_x = kLambdaX;
  plan.lambda_t = 0.25;
  plan.epochs = kEpochs;
  plan.seed = 0;
  plan.dump_path = work / "e2e_nonfinite.spck";
  Trainer trainer(model, plan, train.size());
  for (int e = 1; e <= plan.epochs; ++e) {
    const EpochMetrics m = trainer.TrainEpoch(train);
    std::fprintf(stderr, "  [e2e] epoch %d loss %.4f acc %.3f\n", e, m.loss, m.accuracy);
  }
  SaveCheckpoint(work / "e2e.spck", model,
                 CheckpointMeta{plan.seed, plan.lambda_x, plan.lambda_t, plan.epochs,
                                train.class_names, train.provenance});
  const EvalMetrics ev = Evaluate(model, test);
  const bool pass = ev.accuracy >= kMinAccuracy && ev.bpp_base <= kMaxBaseBpp &&
                    ev.chamfer <= kMaxChamfer && ev.bpp_total <= kMaxTotalBpp;
  return {pass, Format("%zu/%zu split, %d epochs: accuracy %.4f (>= %.2f), bpp_base %.4f (<= %.1f), "
                       "Chamfer %.5f (<= %.2f) at bpp_total %.4f (<= %.1f), %.0f s",
                       train.size(), test.size(), kEpochs, ev.accuracy, kMinAccuracy, ev.bpp_base,
                       kMaxBaseBpp, ev.chamfer, kMaxChamfer, ev.bpp_total, kMaxTotalBpp,
                       Seconds(start))};
}

Verdict SweepShape(const fs::path& work) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<std::string> lambdas{"0.0078125", "0.0625", "0.5"};
  std::string checkpoints;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    const fs::path dir = work / ("sweep_" + std::to_string(k));
    const Run r = Exec("train --preset lite --lambda-x 250 --lambda-t " + lambdas[k] +
                           " --epochs " + std::to_string(kEpochs) + " --seed 0 --out " + Q(dir),
                       work / ("sweep_" + std::to_string(k) + ".log"));
    if (r.code != 0) return {false, "training at lambda_t " + lambdas[k] + " failed:\n" + r.out};
    checkpoints += " " + Q(dir / "model.spck");
  }
  const fs::path csv = work / "sweep.csv";
  const Run r = Exec("eval --checkpoints" + checkpoints + " --out " + Q(csv), work / "eval.log");
  if (r.code != 0) return {false, "eval failed:\n" + r.out};

  struct Point {
    double lambda_t, bpp_base, accuracy;
  };
  std::vector<Point> points;
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    const auto cells = SplitCsv(line);
    if (cells.size() != 7) return {false, "malformed eval row: " + line};
    points.push_back({std::stod(cells[2]), std::stod(cells[3]), std::stod(cells[5])});
  }
  if (points.size() != lambdas.size()) return {false, "eval wrote the wrong number of rows"};
  std::sort(points.begin(), points.end(),
            [](const Point& a, const Point& b) { return a.bpp_base < b.bpp_base; });
  bool monotone = true;
  for (std::size_t k = 1; k < points.size(); ++k)
    monotone = monotone && points[k].accuracy >= points[k - 1].accuracy;
  std::string detail = "points (lambda_t, bpp_base, accuracy):";
  for (const Point& p : points)
    detail += Format(" (%.4g, %.4f, %.4f)", p.lambda_t, p.bpp_base, p.accuracy);
  detail += Format("; accuracy %s in bpp_base, %.0f s", monotone ? "nondecreasing" : "decreases",
                   Seconds(start));
  return {monotone, detail};
}

}  // namespace spcc::acceptance
