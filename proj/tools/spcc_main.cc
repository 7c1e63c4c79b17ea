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

// spcc: train, code and evaluate scalable point-cloud codecs.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "spcc/archive.h"
#include "spcc/checkpoint.h"
#include "spcc/codec.h"
#include "spcc/dataio.h"
#include "spcc/errors.h"
#include "spcc/train.h"

namespace fs = std::filesystem;
using spcc::Dataset;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadArgs = 2;
constexpr int kExitFormat = 3;
constexpr int kExitCorrupt = 4;
constexpr int kExitIncomplete = 5;
constexpr int kExitOther = 1;

std::string Hex(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void WriteManifest(const fs::path& path, nlohmann::ordered_json manifest) {
  const std::string text = manifest.dump(2) + "\n";
  spcc::WriteFileBytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                       text.size()));
}

fs::path ManifestFor(const fs::path& output) {
  return fs::path(output.string() + ".manifest.json");
}

std::size_t ThreadCount(std::size_t requested) {
  if (const char* env = std::getenv("SPCC_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return requested > 0 ? requested : 1;
}

struct DatasetArgs {
  std::string source = "synthetic";
  std::uint64_t seed = 0;
  std::size_t train_per_class = 200;
  std::size_t test_per_class = 50;
  std::size_t points = spcc::kDefaultPoints;
  double jitter = 0.02;
};

void AddDatasetFlags(CLI::App* cmd, DatasetArgs& d) {
  cmd->add_option("--dataset", d.source,
                  "'synthetic', an OFF corpus directory, or a dataset archive")
      ->capture_default_str();
  cmd->add_option("--data-seed", d.seed, "Seed for synthetic generation and mesh sampling")
      ->capture_default_str();
  cmd->add_option("--train-per-class", d.train_per_class, "Synthetic training items per class")
      ->capture_default_str();
  cmd->add_option("--test-per-class", d.test_per_class, "Synthetic test items per class")
      ->capture_default_str();
  cmd->add_option("--jitter", d.jitter, "Synthetic jitter sigma")->capture_default_str();
}

Dataset LoadSplit(const DatasetArgs& d, const std::string& split) {
  if (d.source == "synthetic") {
    spcc::SyntheticOptions o;
    o.seed = d.seed;
    o.train_per_class = d.train_per_class;
    o.test_per_class = d.test_per_class;
    o.points = d.points;
    o.jitter = d.jitter;
    return spcc::SyntheticShapes(o, split);
  }
  const fs::path path(d.source);
  if (fs::is_directory(path)) return spcc::LoadOffCorpus(path, split, d.points, d.seed);
  return spcc::LoadDataset(path);
}

// ---- train ----

struct TrainArgs {
  std::string preset = "lite";
  std::string config_path;
  DatasetArgs data;
  std::string test_dataset;
  spcc::TrainPlan plan;
  std::string out = "run";
  int eval_every = 0;
  std::size_t threads = 1;
};

int RunTrain(const TrainArgs& a) {
  const fs::path out(a.out);
  fs::create_directories(out);
  Dataset train = LoadSplit(a.data, "train");
  std::optional<Dataset> test;
  if (!a.test_dataset.empty()) {
    DatasetArgs t = a.data;
    t.source = a.test_dataset;
    test = LoadSplit(t, "test");
  } else if (a.data.source == "synthetic" || fs::is_directory(a.data.source)) {
    test = LoadSplit(a.data, "test");
  }
  for (const std::string& w : train.warnings) std::cerr << "warning: " << w << "\n";

  spcc::CodecConfig config = a.config_path.empty()
                                 ? spcc::CodecConfig::Preset(a.preset, static_cast<int>(train.classes()))
                                 : spcc::CodecConfig::Load(a.config_path);
  if (config.classes != static_cast<int>(train.classes())) {
    throw spcc::ArgumentError("config has " + std::to_string(config.classes) +
                              " classes but the dataset has " + std::to_string(train.classes()));
  }
  spcc::ScalableCodecModel model(config, a.plan.seed);
  spcc::TrainPlan plan = a.plan;
  plan.dump_path = out / "nonfinite_batch.spck";
  spcc::Trainer trainer(model, plan, train.size());
  const fs::path metrics = out / "metrics.jsonl";
  fs::remove(metrics);
  spcc::CheckpointMeta meta{plan.seed, plan.lambda_x, plan.lambda_t, 0, train.class_names,
                            train.provenance};
  for (int e = 1; e <= plan.epochs; ++e) {
    const spcc::EpochMetrics m = trainer.TrainEpoch(train);
    spcc::AppendMetricsRecord(metrics, e, "train", m.base_bpp, m.rate_bpp, m.accuracy, m.chamfer,
                              plan.lambda_x, plan.lambda_t, plan.seed, m.loss);
    std::printf("epoch %d  loss %.4f  bpp %.3f  chamfer %.5f  ce %.4f  acc %.3f\n", e, m.loss,
                m.rate_bpp, m.chamfer, m.cross_entropy, m.accuracy);
    std::fflush(stdout);
    const bool last = e == plan.epochs;
    if (test && (last || (a.eval_every > 0 && e % a.eval_every == 0))) {
      const spcc::EvalMetrics ev = spcc::Evaluate(model, *test, ThreadCount(a.threads));
      spcc::AppendMetricsRecord(metrics, e, "test", ev.bpp_base, ev.bpp_total, ev.accuracy,
                                ev.chamfer, plan.lambda_x, plan.lambda_t, plan.seed);
      std::printf("  test  acc %.3f  bpp_base %.3f  bpp_total %.3f  chamfer %.5f\n", ev.accuracy,
                  ev.bpp_base, ev.bpp_total, ev.chamfer);
    }
  }
  meta.epochs = plan.epochs;
  const fs::path checkpoint = out / "model.spck";
  spcc::SaveCheckpoint(checkpoint, model, meta);

  nlohmann::ordered_json manifest;
  manifest["command"] = "train";
  manifest["config_hash"] = Hex(config.Hash());
  manifest["model_digest"] = Hex(spcc::Codec(model).digest());
  manifest["checkpoint"] = checkpoint.string();
  manifest["dataset"] = train.provenance;
  manifest["seed"] = plan.seed;
  manifest["lambda_x"] = plan.lambda_x;
  manifest["lambda_t"] = plan.lambda_t;
  manifest["epochs"] = plan.epochs;
  manifest["batch_size"] = plan.batch_size;
  manifest["outputs"] = {checkpoint.string(), metrics.string()};
  WriteManifest(out / "manifest.json", manifest);
  std::printf("checkpoint %s\n", checkpoint.string().c_str());
  return kExitOk;
}

// ---- compress / classify / decompress ----

int RunCompress(const std::string& checkpoint, const std::string& input, bool base_only,
                const std::string& output, std::uint64_t seed) {
  const spcc::LoadedCheckpoint ck = spcc::LoadCheckpoint(checkpoint);
  const spcc::Codec codec(*ck.model);
  const spcc::PointCloud cloud = spcc::PrepareCloud(
      spcc::ReadPointFile(input, seed),
      static_cast<std::size_t>(ck.model->config().input_points()), seed);
  const std::vector<std::uint8_t> bytes = codec.Compress(cloud, !base_only);
  spcc::WriteFileBytes(output, bytes);
  const spcc::ParsedBitstream parsed = spcc::ReadBitstream(bytes);
  const double points = ck.model->config().input_points();
  std::printf("bpp_base %.6f\n", parsed.PayloadBits(spcc::SegmentKind::kBase) / points);
  if (!base_only) std::printf("bpp_total %.6f\n", parsed.TotalPayloadBits() / points);

  nlohmann::ordered_json manifest;
  manifest["command"] = base_only ? "compress --base-only" : "compress";
  manifest["config_hash"] = Hex(ck.model->config().Hash());
  manifest["model_digest"] = Hex(codec.digest());
  manifest["checkpoint"] = checkpoint;
  manifest["dataset"] = input;
  manifest["seed"] = seed;
  manifest["outputs"] = {output};
  WriteManifest(ManifestFor(output), manifest);
  return kExitOk;
}

int RunClassify(const std::string& checkpoint, const std::string& input) {
  const spcc::LoadedCheckpoint ck = spcc::LoadCheckpoint(checkpoint);
  const spcc::Codec codec(*ck.model);
  const std::vector<std::uint8_t> bytes = spcc::ReadFileBytes(input);
  const spcc::Classification c = codec.Classify(bytes);
  const auto& names = ck.meta.class_names;
  const std::string name = c.label < static_cast<int>(names.size()) ? names[c.label]
                                                                    : std::to_string(c.label);
  std::printf("class %d %s\n", c.label, name.c_str());
  std::printf("logits");
  for (double v : c.logits) std::printf(" %.9g", v);
  std::printf("\n");
  return kExitOk;
}

int RunDecompress(const std::string& checkpoint, const std::string& input,
                  const std::string& output, const std::string& ply) {
  const spcc::LoadedCheckpoint ck = spcc::LoadCheckpoint(checkpoint);
  const spcc::Codec codec(*ck.model);
  const spcc::Tensor points = codec.Decompress(spcc::ReadFileBytes(input));
  spcc::WriteXyz(output, points);
  std::vector<std::string> outputs{output};
  if (!ply.empty()) {
    spcc::WritePly(ply, points);
    outputs.push_back(ply);
  }
  nlohmann::ordered_json manifest;
  manifest["command"] = "decompress";
  manifest["config_hash"] = Hex(ck.model->config().Hash());
  manifest["model_digest"] = Hex(codec.digest());
  manifest["checkpoint"] = checkpoint;
  manifest["dataset"] = input;
  manifest["seed"] = ck.meta.seed;
  manifest["outputs"] = outputs;
  WriteManifest(ManifestFor(output), manifest);
  return kExitOk;
}

// ---- eval ----

int RunEval(const std::vector<std::string>& checkpoints, const DatasetArgs& data,
            const std::string& output, std::size_t threads) {
  const Dataset test = LoadSplit(data, "test");
  std::ostringstream csv;
  csv << "checkpoint,lambda_x,lambda_t,bpp_base,bpp_total,accuracy,chamfer\n";
  for (const std::string& path : checkpoints) {
    const spcc::LoadedCheckpoint ck = spcc::LoadCheckpoint(path);
    const spcc::EvalMetrics m = spcc::Evaluate(*ck.model, test, ThreadCount(threads));
    char row[512];
    std::snprintf(row, sizeof(row), "%s,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", path.c_str(),
                  ck.meta.lambda_x, ck.meta.lambda_t, m.bpp_base, m.bpp_total, m.accuracy,
                  m.chamfer);
    csv << row;
    std::fputs(row, stdout);
    std::fflush(stdout);
  }
  const std::string text = csv.str();
  spcc::WriteFileBytes(output, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                         text.size()));
  nlohmann::ordered_json manifest;
  manifest["command"] = "eval";
  manifest["checkpoints"] = checkpoints;
  manifest["dataset"] = test.provenance;
  manifest["seed"] = data.seed;
  manifest["outputs"] = {output};
  WriteManifest(ManifestFor(output), manifest);
  return kExitOk;
}

// ---- dataset ----

int RunDataset(const DatasetArgs& data, const std::string& split, const std::string& output) {
  const Dataset d = LoadSplit(data, split);
  for (const std::string& w : d.warnings) std::cerr << "warning: " << w << "\n";
  spcc::SaveDataset(output, d);
  std::printf("%zu items, %zu classes\n", d.size(), d.classes());
  nlohmann::ordered_json manifest;
  manifest["command"] = "dataset";
  manifest["dataset"] = d.provenance;
  manifest["seed"] = data.seed;
  manifest["outputs"] = {output};
  WriteManifest(ManifestFor(output), manifest);
  return kExitOk;
}

int Fail(int code, const std::string& kind, const std::string& what) {
  std::fprintf(stderr, "spcc: %s: %s\n", kind.c_str(), what.c_str());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scalable point-cloud codec: train, compress, classify, decompress, evaluate"};
  app.require_subcommand(1);

  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a codec");
  train_cmd->add_option("--preset", train.preset, "full or lite")
      ->check(CLI::IsMember({"full", "lite"}))
      ->capture_default_str();
  train_cmd->add_option("--config", train.config_path, "Config file overriding the preset");
  AddDatasetFlags(train_cmd, train.data);
  train_cmd->add_option("--test-dataset", train.test_dataset, "Held-out dataset archive");
  train_cmd->add_option("--lambda-x", train.plan.lambda_x, "Distortion weight")
      ->capture_default_str();
  train_cmd->add_option("--lambda-t", train.plan.lambda_t, "Task weight")->capture_default_str();
  train_cmd->add_option("--epochs", train.plan.epochs, "Training epochs")->capture_default_str();
  train_cmd->add_option("--batch-size", train.plan.batch_size, "Minibatch size")
      ->capture_default_str();
  train_cmd->add_option("--lr", train.plan.learning_rate, "Peak learning rate")
      ->capture_default_str();
  train_cmd->add_option("--seed", train.plan.seed, "Initialization and training seed")
      ->capture_default_str();
  train_cmd->add_flag("!--no-augment", train.plan.augment, "Disable training augmentation");
  train_cmd->add_option("--eval-every", train.eval_every, "Evaluate every N epochs (0: last only)");
  train_cmd->add_option("--threads", train.threads, "Evaluation threads (SPCC_THREADS overrides)");
  train_cmd->add_option("--out", train.out, "Output directory")->capture_default_str();

  std::string checkpoint, input, output, ply;
  bool base_only = false;
  std::uint64_t seed = 0;
  CLI::App* compress_cmd = app.add_subcommand("compress", "Compress a point cloud to .spcc");
  compress_cmd->add_option("--checkpoint", checkpoint, "Model checkpoint")->required();
  compress_cmd->add_option("--input", input, "Point file (.xyz, .txt, .ply, .off)")->required();
  compress_cmd->add_flag("--base-only", base_only, "Write the base segment only");
  compress_cmd->add_option("--out", output, "Output .spcc file")->required();
  compress_cmd->add_option("--seed", seed, "Seed for resampling the input")->capture_default_str();

  CLI::App* classify_cmd = app.add_subcommand("classify", "Classify from the base segment");
  classify_cmd->add_option("--checkpoint", checkpoint, "Model checkpoint")->required();
  classify_cmd->add_option("--in", input, "Input .spcc file")->required();

  CLI::App* decompress_cmd = app.add_subcommand("decompress", "Reconstruct the point cloud");
  decompress_cmd->add_option("--checkpoint", checkpoint, "Model checkpoint")->required();
  decompress_cmd->add_option("--in", input, "Input .spcc file")->required();
  decompress_cmd->add_option("--out", output, "Output xyz text file")->required();
  decompress_cmd->add_option("--ply", ply, "Also write an ASCII PLY file");

  std::vector<std::string> checkpoints;
  DatasetArgs eval_data;
  std::size_t eval_threads = 1;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate checkpoints on the test split");
  eval_cmd->add_option("--checkpoint,--checkpoints", checkpoints, "Checkpoints")->required();
  AddDatasetFlags(eval_cmd, eval_data);
  eval_cmd->add_option("--out", output, "Output CSV")->required();
  eval_cmd->add_option("--threads", eval_threads, "Worker threads (SPCC_THREADS overrides)");

  DatasetArgs dataset_data;
  std::string split = "train";
  CLI::App* dataset_cmd = app.add_subcommand("dataset", "Build and cache a dataset archive");
  AddDatasetFlags(dataset_cmd, dataset_data);
  dataset_cmd->add_option("--split", split, "train or test")
      ->check(CLI::IsMember({"train", "test"}))
      ->capture_default_str();
  dataset_cmd->add_option("--out", output, "Output archive")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadArgs;
  }

  try {
    if (*train_cmd) return RunTrain(train);
    if (*compress_cmd) return RunCompress(checkpoint, input, base_only, output, seed);
    if (*classify_cmd) return RunClassify(checkpoint, input);
    if (*decompress_cmd) return RunDecompress(checkpoint, input, output, ply);
    if (*eval_cmd) return RunEval(checkpoints, eval_data, output, eval_threads);
    if (*dataset_cmd) return RunDataset(dataset_data, split, output);
  } catch (const spcc::ArgumentError& e) {
    return Fail(kExitBadArgs, "invalid argument", e.what());
  } catch (const spcc::IncompatibleModelError& e) {
    return Fail(kExitFormat, "incompatible model", e.what());
  } catch (const spcc::FormatError& e) {
    return Fail(kExitFormat, "unsupported format", e.what());
  } catch (const spcc::DatasetError& e) {
    return Fail(kExitFormat, "dataset error", e.what());
  } catch (const spcc::CorruptionError& e) {
    return Fail(kExitCorrupt, "corrupt segment '" + e.segment() + "'", e.what());
  } catch (const spcc::IncompleteBitstreamError& e) {
    return Fail(kExitIncomplete, "incomplete bitstream", e.what());
  } catch (const std::exception& e) {
    return Fail(kExitOther, "error", e.what());
  }
  return kExitBadArgs;
}
