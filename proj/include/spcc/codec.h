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

#ifndef SPCC_CODEC_H_
#define SPCC_CODEC_H_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "spcc/bitstream.h"
#include "spcc/model.h"
#include "spcc/range_coder.h"

SPCC_NAMESPACE_BEGIN

// Model estimate of each segment's size, sum of -log2 p over its symbols
// under the coding tables.
struct RateEstimate {
  double base_bits = 0.0;
  double enhancement_bits = 0.0;
  std::array<double, 3> side_bits{};
  double total_bits() const {
    return base_bits + enhancement_bits + side_bits[0] + side_bits[1] + side_bits[2];
  }
};

struct Classification {
  int label = 0;
  std::vector<double> logits;
};

// Real encode/decode paths over a trained model. Coding tables are built
// once at construction; the model must outlive the codec and stay unchanged.
class Codec {
 public:
  explicit Codec(const ScalableCodecModel& model);

  const ScalableCodecModel& model() const { return *model_; }
  // Digest of the canonical config, coding tables, medians, weights and
  // batch-norm statistics. Embedded in
  // every file and checked on read.
  std::uint64_t digest() const { return digest_; }

  // Every stream the model produces for one cloud (rounding quantization).
  StreamSet Encode(const PointCloud& cloud, RateEstimate* estimate = nullptr) const;
  std::vector<std::uint8_t> Compress(const PointCloud& cloud, bool include_enhancement) const;

  // Base latent decoded from the base segment alone (M1 x 1).
  Tensor DecodeBase(const ParsedBitstream& stream) const;

  ParsedBitstream Read(std::span<const std::uint8_t> bytes) const;
  Classification Classify(std::span<const std::uint8_t> bytes) const;
  Classification Classify(const ParsedBitstream& stream) const;
  // Raises IncompleteBitstreamError when a required segment is absent or
  // truncated and CorruptionError when one fails its checksum.
  Tensor Decompress(std::span<const std::uint8_t> bytes) const;
  Tensor Decompress(const ParsedBitstream& stream) const;

  const std::vector<CdfTable>& base_tables() const { return base_tables_; }
  const std::vector<CdfTable>& enhancement_tables() const { return enhancement_tables_; }
  const std::vector<CdfTable>& side_tables(int level) const { return side_tables_.at(level); }

 private:
  Tensor DecodeSegment(const ParsedBitstream& stream, SegmentKind kind,
                       const std::vector<CdfTable>& tables, std::span<const double> medians,
                       std::size_t columns) const;

  const ScalableCodecModel* model_;
  std::vector<CdfTable> base_tables_;
  std::vector<CdfTable> enhancement_tables_;
  std::array<std::vector<CdfTable>, 3> side_tables_;
  std::vector<double> base_medians_;
  std::vector<double> enhancement_medians_;
  std::array<std::vector<double>, 3> side_medians_;
  std::uint64_t digest_ = 0;
};

SPCC_NAMESPACE_END

#endif  // SPCC_CODEC_H_
