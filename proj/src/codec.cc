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

#include "spcc/codec.h"

#include <algorithm>
#include <bit>
#include <string>

#include "spcc/errors.h"
#include "spcc/hash.h"
#include "spcc/ops.h"

SPCC_NAMESPACE_BEGIN

namespace {

std::size_t U(int v) { return static_cast<std::size_t>(v); }

std::vector<std::uint8_t> EncodeLatent(const Tensor& y, const std::vector<CdfTable>& tables,
                                       std::span<const double> medians, double* estimate) {
  const std::vector<std::int32_t> symbols = ToSymbols(y, medians);
  if (estimate) *estimate = ShannonBits(symbols, tables);
  return RangeEncode(symbols, tables);
}

}  // namespace

Codec::Codec(const ScalableCodecModel& model) : model_(&model) {
  const CodecConfig& cfg = model.config();
  const FactorizedEntropyModel& top = model.top_entropy();
  const std::size_t m1 = U(cfg.base_latent), m2 = U(cfg.enhancement_latent);
  base_tables_ = top.BuildTables(0, m1, cfg.min_symbol, cfg.max_symbol);
  enhancement_tables_ = top.BuildTables(m1, m2, cfg.min_symbol, cfg.max_symbol);
  const std::vector<double> medians = top.Medians();
  base_medians_.assign(medians.begin(), medians.begin() + static_cast<std::ptrdiff_t>(m1));
  enhancement_medians_.assign(medians.begin() + static_cast<std::ptrdiff_t>(m1), medians.end());
  for (int i = 0; i < kTopLevel; ++i) {
    if (!cfg.side_enabled(i)) continue;
    const FactorizedEntropyModel& side = model.side_entropy(i);
    side_tables_[i] = side.BuildTables(0, side.channels(), cfg.min_symbol, cfg.max_symbol);
    side_medians_[i] = side.Medians();
  }

  std::uint64_t h = Fnv1a64(cfg.Canonical());
  auto mix_tables = [&h](const std::vector<CdfTable>& tables) {
    for (const CdfTable& t : tables) h = Fnv1a64(t.Digest(), h);
  };
  auto mix_medians = [&h](const std::vector<double>& values) {
    for (double v : values) h = Fnv1a64(std::bit_cast<std::uint64_t>(v), h);
  };
  mix_tables(base_tables_);
  mix_tables(enhancement_tables_);
  mix_medians(base_medians_);
  mix_medians(enhancement_medians_);
  for (int i = 0; i < kTopLevel; ++i) {
    mix_tables(side_tables_[i]);
    mix_medians(side_medians_[i]);
  }
  // Weights and batch-norm statistics, so a retrained model never decodes a
  // file it did not write.
  for (const auto* list : {&model.params().parameters(), &model.params().buffers()}) {
    for (const NamedTensor& p : *list) {
      const auto v = p.tensor.values();
      h = Fnv1a64(std::span(reinterpret_cast<const std::uint8_t*>(v.data()), v.size_bytes()), h);
    }
  }
  digest_ = h;
}

StreamSet Codec::Encode(const PointCloud& cloud, RateEstimate* estimate) const {
  NoGradGuard no_grad;
  const PointCloud one[] = {cloud};
  const Analysis a = model_->Analyze(MakeBatch(one), /*training=*/false);
  const std::size_t sizes[2] = {base_tables_.size(), enhancement_tables_.size()};
  const std::vector<Tensor> parts = Split(a.top, sizes, 0);
  StreamSet streams;
  RateEstimate local;
  streams.base = EncodeLatent(parts[0], base_tables_, base_medians_, &local.base_bits);
  streams.enhancement = EncodeLatent(parts[1], enhancement_tables_, enhancement_medians_,
                                     &local.enhancement_bits);
  for (int i = 0; i < kTopLevel; ++i) {
    if (!a.side[i].defined()) continue;
    streams.side[i] =
        EncodeLatent(a.side[i], side_tables_[i], side_medians_[i], &local.side_bits[i]);
  }
  if (estimate) *estimate = local;
  return streams;
}

std::vector<std::uint8_t> Codec::Compress(const PointCloud& cloud,
                                          bool include_enhancement) const {
  return WriteBitstream(Encode(cloud), digest_, include_enhancement);
}

ParsedBitstream Codec::Read(std::span<const std::uint8_t> bytes) const {
  return ReadBitstream(bytes, digest_);
}

Tensor Codec::DecodeSegment(const ParsedBitstream& stream, SegmentKind kind,
                            const std::vector<CdfTable>& tables,
                            std::span<const double> medians, std::size_t columns) const {
  const std::span<const std::uint8_t> payload = stream.Payload(kind);
  std::vector<std::int32_t> symbols;
  try {
    symbols = RangeDecode(payload, tables.size() * columns, tables);
  } catch (const Error& e) {
    throw CorruptionError(std::string(SegmentName(kind)), e.what());
  }
  return FromSymbols(symbols, tables.size(), medians);
}

Tensor Codec::DecodeBase(const ParsedBitstream& stream) const {
  return DecodeSegment(stream, SegmentKind::kBase, base_tables_, base_medians_, 1);
}

Classification Codec::Classify(const ParsedBitstream& stream) const {
  NoGradGuard no_grad;
  const Tensor logits = model_->Classify(DecodeBase(stream));
  Classification out;
  out.logits.assign(logits.values().begin(), logits.values().end());
  out.label = static_cast<int>(std::max_element(out.logits.begin(), out.logits.end()) -
                               out.logits.begin());
  return out;
}

Classification Codec::Classify(std::span<const std::uint8_t> bytes) const {
  return Classify(Read(bytes));
}

Tensor Codec::Decompress(const ParsedBitstream& stream) const {
  NoGradGuard no_grad;
  const CodecConfig& cfg = model_->config();
  const Tensor base = DecodeBase(stream);
  const Tensor enhancement = DecodeSegment(stream, SegmentKind::kEnhancement,
                                           enhancement_tables_, enhancement_medians_, 1);
  std::array<Tensor, 3> side;
  for (int i = 0; i < kTopLevel; ++i) {
    if (!cfg.side_enabled(i)) continue;
    side[i] = DecodeSegment(stream, SideSegment(i), side_tables_[i], side_medians_[i],
                            U(cfg.levels[i].points));
  }
  return model_->Synthesize(base, enhancement, side, /*training=*/false);
}

Tensor Codec::Decompress(std::span<const std::uint8_t> bytes) const {
  return Decompress(Read(bytes));
}

SPCC_NAMESPACE_END
