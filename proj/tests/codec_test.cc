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

#include <vector>

#include <gtest/gtest.h>

#include "spcc/dataio.h"
#include "spcc/entropy.h"
#include "spcc/errors.h"
#include "spcc/ops.h"

namespace spcc {
namespace {

class CodecTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    model_ = new ScalableCodecModel(CodecConfig::Lite(6), 5);
    SyntheticOptions o;
    o.train_per_class = 17;  // 102 clouds
    o.seed = 3;
    data_ = new Dataset(SyntheticShapes(o, "train"));
  }
  static void TearDownTestSuite() {
    delete model_;
    delete data_;
  }
  static ScalableCodecModel* model_;
  static Dataset* data_;
};

ScalableCodecModel* CodecTest::model_ = nullptr;
Dataset* CodecTest::data_ = nullptr;

std::vector<std::uint8_t> Bytes(std::span<const std::uint8_t> s) { return {s.begin(), s.end()}; }

TEST_F(CodecTest, BaseSegmentIndependentOfEnhancement) {
  const Codec codec(*model_);
  for (std::size_t i = 0; i < 10; ++i) {
    const auto full = codec.Compress(data_->items[i], true);
    const auto base = codec.Compress(data_->items[i], false);
    const ParsedBitstream pf = codec.Read(full), pb = codec.Read(base);
    EXPECT_EQ(Bytes(pf.Payload(SegmentKind::kBase)), Bytes(pb.Payload(SegmentKind::kBase)));
    EXPECT_EQ(Bytes(pb.Payload(SegmentKind::kBase)), codec.Encode(data_->items[i]).base);
  }
}

TEST_F(CodecTest, BaseOnlyClassificationMatchesFullFile) {
  const Codec codec(*model_);
  for (std::size_t i = 0; i < 100; ++i) {
    const auto full = codec.Compress(data_->items[i], true);
    const auto base = codec.Compress(data_->items[i], false);
    const Classification a = codec.Classify(full), b = codec.Classify(base);
    EXPECT_EQ(a.label, b.label);
    EXPECT_EQ(a.logits, b.logits);
    EXPECT_THROW(codec.Decompress(base), IncompleteBitstreamError);
  }
}

TEST_F(CodecTest, EnhancementDamageNeverChangesClass) {
  const Codec codec(*model_);
  Rng rng(1);
  for (std::size_t i = 0; i < 20; ++i) {
    const auto full = codec.Compress(data_->items[i], true);
    const ParsedBitstream parsed = codec.Read(full);
    const SegmentInfo* enh = parsed.Find(SegmentKind::kEnhancement);
    ASSERT_NE(enh, nullptr);
    auto damaged = full;
    damaged[enh->offset + rng.Index(enh->length)] ^= static_cast<std::uint8_t>(1 + rng.Index(255));
    EXPECT_EQ(codec.Classify(damaged).label, codec.Classify(full).label);
    try {
      codec.Decompress(damaged);
      FAIL() << "damaged enhancement decoded";
    } catch (const CorruptionError& e) {
      EXPECT_EQ(e.segment(), "enhancement");
    }
    auto cut = full;
    cut.resize(enh->offset + enh->length / 2);
    EXPECT_EQ(codec.Classify(cut).label, codec.Classify(full).label);
    EXPECT_THROW(codec.Decompress(cut), IncompleteBitstreamError);
  }
}

TEST_F(CodecTest, DeterministicAndDigestChecked) {
  const Codec codec(*model_);
  const auto a = codec.Compress(data_->items[0], true);
  EXPECT_EQ(codec.Compress(data_->items[0], true), a);
  const Codec again(*model_);
  EXPECT_EQ(again.digest(), codec.digest());
  EXPECT_EQ(again.Compress(data_->items[0], true), a);

  ScalableCodecModel other(CodecConfig::Lite(6), 6);
  const Codec foreign(other);
  EXPECT_NE(foreign.digest(), codec.digest());
  EXPECT_THROW(foreign.Classify(a), IncompatibleModelError);
  EXPECT_THROW(foreign.Decompress(a), IncompatibleModelError);
}

TEST_F(CodecTest, DecodedLatentsEqualRoundedAnalysis) {
  const Codec codec(*model_);
  const PointCloud& cloud = data_->items[4];
  const auto bytes = codec.Compress(cloud, true);
  const Tensor base = codec.DecodeBase(codec.Read(bytes));
  NoGradGuard guard;
  const PointCloud one[] = {cloud};
  const Analysis a = model_->Analyze(MakeBatch(one), false);
  const std::vector<double> medians = model_->top_entropy().Medians();
  const Tensor q = QuantizeRound(a.top, medians);
  ASSERT_EQ(base.shape(), (Shape{48, 1}));
  for (std::size_t i = 0; i < 48; ++i) EXPECT_EQ(base.values()[i], q.values()[i]);
  const Tensor logits = model_->Classify(base);
  const Classification c = codec.Classify(bytes);
  for (std::size_t i = 0; i < logits.size(); ++i) EXPECT_EQ(c.logits[i], logits.values()[i]);

  const Tensor recon = codec.Decompress(bytes);
  EXPECT_EQ(recon.shape(), (Shape{3, 1024}));
  const Tensor recon2 = codec.Decompress(bytes);
  EXPECT_TRUE(std::equal(recon.values().begin(), recon.values().end(), recon2.values().begin()));
}

TEST_F(CodecTest, MeasuredRateWithinEstimateBound) {
  const Codec codec(*model_);
  for (std::size_t i = 0; i < 5; ++i) {
    RateEstimate est;
    const StreamSet s = codec.Encode(data_->items[i], &est);
    EXPECT_GE(8.0 * s.base.size(), est.base_bits);
    EXPECT_LE(8.0 * s.base.size(), est.base_bits * 1.02 + 256);
    EXPECT_GE(8.0 * s.enhancement->size(), est.enhancement_bits);
    EXPECT_LE(8.0 * s.side[2]->size(), est.side_bits[2] * 1.02 + 256);
    const ParsedBitstream p = codec.Read(codec.Compress(data_->items[i], true));
    EXPECT_EQ(p.TotalPayloadBits(),
              8 * (s.base.size() + s.enhancement->size() + s.side[2]->size()));
  }
}

}  // namespace
}  // namespace spcc
