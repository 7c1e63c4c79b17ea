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

#include "spcc/bitstream.h"

#include <algorithm>
#include <string>

#include "spcc/bytes.h"
#include "spcc/errors.h"
#include "spcc/hash.h"

namespace spcc {

namespace {

constexpr std::uint8_t kMagic[4] = {'S', 'P', 'C', 'C'};
constexpr std::uint8_t kMaxKind = static_cast<std::uint8_t>(SegmentKind::kSide2);

void AppendSegment(ByteWriter& table, std::vector<std::span<const std::uint8_t>>& payloads,
                   SegmentKind kind, std::span<const std::uint8_t> payload) {
  table.U8(static_cast<std::uint8_t>(kind));
  table.U32(static_cast<std::uint32_t>(payload.size()));
  table.U32(Crc32(payload));
  payloads.push_back(payload);
}

}  // namespace

std::string_view SegmentName(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::kBase:
      return "base";
    case SegmentKind::kEnhancement:
      return "enhancement";
    case SegmentKind::kSide0:
      return "side0";
    case SegmentKind::kSide1:
      return "side1";
    case SegmentKind::kSide2:
      return "side2";
  }
  return "unknown";
}

SegmentKind SideSegment(int level) {
  if (level < 0 || level > 2) throw ArgumentError("side level must be 0, 1 or 2");
  return static_cast<SegmentKind>(static_cast<int>(SegmentKind::kSide0) + level);
}

std::vector<std::uint8_t> WriteBitstream(const StreamSet& streams,
                                         std::uint64_t model_digest,
                                         bool include_enhancement) {
  ByteWriter table;
  std::vector<std::span<const std::uint8_t>> payloads;
  AppendSegment(table, payloads, SegmentKind::kBase, streams.base);
  if (include_enhancement) {
    if (!streams.enhancement) {
      throw ArgumentError("enhancement requested but no enhancement stream given");
    }
    AppendSegment(table, payloads, SegmentKind::kEnhancement, *streams.enhancement);
    for (int level = 2; level >= 0; --level) {
      if (streams.side[level]) {
        AppendSegment(table, payloads, SideSegment(level), *streams.side[level]);
      }
    }
  }

  ByteWriter w;
  w.Bytes(kMagic);
  w.U8(kBitstreamVersion);
  w.U8(include_enhancement ? kFlagEnhancement : 0);
  w.U64(model_digest);
  w.U8(static_cast<std::uint8_t>(payloads.size()));
  w.Bytes(table.Take());
  for (auto p : payloads) w.Bytes(p);
  return w.Take();
}

const SegmentInfo* ParsedBitstream::Find(SegmentKind kind) const {
  for (const auto& s : segments_) {
    if (s.kind == kind) return &s;
  }
  return nullptr;
}

std::span<const std::uint8_t> ParsedBitstream::Payload(SegmentKind kind) const {
  const SegmentInfo* s = Find(kind);
  const std::string name(SegmentName(kind));
  if (s == nullptr) {
    throw IncompleteBitstreamError("bitstream has no " + name + " segment");
  }
  switch (s->status) {
    case SegmentStatus::kTruncated:
      throw IncompleteBitstreamError("bitstream " + name + " segment is truncated");
    case SegmentStatus::kCorrupt:
      throw CorruptionError(name, "checksum mismatch in " + name + " segment");
    case SegmentStatus::kComplete:
      break;
  }
  return std::span<const std::uint8_t>(bytes_).subspan(s->offset, s->length);
}

bool ParsedBitstream::SupportsClassification() const {
  const SegmentInfo* base = Find(SegmentKind::kBase);
  return base != nullptr && base->status == SegmentStatus::kComplete;
}

bool ParsedBitstream::SupportsReconstruction(const std::array<bool, 3>& side_enabled) const {
  if (!SupportsClassification()) return false;
  auto complete = [&](SegmentKind k) {
    const SegmentInfo* s = Find(k);
    return s != nullptr && s->status == SegmentStatus::kComplete;
  };
  if (!complete(SegmentKind::kEnhancement)) return false;
  for (int level = 0; level < 3; ++level) {
    if (side_enabled[level] && !complete(SideSegment(level))) return false;
  }
  return true;
}

std::size_t ParsedBitstream::PayloadBits(SegmentKind kind) const {
  const SegmentInfo* s = Find(kind);
  return s == nullptr ? 0 : std::size_t{s->length} * 8;
}

std::size_t ParsedBitstream::TotalPayloadBits() const {
  std::size_t bits = 0;
  for (const auto& s : segments_) bits += std::size_t{s.length} * 8;
  return bits;
}

ParsedBitstream ReadBitstream(std::span<const std::uint8_t> bytes,
                              std::optional<std::uint64_t> expected_digest) {
  if (bytes.size() < kBitstreamFixedHeaderBytes ||
      !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw FormatError("unsupported format: not an SPCC bitstream");
  }
  ByteReader r(bytes);
  r.Bytes(4);
  if (const auto version = r.U8(); version != kBitstreamVersion) {
    throw FormatError("unsupported format: bitstream version " + std::to_string(version));
  }
  ParsedBitstream out;
  out.flags_ = r.U8();
  if ((out.flags_ & ~kFlagEnhancement) != 0) {
    throw FormatError("unsupported format: unknown header flags");
  }
  out.model_digest_ = r.U64();
  const std::size_t count = r.U8();
  if (r.remaining() < count * kSegmentTableEntryBytes) {
    throw FormatError("unsupported format: truncated segment table");
  }
  std::size_t offset = kBitstreamFixedHeaderBytes + count * kSegmentTableEntryBytes;
  out.header_bytes_ = offset;
  std::uint8_t seen = 0;
  for (std::size_t i = 0; i < count; ++i) {
    SegmentInfo s;
    const std::uint8_t kind = r.U8();
    if (kind > kMaxKind || (seen & (1u << kind)) != 0) {
      throw FormatError("unsupported format: bad segment table");
    }
    seen |= static_cast<std::uint8_t>(1u << kind);
    s.kind = static_cast<SegmentKind>(kind);
    s.length = r.U32();
    s.crc = r.U32();
    s.offset = offset;
    offset += s.length;
    out.segments_.push_back(s);
  }
  if (count == 0 || out.segments_.front().kind != SegmentKind::kBase) {
    throw FormatError("unsupported format: first segment must be the base");
  }
  if (expected_digest && *expected_digest != out.model_digest_) {
    throw IncompatibleModelError(
        "bitstream was produced by a different model (config hash mismatch)");
  }

  out.bytes_.assign(bytes.begin(), bytes.end());
  for (auto& s : out.segments_) {
    if (s.offset + s.length > bytes.size()) {
      s.status = SegmentStatus::kTruncated;
      continue;
    }
    const auto payload = bytes.subspan(s.offset, s.length);
    s.status = Crc32(payload) == s.crc ? SegmentStatus::kComplete : SegmentStatus::kCorrupt;
  }
  return out;
}

}  // namespace spcc
