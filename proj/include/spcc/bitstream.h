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

#ifndef SPCC_BITSTREAM_H_
#define SPCC_BITSTREAM_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace spcc {

// Container for the scalable streams (.spcc files).
//
// Layout, all integers little-endian:
//   offset 0   magic "SPCC"
//   offset 4   version u8 (0x01)
//   offset 5   flags u8 (bit 0: enhancement segments present)
//   offset 6   model digest u64
//   offset 14  segment count u8
//   offset 15  segment table, 9 bytes per entry:
//                kind u8 | payload length u32 | CRC-32 of payload u32
//   then the payloads, in table order.
// Table order is base, enhancement, side level 2, side level 1, side level 0,
// listing only the segments present. The header is excluded from rate
// accounting.
enum class SegmentKind : std::uint8_t {
  kBase = 0,
  kEnhancement = 1,
  kSide0 = 2,
  kSide1 = 3,
  kSide2 = 4,
};

inline constexpr std::uint8_t kBitstreamVersion = 0x01;
inline constexpr std::uint8_t kFlagEnhancement = 0x01;
inline constexpr std::size_t kBitstreamFixedHeaderBytes = 15;
inline constexpr std::size_t kSegmentTableEntryBytes = 9;

std::string_view SegmentName(SegmentKind kind);
SegmentKind SideSegment(int level);

struct StreamSet {
  std::vector<std::uint8_t> base;
  std::optional<std::vector<std::uint8_t>> enhancement;
  std::array<std::optional<std::vector<std::uint8_t>>, 3> side;
};

// With include_enhancement false only the base segment is written, and the
// base bytes are the same as in the full file.
std::vector<std::uint8_t> WriteBitstream(const StreamSet& streams,
                                         std::uint64_t model_digest,
                                         bool include_enhancement);

enum class SegmentStatus { kComplete, kTruncated, kCorrupt };

struct SegmentInfo {
  SegmentKind kind;
  std::uint32_t length = 0;
  std::uint32_t crc = 0;
  std::size_t offset = 0;
  SegmentStatus status = SegmentStatus::kTruncated;
};

class ParsedBitstream {
 public:
  std::uint64_t model_digest() const { return model_digest_; }
  bool enhancement_flag() const { return (flags_ & kFlagEnhancement) != 0; }
  const std::vector<SegmentInfo>& segments() const { return segments_; }
  std::size_t header_bytes() const { return header_bytes_; }

  // Null when the table does not list the segment.
  const SegmentInfo* Find(SegmentKind kind) const;
  // Raises IncompleteBitstreamError for absent or truncated segments and
  // CorruptionError for checksum failures.
  std::span<const std::uint8_t> Payload(SegmentKind kind) const;

  bool SupportsClassification() const;
  // side_enabled[i] marks levels whose side stream the model requires.
  bool SupportsReconstruction(const std::array<bool, 3>& side_enabled) const;

  // Payload bits of listed segments (header excluded).
  std::size_t PayloadBits(SegmentKind kind) const;
  std::size_t TotalPayloadBits() const;

 private:
  friend ParsedBitstream ReadBitstream(std::span<const std::uint8_t>,
                                       std::optional<std::uint64_t>);
  std::vector<std::uint8_t> bytes_;
  std::uint64_t model_digest_ = 0;
  std::uint8_t flags_ = 0;
  std::size_t header_bytes_ = 0;
  std::vector<SegmentInfo> segments_;
};

// Validates magic, version and segment table (FormatError), and the model
// digest when expected_digest is given (IncompatibleModelError). Truncated
// or corrupt payloads are reported per segment, not thrown, so the base can
// still be used when later segments are damaged.
ParsedBitstream ReadBitstream(
    std::span<const std::uint8_t> bytes,
    std::optional<std::uint64_t> expected_digest = std::nullopt);

}  // namespace spcc

#endif  // SPCC_BITSTREAM_H_
