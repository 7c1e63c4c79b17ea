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

#ifndef SPCC_RANGE_CODER_H_
#define SPCC_RANGE_CODER_H_

#include <cstdint>
#include <span>
#include <vector>

namespace spcc {

inline constexpr int kProbabilityBits = 16;
inline constexpr std::uint32_t kProbabilityTotal = 1u << kProbabilityBits;
inline constexpr int kDefaultMinSymbol = -127;
inline constexpr int kDefaultMaxSymbol = 127;
// Escaped values carry a sign bit plus this many magnitude bits.
inline constexpr int kEscapeMagnitudeBits = 16;

// Quantized cumulative frequencies for symbols in [min_symbol, max_symbol]
// followed by one escape slot. cdf has alphabet_size() + 1 entries, starts at
// 0, ends at kProbabilityTotal and is strictly increasing.
struct CdfTable {
  int min_symbol = kDefaultMinSymbol;
  int max_symbol = kDefaultMaxSymbol;
  std::vector<std::uint32_t> cdf;

  std::size_t alphabet_size() const { return cdf.size() - 1; }
  std::size_t escape_index() const { return alphabet_size() - 1; }
  std::uint32_t frequency(std::size_t index) const {
    return cdf[index + 1] - cdf[index];
  }
  // Probability the coder actually assigns to `value` (escape mass for
  // out-of-range values, excluding the bypass bits).
  double Probability(int value) const;

  // Builds a table from in-range probabilities and the escape mass. Every
  // slot receives at least one count; rounding slack is settled on the most
  // probable slots so the result is a pure function of the inputs.
  static CdfTable FromProbabilities(std::span<const double> in_range,
                                    double escape_mass, int min_symbol);

  std::uint64_t Digest() const;
  // Raises ArgumentError when the invariants above do not hold.
  void Validate() const;
};

// Carry-propagating range encoder: 64-bit low, 32-bit range, byte-wise
// renormalization. Output is deterministic and carries no framing.
class RangeEncoder {
 public:
  // Narrows the interval to [start, start + size) out of 2^precision_bits.
  void Encode(std::uint32_t start, std::uint32_t size, int precision_bits);
  // Equiprobable bits, at most 16 per call.
  void EncodeBits(std::uint32_t value, int bits);
  std::vector<std::uint8_t> Finish();

 private:
  void ShiftLow();

  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t cache_size_ = 1;
  bool first_byte_pending_ = true;
  std::vector<std::uint8_t> out_;
};

// Mirror of RangeEncoder. Running past the end of the input, or a code value
// outside the current interval, raises CorruptionError.
class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const std::uint8_t> bytes);

  // Returns the cumulative target in [0, 2^precision_bits); follow with
  // Consume() using the interval that contains it.
  std::uint32_t Peek(int precision_bits);
  void Consume(std::uint32_t start, std::uint32_t size);
  std::uint32_t DecodeBits(int bits);
  // True when every input byte has been consumed.
  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  std::uint8_t NextByte();

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::uint32_t code_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint32_t step_ = 0;
};

// Codes a row-major channels x N symbol matrix, channel c using tables[c].
// symbols.size() must be a multiple of tables.size(). Values outside a
// table's range are escaped; magnitudes above 2^16 - 1 raise ArgumentError.
std::vector<std::uint8_t> RangeEncode(std::span<const std::int32_t> symbols,
                                      std::span<const CdfTable> tables);
std::vector<std::int32_t> RangeDecode(std::span<const std::uint8_t> bytes,
                                      std::size_t count,
                                      std::span<const CdfTable> tables);

// Ideal code length in bits under the tables, escape bypass bits included.
double ShannonBits(std::span<const std::int32_t> symbols,
                   std::span<const CdfTable> tables);

}  // namespace spcc

#endif  // SPCC_RANGE_CODER_H_
