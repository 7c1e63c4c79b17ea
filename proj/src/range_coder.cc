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

#include "spcc/range_coder.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "spcc/errors.h"
#include "spcc/hash.h"

namespace spcc {

namespace {

constexpr std::uint32_t kTopValue = 1u << 24;
constexpr std::uint32_t kMaxEscapeMagnitude = (1u << kEscapeMagnitudeBits) - 1;

[[noreturn]] void ThrowCorrupt(const std::string& what) {
  throw CorruptionError("stream", "range decoder: " + what);
}

}  // namespace

double CdfTable::Probability(int value) const {
  std::size_t index = escape_index();
  if (value >= min_symbol && value <= max_symbol) {
    index = static_cast<std::size_t>(value - min_symbol);
  }
  return static_cast<double>(frequency(index)) / kProbabilityTotal;
}

CdfTable CdfTable::FromProbabilities(std::span<const double> in_range,
                                     double escape_mass, int min_symbol) {
  const std::size_t slots = in_range.size() + 1;
  if (in_range.empty() || slots > kProbabilityTotal) {
    throw ArgumentError("cdf table: alphabet size out of range");
  }
  std::vector<double> p(in_range.begin(), in_range.end());
  p.push_back(escape_mass);
  double mass = 0.0;
  for (double& v : p) {
    if (!(v > 0.0) || !std::isfinite(v)) v = 0.0;
    mass += v;
  }
  if (!(mass > 0.0)) {
    std::fill(p.begin(), p.end(), 1.0);
    mass = static_cast<double>(slots);
  }

  std::vector<std::int64_t> freq(slots);
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < slots; ++i) {
    freq[i] = std::max<std::int64_t>(1, std::llround(p[i] / mass * kProbabilityTotal));
    sum += freq[i];
  }
  std::int64_t diff = static_cast<std::int64_t>(kProbabilityTotal) - sum;
  while (diff != 0) {
    const auto largest = static_cast<std::size_t>(
        std::max_element(freq.begin(), freq.end()) - freq.begin());
    if (diff > 0) {
      freq[largest] += diff;
      diff = 0;
    } else {
      const std::int64_t take = std::min(-diff, freq[largest] - 1);
      freq[largest] -= take;
      diff += take;
    }
  }

  CdfTable table;
  table.min_symbol = min_symbol;
  table.max_symbol = min_symbol + static_cast<int>(in_range.size()) - 1;
  table.cdf.resize(slots + 1);
  table.cdf[0] = 0;
  for (std::size_t i = 0; i < slots; ++i) {
    table.cdf[i + 1] = table.cdf[i] + static_cast<std::uint32_t>(freq[i]);
  }
  return table;
}

std::uint64_t CdfTable::Digest() const {
  std::uint64_t h = Fnv1a64(static_cast<std::uint64_t>(static_cast<std::int64_t>(min_symbol)),
                            kFnvOffsetBasis);
  h = Fnv1a64(static_cast<std::uint64_t>(static_cast<std::int64_t>(max_symbol)), h);
  for (auto c : cdf) h = Fnv1a64(std::uint64_t{c}, h);
  return h;
}

void CdfTable::Validate() const {
  if (max_symbol < min_symbol) throw ArgumentError("cdf table: empty symbol range");
  const auto expected = static_cast<std::size_t>(max_symbol - min_symbol + 1) + 2;
  if (cdf.size() != expected) throw ArgumentError("cdf table: wrong length");
  if (cdf.front() != 0 || cdf.back() != kProbabilityTotal) {
    throw ArgumentError("cdf table: bad end points");
  }
  for (std::size_t i = 1; i < cdf.size(); ++i) {
    if (cdf[i] <= cdf[i - 1]) throw ArgumentError("cdf table: not strictly increasing");
  }
}

void RangeEncoder::Encode(std::uint32_t start, std::uint32_t size, int precision_bits) {
  const std::uint32_t step = range_ >> precision_bits;
  low_ += static_cast<std::uint64_t>(step) * start;
  range_ = step * size;
  while (range_ < kTopValue) {
    range_ <<= 8;
    ShiftLow();
  }
}

void RangeEncoder::EncodeBits(std::uint32_t value, int bits) {
  Encode(value, 1, bits);
}

// Bytes are held back in cache_ (plus a run of cache_size_ - 1 0xFF bytes)
// until it is known whether a carry will ripple into them.
void RangeEncoder::ShiftLow() {
  if (static_cast<std::uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    const auto carry = static_cast<std::uint8_t>(low_ >> 32);
    std::uint8_t pending = cache_;
    do {
      // The very first byte is always zero; it is implied, not stored.
      if (first_byte_pending_) {
        first_byte_pending_ = false;
      } else {
        out_.push_back(static_cast<std::uint8_t>(pending + carry));
      }
      pending = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = static_cast<std::uint8_t>(low_ >> 24);
  }
  ++cache_size_;
  low_ = (low_ & 0x00FFFFFFu) << 8;
}

std::vector<std::uint8_t> RangeEncoder::Finish() {
  for (int i = 0; i < 5; ++i) ShiftLow();
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> bytes) : bytes_(bytes) {
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | NextByte();
}

std::uint8_t RangeDecoder::NextByte() {
  if (pos_ >= bytes_.size()) ThrowCorrupt("stream truncated");
  return bytes_[pos_++];
}

std::uint32_t RangeDecoder::Peek(int precision_bits) {
  step_ = range_ >> precision_bits;
  const std::uint32_t target = code_ / step_;
  if (target >= (1u << precision_bits)) ThrowCorrupt("code outside interval");
  return target;
}

void RangeDecoder::Consume(std::uint32_t start, std::uint32_t size) {
  code_ -= step_ * start;
  range_ = step_ * size;
  while (range_ < kTopValue) {
    code_ = (code_ << 8) | NextByte();
    range_ <<= 8;
  }
}

std::uint32_t RangeDecoder::DecodeBits(int bits) {
  const std::uint32_t v = Peek(bits);
  Consume(v, 1);
  return v;
}

std::vector<std::uint8_t> RangeEncode(std::span<const std::int32_t> symbols,
                                      std::span<const CdfTable> tables) {
  RangeEncoder enc;
  if (tables.empty()) {
    if (!symbols.empty()) throw ArgumentError("range encode: symbols without tables");
    return enc.Finish();
  }
  if (symbols.size() % tables.size() != 0) {
    throw ArgumentError("range encode: symbol count is not a multiple of the channel count");
  }
  const std::size_t per_channel = symbols.size() / tables.size();
  for (std::size_t c = 0; c < tables.size(); ++c) {
    const CdfTable& t = tables[c];
    for (std::size_t j = 0; j < per_channel; ++j) {
      const std::int32_t v = symbols[c * per_channel + j];
      if (v >= t.min_symbol && v <= t.max_symbol) {
        const auto idx = static_cast<std::size_t>(v - t.min_symbol);
        enc.Encode(t.cdf[idx], t.frequency(idx), kProbabilityBits);
        continue;
      }
      const std::int64_t magnitude = std::llabs(static_cast<long long>(v));
      if (magnitude > kMaxEscapeMagnitude) {
        throw ArgumentError("range encode: symbol " + std::to_string(v) +
                            " exceeds the escape range");
      }
      const std::size_t esc = t.escape_index();
      enc.Encode(t.cdf[esc], t.frequency(esc), kProbabilityBits);
      enc.EncodeBits(v < 0 ? 1 : 0, 1);
      enc.EncodeBits(static_cast<std::uint32_t>(magnitude), kEscapeMagnitudeBits);
    }
  }
  return enc.Finish();
}

std::vector<std::int32_t> RangeDecode(std::span<const std::uint8_t> bytes,
                                      std::size_t count,
                                      std::span<const CdfTable> tables) {
  if (tables.empty() ? count != 0 : count % tables.size() != 0) {
    throw ArgumentError("range decode: count is not a multiple of the channel count");
  }
  RangeDecoder dec(bytes);
  std::vector<std::int32_t> out(count);
  const std::size_t per_channel = tables.empty() ? 0 : count / tables.size();
  for (std::size_t c = 0; c < tables.size(); ++c) {
    const CdfTable& t = tables[c];
    for (std::size_t j = 0; j < per_channel; ++j) {
      const std::uint32_t target = dec.Peek(kProbabilityBits);
      const auto it = std::upper_bound(t.cdf.begin(), t.cdf.end(), target);
      const auto idx = static_cast<std::size_t>(it - t.cdf.begin()) - 1;
      dec.Consume(t.cdf[idx], t.frequency(idx));
      std::int32_t v;
      if (idx == t.escape_index()) {
        const bool negative = dec.DecodeBits(1) != 0;
        const auto magnitude = static_cast<std::int32_t>(dec.DecodeBits(kEscapeMagnitudeBits));
        v = negative ? -magnitude : magnitude;
      } else {
        v = t.min_symbol + static_cast<std::int32_t>(idx);
      }
      out[c * per_channel + j] = v;
    }
  }
  if (!dec.AtEnd()) ThrowCorrupt("trailing bytes after the last symbol");
  return out;
}

double ShannonBits(std::span<const std::int32_t> symbols,
                   std::span<const CdfTable> tables) {
  if (tables.empty()) return 0.0;
  const std::size_t per_channel = symbols.size() / tables.size();
  double bits = 0.0;
  for (std::size_t c = 0; c < tables.size(); ++c) {
    const CdfTable& t = tables[c];
    for (std::size_t j = 0; j < per_channel; ++j) {
      const std::int32_t v = symbols[c * per_channel + j];
      bits -= std::log2(t.Probability(v));
      if (v < t.min_symbol || v > t.max_symbol) bits += 1 + kEscapeMagnitudeBits;
    }
  }
  return bits;
}

}  // namespace spcc
