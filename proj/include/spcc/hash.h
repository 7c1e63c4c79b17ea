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

#ifndef SPCC_HASH_H_
#define SPCC_HASH_H_

#include <cstdint>
#include <span>
#include <string_view>

namespace spcc {

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;

// 64-bit FNV-1a. Pass a previous result as `state` to chain inputs.
std::uint64_t Fnv1a64(std::span<const std::uint8_t> bytes,
                      std::uint64_t state = kFnvOffsetBasis);
std::uint64_t Fnv1a64(std::string_view text,
                      std::uint64_t state = kFnvOffsetBasis);
std::uint64_t Fnv1a64(std::uint64_t value, std::uint64_t state);

// IEEE CRC-32 as used by zlib and PNG.
std::uint32_t Crc32(std::span<const std::uint8_t> bytes);

}  // namespace spcc

#endif  // SPCC_HASH_H_
