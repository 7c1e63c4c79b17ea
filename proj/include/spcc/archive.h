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

#ifndef SPCC_ARCHIVE_H_
#define SPCC_ARCHIVE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spcc {

// Keyed binary archive used for checkpoints and cached datasets.
//
// Layout (all integers little-endian):
//   magic "SPCK" | version u8 | entry count u32 |
//   per entry, in key order:
//     key length u16 | key bytes | dtype u8 | rank u8 | dims u64[rank] |
//     payload byte count u64 | payload
// Real-valued payloads are IEEE-754 little-endian.
enum class DType : std::uint8_t {
  kFloat32 = 0,
  kFloat64 = 1,
  kInt64 = 2,
  kBytes = 3,
};

struct ArchiveEntry {
  DType dtype = DType::kBytes;
  std::vector<std::uint64_t> shape;
  std::vector<std::uint8_t> payload;
};

class Archive {
 public:
  static constexpr std::uint8_t kVersion = 1;

  void PutFloat32(const std::string& key, std::vector<std::uint64_t> shape,
                  std::span<const float> values);
  void PutFloat64(const std::string& key, std::vector<std::uint64_t> shape,
                  std::span<const double> values);
  void PutInt64(const std::string& key, std::vector<std::uint64_t> shape,
                std::span<const std::int64_t> values);
  void PutString(const std::string& key, std::string_view text);

  bool Contains(const std::string& key) const;
  // Missing keys raise FormatError.
  const ArchiveEntry& Get(const std::string& key) const;
  // Float32 or Float64 entries, widened to double.
  std::vector<double> GetReals(const std::string& key) const;
  std::vector<std::int64_t> GetInt64(const std::string& key) const;
  std::int64_t GetScalarInt(const std::string& key) const;
  double GetScalarReal(const std::string& key) const;
  std::string GetString(const std::string& key) const;
  std::vector<std::string> Keys() const;

  std::vector<std::uint8_t> Serialize() const;
  static Archive Deserialize(std::span<const std::uint8_t> bytes);

  void Save(const std::filesystem::path& path) const;
  static Archive Load(const std::filesystem::path& path);

 private:
  std::map<std::string, ArchiveEntry> entries_;
};

// Whole-file helpers. WriteFileBytes writes a sibling temp file and renames
// it into place.
std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const std::uint8_t> bytes);

}  // namespace spcc

#endif  // SPCC_ARCHIVE_H_
