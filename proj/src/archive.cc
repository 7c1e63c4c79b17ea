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

#include "spcc/archive.h"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "spcc/bytes.h"
#include "spcc/errors.h"

namespace spcc {

namespace {

constexpr char kMagic[4] = {'S', 'P', 'C', 'K'};

std::uint64_t ElementCount(const std::vector<std::uint64_t>& shape) {
  std::uint64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::size_t ElementBytes(DType dtype) {
  switch (dtype) {
    case DType::kFloat32:
      return 4;
    case DType::kFloat64:
    case DType::kInt64:
      return 8;
    case DType::kBytes:
      return 1;
  }
  return 0;
}

}  // namespace

void Archive::PutFloat32(const std::string& key, std::vector<std::uint64_t> shape,
                         std::span<const float> values) {
  if (ElementCount(shape) != values.size()) {
    throw ArgumentError("archive entry '" + key + "': shape does not match data");
  }
  ByteWriter w;
  for (float v : values) w.F32(v);
  entries_[key] = ArchiveEntry{DType::kFloat32, std::move(shape), w.Take()};
}

void Archive::PutFloat64(const std::string& key, std::vector<std::uint64_t> shape,
                         std::span<const double> values) {
  if (ElementCount(shape) != values.size()) {
    throw ArgumentError("archive entry '" + key + "': shape does not match data");
  }
  ByteWriter w;
  for (double v : values) w.F64(v);
  entries_[key] = ArchiveEntry{DType::kFloat64, std::move(shape), w.Take()};
}

void Archive::PutInt64(const std::string& key, std::vector<std::uint64_t> shape,
                       std::span<const std::int64_t> values) {
  if (ElementCount(shape) != values.size()) {
    throw ArgumentError("archive entry '" + key + "': shape does not match data");
  }
  ByteWriter w;
  for (auto v : values) w.U64(static_cast<std::uint64_t>(v));
  entries_[key] = ArchiveEntry{DType::kInt64, std::move(shape), w.Take()};
}

void Archive::PutString(const std::string& key, std::string_view text) {
  ByteWriter w;
  w.Text(text);
  entries_[key] = ArchiveEntry{DType::kBytes, {text.size()}, w.Take()};
}

bool Archive::Contains(const std::string& key) const {
  return entries_.count(key) != 0;
}

const ArchiveEntry& Archive::Get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw FormatError("archive has no entry '" + key + "'");
  return it->second;
}

std::vector<double> Archive::GetReals(const std::string& key) const {
  const ArchiveEntry& e = Get(key);
  ByteReader r(e.payload);
  std::vector<double> out(ElementCount(e.shape));
  if (e.dtype == DType::kFloat32) {
    for (auto& v : out) v = r.F32();
  } else if (e.dtype == DType::kFloat64) {
    for (auto& v : out) v = r.F64();
  } else {
    throw FormatError("archive entry '" + key + "' is not real-valued");
  }
  return out;
}

std::vector<std::int64_t> Archive::GetInt64(const std::string& key) const {
  const ArchiveEntry& e = Get(key);
  if (e.dtype != DType::kInt64) {
    throw FormatError("archive entry '" + key + "' is not int64");
  }
  ByteReader r(e.payload);
  std::vector<std::int64_t> out(ElementCount(e.shape));
  for (auto& v : out) v = static_cast<std::int64_t>(r.U64());
  return out;
}

std::int64_t Archive::GetScalarInt(const std::string& key) const {
  auto v = GetInt64(key);
  if (v.size() != 1) throw FormatError("archive entry '" + key + "' is not a scalar");
  return v[0];
}

double Archive::GetScalarReal(const std::string& key) const {
  auto v = GetReals(key);
  if (v.size() != 1) throw FormatError("archive entry '" + key + "' is not a scalar");
  return v[0];
}

std::string Archive::GetString(const std::string& key) const {
  const ArchiveEntry& e = Get(key);
  if (e.dtype != DType::kBytes) {
    throw FormatError("archive entry '" + key + "' is not a byte string");
  }
  return std::string(e.payload.begin(), e.payload.end());
}

std::vector<std::string> Archive::Keys() const {
  std::vector<std::string> keys;
  keys.reserve(entries_.size());
  for (const auto& [k, _] : entries_) keys.push_back(k);
  return keys;
}

std::vector<std::uint8_t> Archive::Serialize() const {
  ByteWriter w;
  w.Bytes(std::span(reinterpret_cast<const std::uint8_t*>(kMagic), 4));
  w.U8(kVersion);
  w.U32(static_cast<std::uint32_t>(entries_.size()));
  for (const auto& [key, e] : entries_) {
    w.U16(static_cast<std::uint16_t>(key.size()));
    w.Text(key);
    w.U8(static_cast<std::uint8_t>(e.dtype));
    w.U8(static_cast<std::uint8_t>(e.shape.size()));
    for (auto d : e.shape) w.U64(d);
    w.U64(e.payload.size());
    w.Bytes(e.payload);
  }
  return w.Take();
}

Archive Archive::Deserialize(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  auto magic = r.Bytes(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic)) {
    throw FormatError("not an archive (bad magic)");
  }
  if (const auto version = r.U8(); version != kVersion) {
    throw FormatError("unsupported archive version " + std::to_string(version));
  }
  Archive a;
  const std::uint32_t count = r.U32();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string key = r.Text(r.U16());
    ArchiveEntry e;
    const auto tag = r.U8();
    if (tag > static_cast<std::uint8_t>(DType::kBytes)) {
      throw FormatError("archive entry '" + key + "' has unknown dtype");
    }
    e.dtype = static_cast<DType>(tag);
    e.shape.resize(r.U8());
    for (auto& d : e.shape) d = r.U64();
    const std::uint64_t n = r.U64();
    if (n != ElementCount(e.shape) * ElementBytes(e.dtype)) {
      throw FormatError("archive entry '" + key + "' payload size mismatch");
    }
    auto payload = r.Bytes(n);
    e.payload.assign(payload.begin(), payload.end());
    a.entries_[std::move(key)] = std::move(e);
  }
  return a;
}

void Archive::Save(const std::filesystem::path& path) const {
  WriteFileBytes(path, Serialize());
}

Archive Archive::Load(const std::filesystem::path& path) {
  return Deserialize(ReadFileBytes(path));
}

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ArgumentError("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ArgumentError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace spcc
