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

#include "spcc/config.h"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "spcc/errors.h"
#include "spcc/hash.h"

namespace spcc {

namespace {

std::string FormatDouble(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

int ParseInt(const std::string& key, const std::string& value) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ArgumentError("config: '" + key + "' expects an integer, got '" + value + "'");
  }
  return v;
}

double ParseDouble(const std::string& key, const std::string& value) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ArgumentError("config: '" + key + "' expects a number, got '" + value + "'");
  }
  return v;
}

std::vector<int> ParseIntList(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(ParseInt(key, Trim(item)));
  return out;
}

std::string JoinInts(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

[[noreturn]] void Invalid(const std::string& what) {
  throw ShapeError("invalid codec config: " + what);
}

}  // namespace

CodecConfig CodecConfig::Full(int classes) {
  CodecConfig c;
  c.preset = "full";
  c.classes = classes;
  c.levels[0] = {1024, 0, 0.0, 3, 3, 0};
  c.levels[1] = {256, 4, 0.2, 128, 64, 0};
  c.levels[2] = {64, 4, 0.4, 192, 32, 64};
  c.levels[3] = {1, 64, 0.0, 256, 16, 64};
  c.base_latent = 48;
  c.enhancement_latent = 16;
  c.classifier_hidden = {128, 64};
  return c;
}

CodecConfig CodecConfig::Lite(int classes) {
  CodecConfig c;
  c.preset = "lite";
  c.classes = classes;
  c.levels[0] = {1024, 0, 0.0, 3, 3, 0};
  c.levels[1] = {256, 4, 0.2, 32, 32, 0};
  c.levels[2] = {64, 4, 0.4, 48, 16, 16};
  c.levels[3] = {1, 64, 0.0, 64, 8, 64};
  c.base_latent = 48;
  c.enhancement_latent = 16;
  c.classifier_hidden = {64, 32};
  return c;
}

CodecConfig CodecConfig::Preset(std::string_view name, int classes) {
  if (name == "full") return Full(classes);
  if (name == "lite") return Lite(classes);
  throw ArgumentError("unknown preset '" + std::string(name) + "' (expected full or lite)");
}

bool CodecConfig::side_enabled(int level) const {
  return level >= 0 && level < kTopLevel && levels[level].latent > 0;
}

std::array<bool, 3> CodecConfig::side_mask() const {
  return {side_enabled(0), side_enabled(1), side_enabled(2)};
}

void CodecConfig::Validate() const {
  if (classes < 2) Invalid("classes must be at least 2");
  if (attribute_channels < 0) Invalid("attribute_channels must be non-negative");
  if (levels[0].points < 1) Invalid("level0.points must be positive");
  if (levels[0].features != 3 + attribute_channels) {
    Invalid("level0.features must equal 3 + attribute_channels");
  }
  if (levels[0].up_channels != 3) Invalid("level0.up_channels must be 3 (xyz output)");
  for (int i = 1; i < kNumLevels; ++i) {
    const LevelConfig& l = levels[i];
    const std::string name = "level" + std::to_string(i);
    if (l.points < 1 || l.group_size < 1) Invalid(name + " points/group_size must be positive");
    if (levels[i - 1].points != l.points * l.group_size) {
      Invalid(name + ": previous level points must equal points * group_size");
    }
    if (l.features < 1 || l.up_channels < 1) Invalid(name + " channel counts must be positive");
    if (i < kTopLevel && !(l.radius > 0.0)) Invalid(name + ".radius must be positive");
  }
  if (levels[kTopLevel].points != 1) Invalid("level3.points must be 1 (global grouping)");
  for (int i = 0; i < kTopLevel; ++i) {
    if (levels[i].latent < 0) Invalid("latent channel counts must be non-negative");
  }
  if (base_latent < 1 || enhancement_latent < 1) {
    Invalid("base and enhancement latent sizes must be positive");
  }
  if (levels[kTopLevel].latent != top_latent()) {
    Invalid("level3.latent must equal base + enhancement");
  }
  if (classifier_hidden[0] < 1 || classifier_hidden[1] < 1) {
    Invalid("classifier widths must be positive");
  }
  if (entropy_filters.empty()) Invalid("entropy.filters must not be empty");
  for (int f : entropy_filters) {
    if (f < 1) Invalid("entropy.filters entries must be positive");
  }
  if (min_symbol >= max_symbol || min_symbol < -32767 || max_symbol > 32767) {
    Invalid("entropy.symbol_range must be an increasing pair within +-32767");
  }
}

std::string CodecConfig::Canonical() const {
  std::ostringstream o;
  o << "preset = " << preset << "\n";
  o << "classes = " << classes << "\n";
  o << "attribute_channels = " << attribute_channels << "\n";
  for (int i = 0; i < kNumLevels; ++i) {
    const LevelConfig& l = levels[i];
    const std::string p = "level" + std::to_string(i) + ".";
    o << p << "points = " << l.points << "\n";
    if (i > 0) o << p << "group_size = " << l.group_size << "\n";
    if (i > 0 && i < kTopLevel) o << p << "radius = " << FormatDouble(l.radius) << "\n";
    o << p << "features = " << l.features << "\n";
    o << p << "up_channels = " << l.up_channels << "\n";
    if (i < kTopLevel) o << p << "latent = " << l.latent << "\n";
  }
  o << "level3.base_latent = " << base_latent << "\n";
  o << "level3.enhancement_latent = " << enhancement_latent << "\n";
  o << "classifier.hidden = " << classifier_hidden[0] << "," << classifier_hidden[1] << "\n";
  o << "entropy.filters = " << JoinInts(entropy_filters) << "\n";
  o << "entropy.symbol_range = " << min_symbol << "," << max_symbol << "\n";
  return o.str();
}

std::uint64_t CodecConfig::Hash() const { return Fnv1a64(Canonical()); }

CodecConfig CodecConfig::Parse(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ArgumentError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    entries.emplace_back(Trim(std::string_view(line).substr(0, eq)),
                         Trim(std::string_view(line).substr(eq + 1)));
  }

  std::string preset = "lite";
  int classes = 40;
  for (const auto& [k, v] : entries) {
    if (k == "preset") preset = v;
    if (k == "classes") classes = ParseInt(k, v);
  }
  CodecConfig c = (preset == "full" || preset == "lite") ? Preset(preset, classes) : Lite(classes);
  c.preset = preset;

  for (const auto& [k, v] : entries) {
    if (k == "preset" || k == "classes") continue;
    if (k == "attribute_channels") {
      c.attribute_channels = ParseInt(k, v);
      c.levels[0].features = 3 + c.attribute_channels;
      continue;
    }
    if (k == "level3.base_latent") {
      c.base_latent = ParseInt(k, v);
    } else if (k == "level3.enhancement_latent") {
      c.enhancement_latent = ParseInt(k, v);
    } else if (k == "classifier.hidden") {
      auto w = ParseIntList(k, v);
      if (w.size() != 2) throw ArgumentError("config: classifier.hidden expects two widths");
      c.classifier_hidden = {w[0], w[1]};
    } else if (k == "entropy.filters") {
      c.entropy_filters = ParseIntList(k, v);
    } else if (k == "entropy.symbol_range") {
      auto r = ParseIntList(k, v);
      if (r.size() != 2) throw ArgumentError("config: entropy.symbol_range expects two values");
      c.min_symbol = r[0];
      c.max_symbol = r[1];
    } else if (k.size() > 7 && k.rfind("level", 0) == 0 && k[6] == '.' && k[5] >= '0' &&
               k[5] <= '3') {
      LevelConfig& l = c.levels[k[5] - '0'];
      const std::string field = k.substr(7);
      if (field == "points") {
        l.points = ParseInt(k, v);
      } else if (field == "group_size") {
        l.group_size = ParseInt(k, v);
      } else if (field == "radius") {
        l.radius = ParseDouble(k, v);
      } else if (field == "features") {
        l.features = ParseInt(k, v);
      } else if (field == "up_channels") {
        l.up_channels = ParseInt(k, v);
      } else if (field == "latent" && k[5] != '3') {
        l.latent = ParseInt(k, v);
      } else {
        throw ArgumentError("config: unknown key '" + k + "'");
      }
    } else {
      throw ArgumentError("config: unknown key '" + k + "'");
    }
  }
  c.levels[kTopLevel].latent = c.top_latent();
  c.Validate();
  return c;
}

CodecConfig CodecConfig::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

}  // namespace spcc
