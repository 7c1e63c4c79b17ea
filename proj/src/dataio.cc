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

#include "spcc/dataio.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include "spcc/archive.h"
#include "spcc/bytes.h"
#include "spcc/errors.h"

SPCC_NAMESPACE_BEGIN

namespace {

using Vec3 = std::array<double, 3>;

Vec3 Sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

double TriangleArea(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 u = Sub(b, a), v = Sub(c, a);
  const Vec3 n = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
  return 0.5 * std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
}

Mesh CubeMesh() {
  Mesh m;
  for (int i = 0; i < 8; ++i) {
    m.vertices.push_back({i & 1 ? 1.0 : -1.0, i & 2 ? 1.0 : -1.0, i & 4 ? 1.0 : -1.0});
  }
  const std::uint32_t quads[6][4] = {{0, 1, 3, 2}, {4, 5, 7, 6}, {0, 1, 5, 4},
                                     {2, 3, 7, 6}, {0, 2, 6, 4}, {1, 3, 7, 5}};
  for (const auto& q : quads) {
    m.triangles.push_back({q[0], q[1], q[2]});
    m.triangles.push_back({q[0], q[2], q[3]});
  }
  return m;
}

Mesh PyramidMesh() {
  Mesh m;
  m.vertices = {{-0.8, -1, -0.8}, {0.8, -1, -0.8}, {0.8, -1, 0.8}, {-0.8, -1, 0.8}, {0, 1, 0}};
  m.triangles = {{0, 1, 2}, {0, 2, 3}, {0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
  return m;
}

void SetColumn(std::vector<Real>& out, std::size_t n, std::size_t j, const Vec3& p) {
  for (std::size_t a = 0; a < 3; ++a) out[a * n + j] = static_cast<Real>(p[a]);
}

// Uniform rotation from a normalized Gaussian quaternion.
std::array<double, 9> RandomRotation(Rng& rng) {
  double q[4];
  double norm = 0.0;
  while (norm < 1e-12) {
    norm = 0.0;
    for (double& v : q) {
      v = rng.Normal();
      norm += v * v;
    }
  }
  norm = std::sqrt(norm);
  for (double& v : q) v /= norm;
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  return {1 - 2 * (y * y + z * z), 2 * (x * y - w * z),     2 * (x * z + w * y),
          2 * (x * y + w * z),     1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
          2 * (x * z - w * y),     2 * (y * z + w * x),     1 - 2 * (x * x + y * y)};
}

Tensor Rotate(const Tensor& coords, const std::array<double, 9>& r) {
  const std::size_t n = coords.dim(1);
  const auto src = coords.values();
  std::vector<Real> out(3 * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t a = 0; a < 3; ++a) {
      double acc = 0.0;
      for (std::size_t b = 0; b < 3; ++b) acc += r[a * 3 + b] * src[b * n + j];
      out[a * n + j] = static_cast<Real>(acc);
    }
  }
  return Tensor({3, n}, std::move(out));
}

std::string StripComment(std::string line) {
  if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
  return line;
}

std::vector<std::string> Tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

template <typename T>
T ParseNumber(const std::string& token, const char* what) {
  T value{};
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw FormatError(std::string(what) + ": bad number '" + token + "'");
  }
  return value;
}

std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

PointCloud ReadXyz(const std::string& text) {
  std::vector<Vec3> pts;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto tok = Tokens(StripComment(line));
    if (tok.empty()) continue;
    if (tok.size() < 3) throw FormatError("point file: expected at least 3 columns per line");
    pts.push_back({ParseNumber<double>(tok[0], "point file"), ParseNumber<double>(tok[1], "point file"),
                   ParseNumber<double>(tok[2], "point file")});
  }
  if (pts.empty()) throw FormatError("point file: no points");
  std::vector<Real> out(3 * pts.size());
  for (std::size_t j = 0; j < pts.size(); ++j) SetColumn(out, pts.size(), j, pts[j]);
  return PointCloud{Tensor({3, pts.size()}, std::move(out)), Tensor(), std::nullopt};
}

std::size_t PlyTypeSize(const std::string& type) {
  static const std::map<std::string, std::size_t> sizes = {
      {"char", 1},   {"uchar", 1},  {"int8", 1},   {"uint8", 1},   {"short", 2},
      {"ushort", 2}, {"int16", 2},  {"uint16", 2}, {"int", 4},     {"uint", 4},
      {"int32", 4},  {"uint32", 4}, {"float", 4},  {"float32", 4}, {"double", 8},
      {"float64", 8}};
  auto it = sizes.find(type);
  if (it == sizes.end()) throw FormatError("ply: unsupported property type '" + type + "'");
  return it->second;
}

double PlyValue(ByteReader& r, const std::string& type) {
  const std::size_t size = PlyTypeSize(type);
  if (type == "float" || type == "float32") return r.F32();
  if (type == "double" || type == "float64") return r.F64();
  const bool is_signed = type == "char" || type == "int8" || type == "short" ||
                         type == "int16" || type == "int" || type == "int32";
  const std::uint64_t raw = size == 1 ? r.U8() : size == 2 ? r.U16() : r.U32();
  if (!is_signed) return static_cast<double>(raw);
  const int bits = static_cast<int>(size * 8);
  const std::int64_t v = static_cast<std::int64_t>(raw << (64 - bits)) >> (64 - bits);
  return static_cast<double>(v);
}

PointCloud ReadPly(const std::string& data) {
  std::size_t pos = 0;
  auto next_line = [&]() {
    const std::size_t end = data.find('\n', pos);
    if (end == std::string::npos) throw FormatError("ply: unterminated header");
    std::string line = data.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };
  if (next_line() != "ply") throw FormatError("ply: missing magic");
  std::string format;
  std::size_t vertex_count = 0;
  bool in_vertex = false, seen_vertex = false;
  std::vector<std::pair<std::string, std::string>> props;  // type, name
  while (true) {
    const auto tok = Tokens(next_line());
    if (tok.empty()) continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "format" && tok.size() >= 2) {
      format = tok[1];
    } else if (tok[0] == "element" && tok.size() >= 3) {
      in_vertex = tok[1] == "vertex";
      if (in_vertex) {
        if (seen_vertex) throw FormatError("ply: duplicate vertex element");
        seen_vertex = true;
        vertex_count = ParseNumber<std::size_t>(tok[2], "ply");
      } else if (!seen_vertex) {
        throw FormatError("ply: vertex element must come first");
      }
    } else if (tok[0] == "property" && in_vertex) {
      if (tok.size() < 3 || tok[1] == "list") throw FormatError("ply: unsupported vertex property");
      props.emplace_back(tok[1], tok[2]);
    }
  }
  int ix = -1, iy = -1, iz = -1;
  for (std::size_t k = 0; k < props.size(); ++k) {
    if (props[k].second == "x") ix = static_cast<int>(k);
    if (props[k].second == "y") iy = static_cast<int>(k);
    if (props[k].second == "z") iz = static_cast<int>(k);
  }
  if (ix < 0 || iy < 0 || iz < 0) throw FormatError("ply: vertex element lacks x/y/z");
  if (vertex_count == 0) throw FormatError("ply: no vertices");
  std::vector<Real> out(3 * vertex_count);
  std::vector<double> row(props.size());
  if (format == "ascii") {
    std::istringstream in(data.substr(pos));
    for (std::size_t j = 0; j < vertex_count; ++j) {
      for (double& v : row) {
        if (!(in >> v)) throw FormatError("ply: truncated vertex data");
      }
      SetColumn(out, vertex_count, j, {row[ix], row[iy], row[iz]});
    }
  } else if (format == "binary_little_endian") {
    const auto* begin = reinterpret_cast<const std::uint8_t*>(data.data());
    ByteReader r(std::span<const std::uint8_t>(begin + pos, data.size() - pos));
    for (std::size_t j = 0; j < vertex_count; ++j) {
      for (std::size_t k = 0; k < props.size(); ++k) row[k] = PlyValue(r, props[k].first);
      SetColumn(out, vertex_count, j, {row[ix], row[iy], row[iz]});
    }
  } else {
    throw FormatError("ply: unsupported format '" + format + "'");
  }
  return PointCloud{Tensor({3, vertex_count}, std::move(out)), Tensor(), std::nullopt};
}

}  // namespace

const std::vector<std::string>& SyntheticShapeNames() {
  static const std::vector<std::string> names = {"sphere",   "cube", "torus",
                                                 "cylinder", "cone", "pyramid"};
  return names;
}

Tensor SampleShapeSurface(std::string_view shape, std::size_t points, Rng& rng) {
  if (shape == "cube") return SampleSurface(CubeMesh(), points, rng).coords;
  if (shape == "pyramid") return SampleSurface(PyramidMesh(), points, rng).coords;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<Real> out(3 * points);
  for (std::size_t j = 0; j < points; ++j) {
    Vec3 p{};
    if (shape == "sphere") {
      double n = 0.0;
      while (n < 1e-12) {
        p = {rng.Normal(), rng.Normal(), rng.Normal()};
        n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
      }
      p = {p[0] / n, p[1] / n, p[2] / n};
    } else if (shape == "torus") {
      constexpr double kMajor = 1.0, kMinor = 0.35;
      double theta, phi;
      do {
        theta = rng.Uniform(0.0, two_pi);
        phi = rng.Uniform(0.0, two_pi);
      } while (rng.Uniform() * (kMajor + kMinor) > kMajor + kMinor * std::cos(phi));
      const double ring = kMajor + kMinor * std::cos(phi);
      p = {ring * std::cos(theta), kMinor * std::sin(phi), ring * std::sin(theta)};
    } else if (shape == "cylinder") {
      constexpr double kRadius = 0.6;
      const double side = 2.0 * std::numbers::pi * kRadius * 2.0;
      const double cap = std::numbers::pi * kRadius * kRadius;
      const double pick = rng.Uniform() * (side + 2.0 * cap);
      const double theta = rng.Uniform(0.0, two_pi);
      if (pick < side) {
        p = {kRadius * std::cos(theta), rng.Uniform(-1.0, 1.0), kRadius * std::sin(theta)};
      } else {
        const double r = kRadius * std::sqrt(rng.Uniform());
        p = {r * std::cos(theta), pick < side + cap ? 1.0 : -1.0, r * std::sin(theta)};
      }
    } else if (shape == "cone") {
      constexpr double kRadius = 0.8;
      const double slant = std::sqrt(kRadius * kRadius + 4.0);
      const double side = std::numbers::pi * kRadius * slant;
      const double base = std::numbers::pi * kRadius * kRadius;
      const double theta = rng.Uniform(0.0, two_pi);
      if (rng.Uniform() * (side + base) < side) {
        const double t = std::sqrt(rng.Uniform());  // distance fraction from the apex
        p = {kRadius * t * std::cos(theta), 1.0 - 2.0 * t, kRadius * t * std::sin(theta)};
      } else {
        const double r = kRadius * std::sqrt(rng.Uniform());
        p = {r * std::cos(theta), -1.0, r * std::sin(theta)};
      }
    } else {
      throw ArgumentError("unknown synthetic shape '" + std::string(shape) + "'");
    }
    SetColumn(out, points, j, p);
  }
  return Tensor({3, points}, std::move(out));
}

PointCloud SyntheticItem(std::string_view shape, std::size_t points, double jitter, Rng& rng) {
  Tensor coords = SampleShapeSurface(shape, points, rng);
  if (jitter > 0.0) {
    for (Real& v : coords.mutable_values()) v += static_cast<Real>(jitter * rng.Normal());
  }
  PointCloud cloud{Rotate(coords, RandomRotation(rng)), Tensor(), std::nullopt};
  return Normalize(cloud);
}

Dataset SyntheticShapes(const SyntheticOptions& options, std::string_view split) {
  if (options.shapes.size() < 2) throw ArgumentError("synthetic shapes: need at least 2 classes");
  std::uint64_t stream;
  std::size_t per_class;
  if (split == "train") {
    stream = 1;
    per_class = options.train_per_class;
  } else if (split == "test") {
    stream = 2;
    per_class = options.test_per_class;
  } else {
    throw ArgumentError("synthetic shapes: split must be train or test");
  }
  Rng rng = Rng::Derive(options.seed, stream);
  Dataset d;
  d.class_names = options.shapes;
  d.split = std::string(split);
  std::ostringstream prov;
  prov << "synthetic seed=" << options.seed << " points=" << options.points
       << " jitter=" << options.jitter << " per_class=" << per_class;
  d.provenance = prov.str();
  for (std::size_t k = 0; k < per_class; ++k) {
    for (std::size_t c = 0; c < options.shapes.size(); ++c) {
      PointCloud item = SyntheticItem(options.shapes[c], options.points, options.jitter, rng);
      item.label = static_cast<int>(c);
      d.items.push_back(std::move(item));
    }
  }
  return d;
}

Mesh ParseOff(std::string_view text) {
  std::vector<std::vector<std::string>> lines;
  {
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      auto tok = Tokens(StripComment(line));
      if (!tok.empty()) lines.push_back(std::move(tok));
    }
  }
  if (lines.empty() || lines[0][0].rfind("OFF", 0) != 0) throw FormatError("off: missing OFF header");
  std::vector<std::string> counts(lines[0].begin() + 1, lines[0].end());
  if (lines[0][0].size() > 3) counts.insert(counts.begin(), lines[0][0].substr(3));
  std::size_t cursor = 1;
  if (counts.empty()) {
    if (lines.size() < 2) throw FormatError("off: missing counts");
    counts = lines[1];
    cursor = 2;
  }
  if (counts.size() < 2) throw FormatError("off: missing counts");
  const auto nv = ParseNumber<std::size_t>(counts[0], "off");
  const auto nf = ParseNumber<std::size_t>(counts[1], "off");
  if (lines.size() < cursor + nv + nf) throw FormatError("off: file is truncated");
  Mesh mesh;
  for (std::size_t i = 0; i < nv; ++i) {
    const auto& t = lines[cursor + i];
    if (t.size() < 3) throw FormatError("off: vertex needs 3 coordinates");
    Vec3 v{ParseNumber<double>(t[0], "off"), ParseNumber<double>(t[1], "off"),
           ParseNumber<double>(t[2], "off")};
    if (!std::isfinite(v[0]) || !std::isfinite(v[1]) || !std::isfinite(v[2])) {
      throw FormatError("off: non-finite vertex");
    }
    mesh.vertices.push_back(v);
  }
  cursor += nv;
  for (std::size_t f = 0; f < nf; ++f) {
    const auto& t = lines[cursor + f];
    const auto k = ParseNumber<std::size_t>(t[0], "off");
    if (k < 3 || t.size() < k + 1) throw FormatError("off: face needs at least 3 indices");
    std::vector<std::uint32_t> idx;
    for (std::size_t i = 0; i < k; ++i) {
      const auto v = ParseNumber<std::uint32_t>(t[1 + i], "off");
      if (v >= nv) throw FormatError("off: face index out of range");
      idx.push_back(v);
    }
    for (std::size_t i = 1; i + 1 < k; ++i) mesh.triangles.push_back({idx[0], idx[i], idx[i + 1]});
  }
  return mesh;
}

Mesh LoadOff(const std::filesystem::path& path) { return ParseOff(ReadText(path)); }

SurfaceSample SampleSurface(const Mesh& mesh, std::size_t points, Rng& rng) {
  std::vector<double> cumulative;
  double total = 0.0;
  for (const auto& t : mesh.triangles) {
    total += TriangleArea(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    cumulative.push_back(total);
  }
  if (!(total > 0.0)) throw FormatError("mesh has no surface area");
  SurfaceSample out;
  std::vector<Real> coords(3 * points);
  for (std::size_t j = 0; j < points; ++j) {
    const double target = rng.Uniform() * total;
    std::size_t tri = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), target) - cumulative.begin());
    tri = std::min(tri, cumulative.size() - 1);
    const auto& t = mesh.triangles[tri];
    const Vec3 &a = mesh.vertices[t[0]], &b = mesh.vertices[t[1]], &c = mesh.vertices[t[2]];
    const double r1 = std::sqrt(rng.Uniform()), r2 = rng.Uniform();
    const double wa = 1.0 - r1, wb = r1 * (1.0 - r2), wc = r1 * r2;
    SetColumn(coords, points, j,
              {wa * a[0] + wb * b[0] + wc * c[0], wa * a[1] + wb * b[1] + wc * c[1],
               wa * a[2] + wb * b[2] + wc * c[2]});
    out.triangle_ids.push_back(tri);
  }
  out.coords = Tensor({3, points}, std::move(coords));
  return out;
}

Dataset LoadOffCorpus(const std::filesystem::path& root, std::string_view split,
                      std::size_t points, std::uint64_t seed) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw DatasetError("corpus root " + root.string() + " is not a directory");
  std::vector<fs::path> class_dirs;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory()) class_dirs.push_back(e.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end());
  if (class_dirs.empty()) throw DatasetError("corpus " + root.string() + " has no class folders");
  Dataset d;
  d.split = std::string(split);
  d.provenance = "off corpus " + root.string() + " split=" + std::string(split) +
                 " points=" + std::to_string(points) + " seed=" + std::to_string(seed);
  std::uint64_t item_counter = 0;
  for (const fs::path& dir : class_dirs) {
    const fs::path source = fs::is_directory(dir / split) ? dir / split : dir;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(source)) {
      if (e.is_regular_file() && Lower(e.path().extension().string()) == ".off") {
        files.push_back(e.path());
      }
    }
    std::sort(files.begin(), files.end());
    const int label = static_cast<int>(d.class_names.size());
    std::size_t usable = 0;
    for (const fs::path& f : files) {
      Rng rng = Rng::Derive(seed, item_counter++);
      try {
        PointCloud cloud{SampleSurface(LoadOff(f), points, rng).coords, Tensor(), label};
        d.items.push_back(Normalize(cloud));
        ++usable;
      } catch (const FormatError& e) {
        d.warnings.push_back(f.string() + ": " + e.what());
      }
    }
    if (usable == 0) {
      throw DatasetError("class '" + dir.filename().string() + "' has no usable meshes");
    }
    d.class_names.push_back(dir.filename().string());
  }
  return d;
}

PointCloud Augment(const PointCloud& cloud, Rng& rng, double jitter_sigma, double jitter_clip) {
  const double angle = rng.Uniform(0.0, 2.0 * std::numbers::pi);
  const double c = std::cos(angle), s = std::sin(angle);
  const std::array<double, 9> r = {c, 0, s, 0, 1, 0, -s, 0, c};
  PointCloud out = cloud;
  out.coords = Rotate(cloud.coords, r);
  for (Real& v : out.coords.mutable_values()) {
    v += static_cast<Real>(std::clamp(jitter_sigma * rng.Normal(), -jitter_clip, jitter_clip));
  }
  return out;
}

void SaveDataset(const std::filesystem::path& path, const Dataset& dataset) {
  if (dataset.items.empty()) throw DatasetError("cannot save an empty dataset");
  const std::size_t n = dataset.size(), p = dataset.items[0].size();
  const bool attrs = dataset.items[0].has_attrs();
  const std::size_t a = attrs ? dataset.items[0].attrs.dim(0) : 0;
  std::vector<float> coords, features;
  std::vector<std::int64_t> labels;
  for (const PointCloud& c : dataset.items) {
    if (c.size() != p || c.has_attrs() != attrs) throw DatasetError("dataset items differ in shape");
    for (Real v : c.coords.values()) coords.push_back(static_cast<float>(v));
    if (attrs) {
      for (Real v : c.attrs.values()) features.push_back(static_cast<float>(v));
    }
    labels.push_back(c.label.value_or(-1));
  }
  Archive ar;
  ar.PutString("meta/kind", "spcc-dataset");
  ar.PutFloat32("dataset/coords", {n, 3, p}, coords);
  if (attrs) ar.PutFloat32("dataset/attrs", {n, a, p}, features);
  ar.PutInt64("dataset/labels", {n}, labels);
  std::string names;
  for (const std::string& s : dataset.class_names) names += s + "\n";
  ar.PutString("dataset/class_names", names);
  ar.PutString("dataset/split", dataset.split);
  ar.PutString("dataset/provenance", dataset.provenance);
  ar.Save(path);
}

Dataset LoadDataset(const std::filesystem::path& path) {
  const Archive ar = Archive::Load(path);
  if (!ar.Contains("meta/kind") || ar.GetString("meta/kind") != "spcc-dataset") {
    throw FormatError(path.string() + " is not a dataset archive");
  }
  const ArchiveEntry& ce = ar.Get("dataset/coords");
  if (ce.shape.size() != 3 || ce.shape[1] != 3) throw FormatError("dataset coords have a bad shape");
  const std::size_t n = ce.shape[0], p = ce.shape[2];
  const std::vector<double> coords = ar.GetReals("dataset/coords");
  const std::vector<std::int64_t> labels = ar.GetInt64("dataset/labels");
  if (labels.size() != n) throw FormatError("dataset label count mismatch");
  std::vector<double> features;
  std::size_t a = 0;
  if (ar.Contains("dataset/attrs")) {
    a = ar.Get("dataset/attrs").shape.at(1);
    features = ar.GetReals("dataset/attrs");
  }
  Dataset d;
  std::istringstream names(ar.GetString("dataset/class_names"));
  for (std::string line; std::getline(names, line);) d.class_names.push_back(line);
  d.split = ar.GetString("dataset/split");
  d.provenance = ar.GetString("dataset/provenance");
  for (std::size_t i = 0; i < n; ++i) {
    PointCloud c;
    c.coords = Tensor({3, p}, std::vector<Real>(coords.begin() + static_cast<std::ptrdiff_t>(i * 3 * p),
                                                coords.begin() + static_cast<std::ptrdiff_t>((i + 1) * 3 * p)));
    if (a > 0) {
      c.attrs = Tensor({a, p}, std::vector<Real>(features.begin() + static_cast<std::ptrdiff_t>(i * a * p),
                                                 features.begin() + static_cast<std::ptrdiff_t>((i + 1) * a * p)));
    }
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= d.class_names.size()) {
      throw FormatError("dataset label out of range");
    }
    c.label = static_cast<int>(labels[i]);
    d.items.push_back(std::move(c));
  }
  return d;
}

PointCloud ReadPointFile(const std::filesystem::path& path, std::uint64_t seed) {
  const std::string ext = Lower(path.extension().string());
  if (ext == ".off") {
    Rng rng(seed);
    return PointCloud{SampleSurface(LoadOff(path), kDefaultPoints, rng).coords, Tensor(),
                      std::nullopt};
  }
  const std::string text = ReadText(path);
  if (ext == ".ply") return ReadPly(text);
  return ReadXyz(text);
}

PointCloud PrepareCloud(const PointCloud& cloud, std::size_t points, std::uint64_t seed) {
  const std::size_t n = cloud.size();
  if (n == points) return Normalize(cloud);
  Rng rng(seed);
  std::vector<std::size_t> pick(n);
  std::iota(pick.begin(), pick.end(), std::size_t{0});
  if (n > points) {
    // Partial Fisher-Yates, then keep the original order of the survivors.
    for (std::size_t i = 0; i < points; ++i) std::swap(pick[i], pick[i + rng.Index(n - i)]);
    pick.resize(points);
    std::sort(pick.begin(), pick.end());
  } else {
    while (pick.size() < points) pick.push_back(rng.Index(n));
  }
  std::vector<Real> coords(3 * points);
  for (std::size_t j = 0; j < points; ++j) {
    for (std::size_t a = 0; a < 3; ++a) coords[a * points + j] = cloud.coords.values()[a * n + pick[j]];
  }
  PointCloud out{Tensor({3, points}, std::move(coords)), Tensor(), cloud.label};
  return Normalize(out);
}

void WriteXyz(const std::filesystem::path& path, const Tensor& coords) {
  const std::size_t n = coords.dim(1);
  std::string text;
  char buf[96];
  for (std::size_t j = 0; j < n; ++j) {
    const auto v = coords.values();
    std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g\n", static_cast<double>(v[j]),
                  static_cast<double>(v[n + j]), static_cast<double>(v[2 * n + j]));
    text += buf;
  }
  WriteFileBytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void WritePly(const std::filesystem::path& path, const Tensor& coords) {
  const std::size_t n = coords.dim(1);
  std::string text = "ply\nformat ascii 1.0\nelement vertex " + std::to_string(n) +
                     "\nproperty float x\nproperty float y\nproperty float z\nend_header\n";
  char buf[96];
  const auto v = coords.values();
  for (std::size_t j = 0; j < n; ++j) {
    std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g\n", static_cast<double>(v[j]),
                  static_cast<double>(v[n + j]), static_cast<double>(v[2 * n + j]));
    text += buf;
  }
  WriteFileBytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

SPCC_NAMESPACE_END
