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

#include "spcc/ops.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "spcc/errors.h"

SPCC_NAMESPACE_BEGIN

namespace {

using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;

void RequireRank(const Tensor& t, std::size_t rank, const char* op, const char* operand) {
  if (!t.defined()) {
    throw ShapeError(std::string(op) + ": operand '" + operand + "' is undefined");
  }
  if (t.rank() != rank) {
    throw ShapeError(std::string(op) + ": operand '" + operand + "' must have rank " +
                     std::to_string(rank) + ", got " + ShapeToString(t.shape()));
  }
}

void RequireSameShape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shapes " + ShapeToString(a.shape()) + " and " +
                     ShapeToString(b.shape()) + " differ");
  }
}

detail::Node& In(detail::Node& self, std::size_t i) { return *self.inputs[i]; }

}  // namespace

Tensor Linear(const Tensor& input, const Tensor& weight, const Tensor& bias) {
  RequireRank(input, 2, "linear", "input");
  RequireRank(weight, 2, "linear", "weight");
  RequireRank(bias, 1, "linear", "bias");
  const std::size_t cin = input.dim(0), n = input.dim(1), cout = weight.dim(0);
  if (weight.dim(1) != cin) {
    throw ShapeError("linear: weight " + ShapeToString(weight.shape()) +
                     " does not match input " + ShapeToString(input.shape()));
  }
  if (bias.dim(0) != cout) {
    throw ShapeError("linear: bias " + ShapeToString(bias.shape()) + " does not match weight " +
                     ShapeToString(weight.shape()));
  }
  const auto ci = static_cast<Eigen::Index>(cin);
  const auto co = static_cast<Eigen::Index>(cout);
  const auto nn = static_cast<Eigen::Index>(n);

  std::vector<Real> out(cout * n);
  MatrixMap y(out.data(), co, nn);
  ConstMatrixMap x(input.values().data(), ci, nn);
  ConstMatrixMap w(weight.values().data(), co, ci);
  Eigen::Map<const Eigen::Matrix<Real, Eigen::Dynamic, 1>> b(bias.values().data(), co);
  y.noalias() = w * x;
  y.colwise() += b;

  return detail::MakeResult({cout, n}, std::move(out), {input, weight, bias},
                            [ci, co, nn](detail::Node& self) {
                              ConstMatrixMap g(self.grad.data(), co, nn);
                              detail::Node& xn = In(self, 0);
                              detail::Node& wn = In(self, 1);
                              detail::Node& bn = In(self, 2);
                              if (xn.requires_grad) {
                                MatrixMap gx(xn.EnsureGrad().data(), ci, nn);
                                ConstMatrixMap w(wn.value.data(), co, ci);
                                gx.noalias() += w.transpose() * g;
                              }
                              if (wn.requires_grad) {
                                MatrixMap gw(wn.EnsureGrad().data(), co, ci);
                                ConstMatrixMap x(xn.value.data(), ci, nn);
                                gw.noalias() += g * x.transpose();
                              }
                              if (bn.requires_grad) {
                                auto& gb = bn.EnsureGrad();
                                for (Eigen::Index o = 0; o < co; ++o) gb[o] += g.row(o).sum();
                              }
                            });
}

Tensor Relu(const Tensor& input) {
  std::vector<Real> out(input.values().begin(), input.values().end());
  for (Real& v : out) v = v < Real(0) ? Real(0) : v;  // NaN passes through
  return detail::MakeResult(input.shape(), std::move(out), {input}, [](detail::Node& self) {
    detail::Node& x = In(self, 0);
    auto& gx = x.EnsureGrad();
    for (std::size_t i = 0; i < gx.size(); ++i) {
      if (x.value[i] > Real(0)) gx[i] += self.grad[i];
    }
  });
}

Tensor BatchNorm(const Tensor& input, const Tensor& scale, const Tensor& shift,
                 Tensor& running_mean, Tensor& running_var, bool training,
                 BatchNormOptions options) {
  RequireRank(input, 2, "batch_norm", "input");
  const std::size_t c = input.dim(0), n = input.dim(1);
  for (const Tensor* t : {&scale, &shift, static_cast<const Tensor*>(&running_mean),
                          static_cast<const Tensor*>(&running_var)}) {
    if (!t->defined() || t->shape() != Shape{c}) {
      throw ShapeError("batch_norm: per-channel state must have shape [" + std::to_string(c) +
                       "]");
    }
  }
  if (training && n < 2) {
    throw ArgumentError("batch_norm: degenerate batch (need at least 2 columns in training)");
  }
  const Real* x = input.values().data();
  const Real* gamma = scale.values().data();
  const Real* beta = shift.values().data();
  std::vector<Real> out(c * n);
  // Normalized values and inverse deviations, kept for the backward pass.
  std::vector<Real> xhat(training ? c * n : 0);
  std::vector<Real> inv_std(c);

  for (std::size_t ch = 0; ch < c; ++ch) {
    const Real* row = x + ch * n;
    double mean, var;
    if (training) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += row[j];
      mean = s / static_cast<double>(n);
      double ss = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double d = row[j] - mean;
        ss += d * d;
      }
      var = ss / static_cast<double>(n);
      auto rm = running_mean.mutable_values();
      auto rv = running_var.mutable_values();
      const double unbiased = ss / static_cast<double>(n - 1);
      rm[ch] = static_cast<Real>((1.0 - options.momentum) * rm[ch] + options.momentum * mean);
      rv[ch] = static_cast<Real>((1.0 - options.momentum) * rv[ch] + options.momentum * unbiased);
    } else {
      mean = running_mean.values()[ch];
      var = running_var.values()[ch];
    }
    const Real istd = static_cast<Real>(1.0 / std::sqrt(var + options.epsilon));
    inv_std[ch] = istd;
    const Real m = static_cast<Real>(mean);
    Real* o = out.data() + ch * n;
    for (std::size_t j = 0; j < n; ++j) {
      const Real h = (row[j] - m) * istd;
      if (training) xhat[ch * n + j] = h;
      o[j] = gamma[ch] * h + beta[ch];
    }
  }

  if (!training) {
    // Running statistics are constants here; only scale, shift and input receive gradient.
    std::vector<Real> centers(running_mean.values().begin(), running_mean.values().end());
    return detail::MakeResult(
        {c, n}, std::move(out), {input, scale, shift},
        [c, n, inv_std = std::move(inv_std), centers = std::move(centers)](detail::Node& self) {
          detail::Node& xn = In(self, 0);
          detail::Node& sn = In(self, 1);
          detail::Node& bn = In(self, 2);
          for (std::size_t ch = 0; ch < c; ++ch) {
            const Real* g = self.grad.data() + ch * n;
            const Real* x = xn.value.data() + ch * n;
            if (xn.requires_grad) {
              Real* gx = xn.EnsureGrad().data() + ch * n;
              const Real k = sn.value[ch] * inv_std[ch];
              for (std::size_t j = 0; j < n; ++j) gx[j] += k * g[j];
            }
            if (sn.requires_grad) {
              double acc = 0.0;
              for (std::size_t j = 0; j < n; ++j) acc += g[j] * (x[j] - centers[ch]) * inv_std[ch];
              sn.EnsureGrad()[ch] += static_cast<Real>(acc);
            }
            if (bn.requires_grad) {
              double acc = 0.0;
              for (std::size_t j = 0; j < n; ++j) acc += g[j];
              bn.EnsureGrad()[ch] += static_cast<Real>(acc);
            }
          }
        });
  }

  return detail::MakeResult(
      {c, n}, std::move(out), {input, scale, shift},
      [c, n, xhat = std::move(xhat), inv_std = std::move(inv_std)](detail::Node& self) {
        detail::Node& xn = In(self, 0);
        detail::Node& sn = In(self, 1);
        detail::Node& bn = In(self, 2);
        for (std::size_t ch = 0; ch < c; ++ch) {
          const Real* g = self.grad.data() + ch * n;
          const Real* h = xhat.data() + ch * n;
          double sum_g = 0.0, sum_gh = 0.0;
          for (std::size_t j = 0; j < n; ++j) {
            sum_g += g[j];
            sum_gh += static_cast<double>(g[j]) * h[j];
          }
          if (sn.requires_grad) sn.EnsureGrad()[ch] += static_cast<Real>(sum_gh);
          if (bn.requires_grad) bn.EnsureGrad()[ch] += static_cast<Real>(sum_g);
          if (xn.requires_grad) {
            Real* gx = xn.EnsureGrad().data() + ch * n;
            const double k = sn.value[ch] * inv_std[ch] / static_cast<double>(n);
            const double dn = static_cast<double>(n);
            for (std::size_t j = 0; j < n; ++j) {
              gx[j] += static_cast<Real>(k * (dn * g[j] - sum_g - h[j] * sum_gh));
            }
          }
        }
      });
}

Tensor MaxPoolGroups(const Tensor& input) {
  RequireRank(input, 3, "max_pool_groups", "input");
  const std::size_t c = input.dim(0), p = input.dim(1), s = input.dim(2);
  if (s == 0) throw ShapeError("max_pool_groups: group size must be at least 1");
  const Real* x = input.values().data();
  std::vector<Real> out(c * p);
  std::vector<std::uint32_t> arg(c * p);
  for (std::size_t k = 0; k < c * p; ++k) {
    const Real* g = x + k * s;
    std::size_t best = 0;
    // A NaN member wins so non-finite features are not silently dropped.
    for (std::size_t j = 1; j < s && !std::isnan(g[best]); ++j) {
      if (g[j] > g[best] || std::isnan(g[j])) best = j;
    }
    out[k] = g[best];
    arg[k] = static_cast<std::uint32_t>(k * s + best);
  }
  return detail::MakeResult({c, p}, std::move(out), {input},
                            [arg = std::move(arg)](detail::Node& self) {
                              auto& gx = In(self, 0).EnsureGrad();
                              for (std::size_t k = 0; k < arg.size(); ++k) {
                                gx[arg[k]] += self.grad[k];
                              }
                            });
}

Tensor Concat(const std::vector<Tensor>& parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat: no parts");
  const Shape& first = parts[0].shape();
  if (axis >= first.size()) throw ShapeError("concat: axis out of range");
  std::size_t outer = 1, inner = 1, total = 0;
  for (std::size_t d = 0; d < axis; ++d) outer *= first[d];
  for (std::size_t d = axis + 1; d < first.size(); ++d) inner *= first[d];
  std::vector<std::size_t> lengths;
  for (const Tensor& t : parts) {
    const Shape& s = t.shape();
    bool ok = s.size() == first.size();
    for (std::size_t d = 0; ok && d < s.size(); ++d) ok = d == axis || s[d] == first[d];
    if (!ok) {
      throw ShapeError("concat: part " + ShapeToString(s) + " disagrees with " +
                       ShapeToString(first) + " off axis " + std::to_string(axis));
    }
    lengths.push_back(s[axis]);
    total += s[axis];
  }
  Shape shape = first;
  shape[axis] = total;
  std::vector<Real> out(outer * total * inner);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const std::size_t block = lengths[k] * inner;
    const Real* src = parts[k].values().data();
    for (std::size_t o = 0; o < outer; ++o) {
      std::copy_n(src + o * block, block, out.data() + o * total * inner + offset);
    }
    offset += block;
  }
  return detail::MakeResult(
      std::move(shape), std::move(out), parts,
      [outer, inner, total, lengths = std::move(lengths)](detail::Node& self) {
        std::size_t offset = 0;
        for (std::size_t k = 0; k < lengths.size(); ++k) {
          const std::size_t block = lengths[k] * inner;
          detail::Node& part = In(self, k);
          if (part.requires_grad) {
            auto& g = part.EnsureGrad();
            for (std::size_t o = 0; o < outer; ++o) {
              const Real* src = self.grad.data() + o * total * inner + offset;
              Real* dst = g.data() + o * block;
              for (std::size_t j = 0; j < block; ++j) dst[j] += src[j];
            }
          }
          offset += block;
        }
      });
}

Tensor Slice(const Tensor& input, std::size_t axis, std::size_t begin, std::size_t length) {
  const Shape& in = input.shape();
  if (axis >= in.size()) throw ShapeError("slice: axis out of range");
  if (begin + length > in[axis]) {
    throw ShapeError("slice: range exceeds axis length of " + ShapeToString(in));
  }
  std::size_t outer = 1, inner = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= in[d];
  for (std::size_t d = axis + 1; d < in.size(); ++d) inner *= in[d];
  const std::size_t src_stride = in[axis] * inner, block = length * inner;
  const std::size_t offset = begin * inner;
  Shape shape = in;
  shape[axis] = length;
  std::vector<Real> out(outer * block);
  const Real* src = input.values().data();
  for (std::size_t o = 0; o < outer; ++o) {
    std::copy_n(src + o * src_stride + offset, block, out.data() + o * block);
  }
  return detail::MakeResult(std::move(shape), std::move(out), {input},
                            [outer, src_stride, block, offset](detail::Node& self) {
                              auto& g = In(self, 0).EnsureGrad();
                              for (std::size_t o = 0; o < outer; ++o) {
                                Real* dst = g.data() + o * src_stride + offset;
                                const Real* src = self.grad.data() + o * block;
                                for (std::size_t j = 0; j < block; ++j) dst[j] += src[j];
                              }
                            });
}

std::vector<Tensor> Split(const Tensor& input, std::span<const std::size_t> sizes,
                          std::size_t axis) {
  if (axis >= input.rank()) throw ShapeError("split: axis out of range");
  const std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  if (total != input.dim(axis)) {
    throw ShapeError("split: sizes sum to " + std::to_string(total) + " but axis has length " +
                     std::to_string(input.dim(axis)));
  }
  std::vector<Tensor> out;
  std::size_t begin = 0;
  for (std::size_t s : sizes) {
    out.push_back(Slice(input, axis, begin, s));
    begin += s;
  }
  return out;
}

Tensor Detach(const Tensor& input) {
  return Tensor(input.shape(), std::vector<Real>(input.values().begin(), input.values().end()));
}

Tensor CrossEntropy(const Tensor& logits, std::span<const int> labels) {
  RequireRank(logits, 2, "cross_entropy", "logits");
  const std::size_t k = logits.dim(0), b = logits.dim(1);
  if (labels.size() != b) throw ShapeError("cross_entropy: one label per column required");
  for (int label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= k) {
      throw ArgumentError("cross_entropy: label " + std::to_string(label) + " outside [0, " +
                          std::to_string(k) + ")");
    }
  }
  const Real* z = logits.values().data();
  std::vector<Real> softmax(k * b);
  double loss = 0.0;
  for (std::size_t col = 0; col < b; ++col) {
    double peak = z[col];
    for (std::size_t r = 1; r < k; ++r) peak = std::max<double>(peak, z[r * b + col]);
    double sum = 0.0;
    for (std::size_t r = 0; r < k; ++r) sum += std::exp(z[r * b + col] - peak);
    const double log_norm = peak + std::log(sum);
    for (std::size_t r = 0; r < k; ++r) {
      softmax[r * b + col] = static_cast<Real>(std::exp(z[r * b + col] - log_norm));
    }
    loss += log_norm - z[static_cast<std::size_t>(labels[col]) * b + col];
  }
  std::vector<int> kept(labels.begin(), labels.end());
  return detail::MakeResult(
      {}, {static_cast<Real>(loss / static_cast<double>(b))}, {logits},
      [k, b, softmax = std::move(softmax), kept = std::move(kept)](detail::Node& self) {
        auto& g = In(self, 0).EnsureGrad();
        const Real scale = self.grad[0] / static_cast<Real>(b);
        for (std::size_t r = 0; r < k; ++r) {
          for (std::size_t col = 0; col < b; ++col) {
            const Real onehot = static_cast<std::size_t>(kept[col]) == r ? Real(1) : Real(0);
            g[r * b + col] += scale * (softmax[r * b + col] - onehot);
          }
        }
      });
}

Tensor Reshape(const Tensor& input, Shape shape) {
  if (NumElements(shape) != input.size()) {
    throw ShapeError("reshape: cannot view " + ShapeToString(input.shape()) + " as " +
                     ShapeToString(shape));
  }
  std::vector<Real> out(input.values().begin(), input.values().end());
  return detail::MakeResult(std::move(shape), std::move(out), {input}, [](detail::Node& self) {
    auto& g = In(self, 0).EnsureGrad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

Tensor GatherColumns(const Tensor& input, std::span<const std::size_t> columns) {
  RequireRank(input, 2, "gather_columns", "input");
  const std::size_t c = input.dim(0), n = input.dim(1), m = columns.size();
  for (std::size_t col : columns) {
    if (col >= n) throw ShapeError("gather_columns: column index out of range");
  }
  const Real* x = input.values().data();
  std::vector<Real> out(c * m);
  for (std::size_t ch = 0; ch < c; ++ch) {
    const Real* row = x + ch * n;
    Real* o = out.data() + ch * m;
    for (std::size_t j = 0; j < m; ++j) o[j] = row[columns[j]];
  }
  std::vector<std::size_t> idx(columns.begin(), columns.end());
  return detail::MakeResult({c, m}, std::move(out), {input},
                            [c, n, m, idx = std::move(idx)](detail::Node& self) {
                              auto& g = In(self, 0).EnsureGrad();
                              for (std::size_t ch = 0; ch < c; ++ch) {
                                Real* row = g.data() + ch * n;
                                const Real* src = self.grad.data() + ch * m;
                                for (std::size_t j = 0; j < m; ++j) row[idx[j]] += src[j];
                              }
                            });
}

Tensor InterleaveGroups(const Tensor& input, std::size_t group_size) {
  RequireRank(input, 2, "interleave_groups", "input");
  const std::size_t rows = input.dim(0), n = input.dim(1), s = group_size;
  if (s == 0 || rows % s != 0) {
    throw ShapeError("interleave_groups: " + std::to_string(rows) +
                     " channels are not a multiple of the group size " + std::to_string(s));
  }
  const std::size_t e = rows / s;
  const Real* x = input.values().data();
  std::vector<Real> out(rows * n);
  for (std::size_t ch = 0; ch < e; ++ch) {
    for (std::size_t k = 0; k < s; ++k) {
      const Real* src = x + (ch * s + k) * n;
      Real* dst = out.data() + ch * n * s + k;
      for (std::size_t j = 0; j < n; ++j) dst[j * s] = src[j];
    }
  }
  return detail::MakeResult({e, n * s}, std::move(out), {input},
                            [e, s, n](detail::Node& self) {
                              auto& g = In(self, 0).EnsureGrad();
                              for (std::size_t ch = 0; ch < e; ++ch) {
                                for (std::size_t k = 0; k < s; ++k) {
                                  Real* dst = g.data() + (ch * s + k) * n;
                                  const Real* src = self.grad.data() + ch * n * s + k;
                                  for (std::size_t j = 0; j < n; ++j) dst[j] += src[j * s];
                                }
                              }
                            });
}

Tensor DeinterleaveGroups(const Tensor& input, std::size_t group_size) {
  RequireRank(input, 2, "deinterleave_groups", "input");
  const std::size_t e = input.dim(0), cols = input.dim(1), s = group_size;
  if (s == 0 || cols % s != 0) {
    throw ShapeError("deinterleave_groups: column count is not a multiple of the group size");
  }
  const std::size_t n = cols / s;
  const Real* x = input.values().data();
  std::vector<Real> out(e * cols);
  for (std::size_t ch = 0; ch < e; ++ch) {
    for (std::size_t k = 0; k < s; ++k) {
      const Real* src = x + ch * cols + k;
      Real* dst = out.data() + (ch * s + k) * n;
      for (std::size_t j = 0; j < n; ++j) dst[j] = src[j * s];
    }
  }
  return detail::MakeResult({e * s, n}, std::move(out), {input},
                            [e, s, n](detail::Node& self) {
                              auto& g = In(self, 0).EnsureGrad();
                              for (std::size_t ch = 0; ch < e; ++ch) {
                                for (std::size_t k = 0; k < s; ++k) {
                                  Real* dst = g.data() + ch * n * s + k;
                                  const Real* src = self.grad.data() + (ch * s + k) * n;
                                  for (std::size_t j = 0; j < n; ++j) dst[j * s] += src[j];
                                }
                              }
                            });
}

Tensor Add(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "add");
  std::vector<Real> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] + b.values()[i];
  return detail::MakeResult(a.shape(), std::move(out), {a, b}, [](detail::Node& self) {
    for (std::size_t k = 0; k < 2; ++k) {
      detail::Node& in = In(self, k);
      if (!in.requires_grad) continue;
      auto& g = in.EnsureGrad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Tensor Sub(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "sub");
  std::vector<Real> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] - b.values()[i];
  return detail::MakeResult(a.shape(), std::move(out), {a, b}, [](detail::Node& self) {
    for (std::size_t k = 0; k < 2; ++k) {
      detail::Node& in = In(self, k);
      if (!in.requires_grad) continue;
      auto& g = in.EnsureGrad();
      const Real sign = k == 0 ? Real(1) : Real(-1);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += sign * self.grad[i];
    }
  });
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "mul");
  std::vector<Real> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] * b.values()[i];
  return detail::MakeResult(a.shape(), std::move(out), {a, b}, [](detail::Node& self) {
    detail::Node& x = In(self, 0);
    detail::Node& y = In(self, 1);
    if (x.requires_grad) {
      auto& g = x.EnsureGrad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * y.value[i];
    }
    if (y.requires_grad) {
      auto& g = y.EnsureGrad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * x.value[i];
    }
  });
}

Tensor Scale(const Tensor& input, Real factor) {
  std::vector<Real> out(input.values().begin(), input.values().end());
  for (Real& v : out) v *= factor;
  return detail::MakeResult(input.shape(), std::move(out), {input},
                            [factor](detail::Node& self) {
                              auto& g = In(self, 0).EnsureGrad();
                              for (std::size_t i = 0; i < g.size(); ++i) {
                                g[i] += factor * self.grad[i];
                              }
                            });
}

Tensor Log(const Tensor& input) {
  std::vector<Real> out(input.values().begin(), input.values().end());
  for (Real& v : out) v = std::log(v);
  return detail::MakeResult(input.shape(), std::move(out), {input}, [](detail::Node& self) {
    detail::Node& x = In(self, 0);
    auto& g = x.EnsureGrad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] / x.value[i];
  });
}

Tensor Sum(const Tensor& input) {
  double s = 0.0;
  for (Real v : input.values()) s += v;
  return detail::MakeResult({}, {static_cast<Real>(s)}, {input}, [](detail::Node& self) {
    auto& g = In(self, 0).EnsureGrad();
    for (Real& v : g) v += self.grad[0];
  });
}

Tensor Mean(const Tensor& input) {
  if (input.size() == 0) throw ShapeError("mean: empty tensor");
  return Scale(Sum(input), Real(1) / static_cast<Real>(input.size()));
}

SPCC_NAMESPACE_END
