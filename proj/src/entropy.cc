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

#include "spcc/entropy.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "spcc/errors.h"

SPCC_NAMESPACE_BEGIN

namespace {

double Softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }
double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Transformed parameters of every channel in double precision, plus the
// activation trace and gradient accumulators used by the fused ops.
class CdfNetwork {
 public:
  CdfNetwork(const std::vector<int>& dims, const std::vector<Tensor>& matrices,
             const std::vector<Tensor>& biases, const std::vector<Tensor>& factors,
             std::size_t channels)
      : dims_(dims), channels_(channels) {
    const std::size_t layers = dims.size() - 1;
    std::size_t width = 0;
    for (int d : dims) width += static_cast<std::size_t>(d);
    trace_h_.resize(width);
    trace_z_.resize(width);
    dh_.resize(width);
    for (std::size_t k = 0; k < layers; ++k) {
      offset_.push_back(k == 0 ? 0 : offset_.back() + static_cast<std::size_t>(dims[k - 1]));
      std::vector<double> sp, gate;
      for (Real w : matrices[k].values()) {
        sp.push_back(Softplus(w));
        gate.push_back(Sigmoid(w));
      }
      weight_.push_back(std::move(sp));
      weight_gate_.push_back(std::move(gate));
      bias_.emplace_back(biases[k].values().begin(), biases[k].values().end());
      if (k + 1 < layers) {
        std::vector<double> t;
        for (Real a : factors[k].values()) t.push_back(std::tanh(a));
        factor_.push_back(std::move(t));
      }
    }
    offset_.push_back(offset_.back() + static_cast<std::size_t>(dims[layers - 1]));
  }

  std::size_t layers() const { return dims_.size() - 1; }

  // Evaluates the logit for one channel and leaves the trace in place for
  // Backprop.
  double Forward(std::size_t c, double x) {
    trace_h_[0] = x;
    for (std::size_t k = 0; k < layers(); ++k) {
      const std::size_t in = static_cast<std::size_t>(dims_[k]);
      const std::size_t out = static_cast<std::size_t>(dims_[k + 1]);
      const double* w = weight_[k].data() + c * out * in;
      const double* b = bias_[k].data() + c * out;
      const double* h = trace_h_.data() + offset_[k];
      double* next = trace_h_.data() + offset_[k + 1];
      double* z = trace_z_.data() + offset_[k + 1];
      for (std::size_t o = 0; o < out; ++o) {
        double acc = b[o];
        for (std::size_t i = 0; i < in; ++i) acc += w[o * in + i] * h[i];
        z[o] = acc;
        next[o] = k + 1 < layers() ? acc + factor_[k][c * out + o] * std::tanh(acc) : acc;
      }
    }
    return trace_h_[offset_[layers()]];
  }

  struct Grads {
    std::vector<std::vector<double>> weight, bias, factor;
  };

  Grads MakeGrads() const {
    Grads g;
    for (std::size_t k = 0; k < layers(); ++k) {
      g.weight.emplace_back(weight_[k].size(), 0.0);
      g.bias.emplace_back(bias_[k].size(), 0.0);
      if (k + 1 < layers()) g.factor.emplace_back(factor_[k].size(), 0.0);
    }
    return g;
  }

  // Backpropagates dlogit through the trace of the last Forward call.
  // Returns d logit / d x scaled by dlogit.
  double Backprop(std::size_t c, double dlogit, Grads* grads) {
    std::fill(dh_.begin(), dh_.end(), 0.0);
    dh_[offset_[layers()]] = dlogit;
    for (std::size_t k = layers(); k-- > 0;) {
      const std::size_t in = static_cast<std::size_t>(dims_[k]);
      const std::size_t out = static_cast<std::size_t>(dims_[k + 1]);
      const double* w = weight_[k].data() + c * out * in;
      const double* h = trace_h_.data() + offset_[k];
      const double* z = trace_z_.data() + offset_[k + 1];
      const double* dnext = dh_.data() + offset_[k + 1];
      double* dh = dh_.data() + offset_[k];
      for (std::size_t o = 0; o < out; ++o) {
        double dz = dnext[o];
        if (k + 1 < layers()) {
          const double th = std::tanh(z[o]);
          const double t = factor_[k][c * out + o];
          if (grads) grads->factor[k][c * out + o] += dz * th;
          dz *= 1.0 + t * (1.0 - th * th);
        }
        if (grads) {
          grads->bias[k][c * out + o] += dz;
          double* gw = grads->weight[k].data() + c * out * in;
          for (std::size_t i = 0; i < in; ++i) gw[o * in + i] += dz * h[i];
        }
        for (std::size_t i = 0; i < in; ++i) dh[i] += w[o * in + i] * dz;
      }
    }
    return dh_[0];
  }

  // Converts accumulated gradients into raw-parameter gradients.
  void Apply(const Grads& grads, const std::vector<detail::Node*>& matrices,
             const std::vector<detail::Node*>& biases,
             const std::vector<detail::Node*>& factors) const {
    for (std::size_t k = 0; k < layers(); ++k) {
      if (matrices[k]->requires_grad) {
        auto& g = matrices[k]->EnsureGrad();
        for (std::size_t i = 0; i < g.size(); ++i) {
          g[i] += static_cast<Real>(grads.weight[k][i] * weight_gate_[k][i]);
        }
      }
      if (biases[k]->requires_grad) {
        auto& g = biases[k]->EnsureGrad();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += static_cast<Real>(grads.bias[k][i]);
      }
      if (k + 1 < layers() && factors[k]->requires_grad) {
        auto& g = factors[k]->EnsureGrad();
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double t = factor_[k][i];
          g[i] += static_cast<Real>(grads.factor[k][i] * (1.0 - t * t));
        }
      }
    }
  }

 private:
  std::vector<int> dims_;
  std::size_t channels_;
  std::vector<std::size_t> offset_;
  std::vector<std::vector<double>> weight_, weight_gate_, bias_, factor_;
  std::vector<double> trace_h_, trace_z_, dh_;
};

struct BinMass {
  double mass;        // unfloored
  double d_upper;     // d mass / d upper logit
  double d_lower;     // d mass / d lower logit
};

BinMass MassFromLogits(double lower, double upper) {
  // Evaluate on the side of the median where both sigmoids are small.
  const double sign = lower + upper > 0.0 ? -1.0 : 1.0;
  const double diff = Sigmoid(sign * upper) - Sigmoid(sign * lower);
  const double orient = diff * sign >= 0.0 ? 1.0 : -1.0;
  return {std::abs(diff), orient * Sigmoid(upper) * Sigmoid(-upper),
          -orient * Sigmoid(lower) * Sigmoid(-lower)};
}

}  // namespace

FactorizedEntropyModel::FactorizedEntropyModel(ParameterSet& params, const std::string& name,
                                               std::size_t channels,
                                               std::span<const int> filters, Rng& rng,
                                               double init_scale)
    : channels_(channels) {
  if (channels == 0) throw ShapeError("entropy model '" + name + "' needs channels");
  dims_.push_back(1);
  for (int f : filters) {
    if (f < 1) throw ArgumentError("entropy model filters must be positive");
    dims_.push_back(f);
  }
  dims_.push_back(1);
  const std::size_t layers = dims_.size() - 1;
  const double scale = std::pow(init_scale, 1.0 / static_cast<double>(layers));
  for (std::size_t k = 0; k < layers; ++k) {
    const std::size_t in = static_cast<std::size_t>(dims_[k]);
    const std::size_t out = static_cast<std::size_t>(dims_[k + 1]);
    const double init = std::log(std::expm1(1.0 / scale / static_cast<double>(out)));
    const std::string prefix = name + "/layer" + std::to_string(k);
    matrices_.push_back(params.Add(prefix + "/matrix",
                                   Tensor::Full({channels, out, in}, static_cast<Real>(init))));
    std::vector<Real> b(channels * out);
    for (Real& v : b) v = static_cast<Real>(rng.Uniform(-0.5, 0.5));
    biases_.push_back(params.Add(prefix + "/bias", Tensor({channels, out}, std::move(b))));
    if (k + 1 < layers) {
      factors_.push_back(params.Add(prefix + "/factor", Tensor::Zeros({channels, out})));
    }
  }
  // Start each median at the root of the initial cumulative logit.
  std::vector<Real> medians(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    double lo = -1.0, hi = 1.0;
    while (CumulativeLogit(c, lo) > 0.0 && lo > -1e6) lo *= 2.0;
    while (CumulativeLogit(c, hi) < 0.0 && hi < 1e6) hi *= 2.0;
    for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
      const double mid = 0.5 * (lo + hi);
      (CumulativeLogit(c, mid) < 0.0 ? lo : hi) = mid;
    }
    medians[c] = static_cast<Real>(0.5 * (lo + hi));
  }
  medians_ = params.Add(name + "/median", Tensor({channels}, std::move(medians)));
}

std::vector<Tensor> FactorizedEntropyModel::Parameters() const {
  std::vector<Tensor> out;
  for (const auto* list : {&matrices_, &biases_, &factors_}) {
    out.insert(out.end(), list->begin(), list->end());
  }
  out.push_back(medians_);
  return out;
}

double FactorizedEntropyModel::CumulativeLogit(std::size_t channel, double value) const {
  if (channel >= channels_) throw ArgumentError("entropy model: channel out of range");
  CdfNetwork net(dims_, matrices_, biases_, factors_, channels_);
  return net.Forward(channel, value);
}

double FactorizedEntropyModel::Cdf(std::size_t channel, double value) const {
  return Sigmoid(CumulativeLogit(channel, value));
}

double FactorizedEntropyModel::Pmf(std::size_t channel, double value) const {
  if (channel >= channels_) throw ArgumentError("entropy model: channel out of range");
  CdfNetwork net(dims_, matrices_, biases_, factors_, channels_);
  const double lower = net.Forward(channel, value - 0.5);
  const double upper = net.Forward(channel, value + 0.5);
  return MassFromLogits(lower, upper).mass;
}

std::vector<double> FactorizedEntropyModel::Medians() const {
  return std::vector<double>(medians_.values().begin(), medians_.values().end());
}

namespace {

enum class FusedOutput { kLikelihood, kBits };

Tensor FusedLikelihood(const Tensor& y_hat, std::size_t offset, std::size_t channels,
                              const std::vector<int>& dims, const std::vector<Tensor>& matrices,
                              const std::vector<Tensor>& biases,
                              const std::vector<Tensor>& factors, FusedOutput output) {
  if (y_hat.rank() != 2) throw ShapeError("likelihood: latent must be M x N");
  const std::size_t rows = y_hat.dim(0), n = y_hat.dim(1);
  if (offset + rows > channels) {
    throw ShapeError("likelihood: latent has more rows than the model has channels");
  }
  CdfNetwork net(dims, matrices, biases, factors, channels);
  const auto y = y_hat.values();
  std::vector<Real> probs(rows * n);
  double bits = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = y[r * n + j];
      const double lower = net.Forward(offset + r, v - 0.5);
      const double upper = net.Forward(offset + r, v + 0.5);
      const double p = std::max(MassFromLogits(lower, upper).mass, kLikelihoodFloor);
      probs[r * n + j] = static_cast<Real>(p);
      bits -= std::log2(p);
    }
  }
  std::vector<Tensor> inputs{y_hat};
  inputs.insert(inputs.end(), matrices.begin(), matrices.end());
  inputs.insert(inputs.end(), biases.begin(), biases.end());
  inputs.insert(inputs.end(), factors.begin(), factors.end());
  const std::size_t layers = dims.size() - 1;
  auto backward = [offset, rows, n, channels, dims, layers, output](detail::Node& self) {
    std::vector<Tensor> m, b, f;
    std::vector<detail::Node*> mn, bn, fn;
    for (std::size_t k = 0; k < layers; ++k) {
      m.push_back(Tensor::FromNode(self.inputs[1 + k]));
      mn.push_back(self.inputs[1 + k].get());
      b.push_back(Tensor::FromNode(self.inputs[1 + layers + k]));
      bn.push_back(self.inputs[1 + layers + k].get());
      if (k + 1 < layers) {
        f.push_back(Tensor::FromNode(self.inputs[1 + 2 * layers + k]));
        fn.push_back(self.inputs[1 + 2 * layers + k].get());
      }
    }
    CdfNetwork net(dims, m, b, f, channels);
    CdfNetwork::Grads grads = net.MakeGrads();
    detail::Node& yn = *self.inputs[0];
    std::vector<Real>* gy = yn.requires_grad ? &yn.EnsureGrad() : nullptr;
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t c = offset + r;
      for (std::size_t j = 0; j < n; ++j) {
        const double v = yn.value[r * n + j];
        const double lower = net.Forward(c, v - 0.5);
        const double upper = net.Forward(c, v + 0.5);
        const BinMass bm = MassFromLogits(lower, upper);
        if (bm.mass < kLikelihoodFloor) continue;
        double dmass;
        if (output == FusedOutput::kBits) {
          dmass = -self.grad[0] / (bm.mass * std::numbers::ln2);
        } else {
          dmass = self.grad[r * n + j];
        }
        if (dmass == 0.0) continue;
        double dx = net.Backprop(c, dmass * bm.d_upper, &grads);
        net.Forward(c, v - 0.5);
        dx += net.Backprop(c, dmass * bm.d_lower, &grads);
        if (gy) (*gy)[r * n + j] += static_cast<Real>(dx);
      }
    }
    net.Apply(grads, mn, bn, fn);
  };
  if (output == FusedOutput::kBits) {
    return detail::MakeResult({}, {static_cast<Real>(bits)}, inputs, backward);
  }
  return detail::MakeResult({rows, n}, std::move(probs), inputs, backward);
}

}  // namespace

Tensor FactorizedEntropyModel::Likelihood(const Tensor& y_hat, std::size_t channel_offset) const {
  return FusedLikelihood(y_hat, channel_offset, channels_, dims_, matrices_, biases_, factors_,
                         FusedOutput::kLikelihood);
}

Tensor FactorizedEntropyModel::RateBits(const Tensor& y_hat, std::size_t channel_offset) const {
  return FusedLikelihood(y_hat, channel_offset, channels_, dims_, matrices_, biases_, factors_,
                         FusedOutput::kBits);
}

Tensor FactorizedEntropyModel::MedianLoss() const {
  CdfNetwork net(dims_, matrices_, biases_, factors_, channels_);
  double total = 0.0;
  for (std::size_t c = 0; c < channels_; ++c) {
    total += std::abs(net.Forward(c, medians_.values()[c]));
  }
  auto dims = dims_;
  auto matrices = matrices_, biases = biases_, factors = factors_;
  const std::size_t channels = channels_;
  return detail::MakeResult(
      {}, {static_cast<Real>(total)}, {medians_},
      [dims, matrices, biases, factors, channels](detail::Node& self) {
        CdfNetwork net(dims, matrices, biases, factors, channels);
        auto& g = self.inputs[0]->EnsureGrad();
        for (std::size_t c = 0; c < channels; ++c) {
          const double logit = net.Forward(c, self.inputs[0]->value[c]);
          const double sign = logit > 0.0 ? 1.0 : (logit < 0.0 ? -1.0 : 0.0);
          g[c] += static_cast<Real>(net.Backprop(c, sign * self.grad[0], nullptr));
        }
      });
}

CdfTable FactorizedEntropyModel::BuildTable(std::size_t channel, int min_symbol,
                                            int max_symbol) const {
  if (channel >= channels_) throw ArgumentError("entropy model: channel out of range");
  if (min_symbol > max_symbol) throw ArgumentError("entropy model: empty symbol range");
  CdfNetwork net(dims_, matrices_, biases_, factors_, channels_);
  const double median = medians_.values()[channel];
  std::vector<double> edges;
  for (int s = min_symbol; s <= max_symbol + 1; ++s) {
    edges.push_back(net.Forward(channel, median + s - 0.5));
  }
  std::vector<double> probs;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    probs.push_back(MassFromLogits(edges[i], edges[i + 1]).mass);
  }
  // Tail mass on both sides goes to the escape slot.
  const double tails = Sigmoid(edges.front()) + Sigmoid(-edges.back());
  return CdfTable::FromProbabilities(probs, tails, min_symbol);
}

std::vector<CdfTable> FactorizedEntropyModel::BuildTables(std::size_t begin, std::size_t count,
                                                          int min_symbol, int max_symbol) const {
  std::vector<CdfTable> tables;
  for (std::size_t c = begin; c < begin + count; ++c) {
    tables.push_back(BuildTable(c, min_symbol, max_symbol));
  }
  return tables;
}

double RoundHalfEven(double value) {
  const double r = std::round(value);
  if (std::abs(value - std::trunc(value)) == 0.5) return 2.0 * std::round(value / 2.0);
  return r;
}

Tensor AddUniformNoise(const Tensor& y, Rng& rng) {
  std::vector<Real> out(y.values().begin(), y.values().end());
  for (Real& v : out) v += static_cast<Real>(rng.Uniform() - 0.5);
  return detail::MakeResult(y.shape(), std::move(out), {y}, [](detail::Node& self) {
    auto& g = self.inputs[0]->EnsureGrad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

std::vector<std::int32_t> ToSymbols(const Tensor& y, std::span<const double> medians) {
  if (y.rank() != 2 || y.dim(0) != medians.size()) {
    throw ShapeError("quantize: one median per latent row required");
  }
  const std::size_t rows = y.dim(0), n = y.dim(1);
  std::vector<std::int32_t> symbols(rows * n);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < n; ++j) {
      const double q = RoundHalfEven(static_cast<double>(y.values()[r * n + j]) - medians[r]);
      if (!std::isfinite(q) || std::abs(q) > 1e9) {
        throw NumericalError("quantize: latent value is not finite or out of range");
      }
      symbols[r * n + j] = static_cast<std::int32_t>(q);
    }
  }
  return symbols;
}

Tensor FromSymbols(std::span<const std::int32_t> symbols, std::size_t rows,
                   std::span<const double> medians) {
  if (rows == 0 || symbols.size() % rows != 0 || medians.size() != rows) {
    throw ShapeError("dequantize: symbols do not fill the requested rows");
  }
  const std::size_t n = symbols.size() / rows;
  std::vector<Real> out(symbols.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < n; ++j) {
      out[r * n + j] = static_cast<Real>(symbols[r * n + j] + medians[r]);
    }
  }
  return Tensor({rows, n}, std::move(out));
}

Tensor QuantizeRound(const Tensor& y, std::span<const double> medians) {
  return FromSymbols(ToSymbols(y, medians), y.dim(0), medians);
}

SPCC_NAMESPACE_END
