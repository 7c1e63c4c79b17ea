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

#ifndef SPCC_ENTROPY_H_
#define SPCC_ENTROPY_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spcc/nn.h"
#include "spcc/random.h"
#include "spcc/range_coder.h"
#include "spcc/tensor.h"

SPCC_NAMESPACE_BEGIN

inline constexpr double kLikelihoodFloor = 1e-9;

// Per-channel learned cumulative distribution built from a small stack of
// monotone affine stages. Channels are rows of the latent (M x N).
class FactorizedEntropyModel {
 public:
  FactorizedEntropyModel() = default;
  FactorizedEntropyModel(ParameterSet& params, const std::string& name, std::size_t channels,
                         std::span<const int> filters, Rng& rng, double init_scale = 10.0);

  std::size_t channels() const { return channels_; }

  // Probability mass of the unit bin around each value, floored at
  // kLikelihoodFloor. Rows map to channels [offset, offset + rows).
  Tensor Likelihood(const Tensor& y_hat, std::size_t channel_offset = 0) const;
  // Sum of -log2 likelihood; the differentiable rate term.
  Tensor RateBits(const Tensor& y_hat, std::size_t channel_offset = 0) const;
  // Sum over channels of |logit of the CDF at the median|. Gradient flows to
  // the medians only.
  Tensor MedianLoss() const;

  double CumulativeLogit(std::size_t channel, double value) const;
  double Cdf(std::size_t channel, double value) const;
  // Bin mass of value under channel, without the floor.
  double Pmf(std::size_t channel, double value) const;
  std::vector<double> Medians() const;

  // Coding table for symbols relative to the channel median.
  CdfTable BuildTable(std::size_t channel, int min_symbol, int max_symbol) const;
  std::vector<CdfTable> BuildTables(std::size_t begin, std::size_t count, int min_symbol,
                                    int max_symbol) const;

  std::vector<Tensor> Parameters() const;

 private:
  std::size_t channels_ = 0;
  std::vector<int> dims_;  // 1, filters..., 1
  std::vector<Tensor> matrices_;
  std::vector<Tensor> biases_;
  std::vector<Tensor> factors_;
  Tensor medians_;
};

double RoundHalfEven(double value);

// Training surrogate: adds U[-1/2, 1/2) noise; gradient passes unchanged.
Tensor AddUniformNoise(const Tensor& y, Rng& rng);

// Integer symbols round_half_even(y - median) per row. Raises
// NumericalError for non-finite or absurdly large latents.
std::vector<std::int32_t> ToSymbols(const Tensor& y, std::span<const double> medians);
// Symbols plus median, shaped rows x (symbols / rows).
Tensor FromSymbols(std::span<const std::int32_t> symbols, std::size_t rows,
                   std::span<const double> medians);
// Round mode quantization: FromSymbols(ToSymbols(y)). Not differentiable.
Tensor QuantizeRound(const Tensor& y, std::span<const double> medians);

SPCC_NAMESPACE_END

#endif  // SPCC_ENTROPY_H_
