// Copyright 2026 The msfdpm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MSFDPM_CONV_H_
#define MSFDPM_CONV_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msfdpm/rng.h"
#include "msfdpm/tensor.h"

namespace msfdpm {

enum class Resample {
  kNone,  // stride 1, same size
  kDown,  // stride 2, halves height and width
  kUp,    // nearest-neighbour x2, then stride-1 convolution
};

std::string to_string(Resample r);
Resample resample_from_string(const std::string& s);

inline constexpr double kLeakySlope = 0.01;

// One convolution with "same" zero padding, optional leaky-ReLU and an
// optional x2 resampling. Kernel layout is (out, in, ky, kx).
class ConvStage {
 public:
  ConvStage(int out_channels, int in_channels, int kernel_size, Resample resample,
            std::optional<double> leaky_slope, std::vector<double> kernel,
            std::vector<double> bias);

  FeatureMap forward(const FeatureMap& input) const;

  int out_channels() const { return out_; }
  int in_channels() const { return in_; }
  int kernel_size() const { return k_; }
  Resample resample() const { return resample_; }
  const std::optional<double>& leaky_slope() const { return slope_; }
  std::span<const double> kernel() const { return kernel_; }
  std::span<const double> bias() const { return bias_; }
  double weight(int o, int i, int ky, int kx) const {
    return kernel_[((static_cast<std::size_t>(o) * in_ + i) * k_ + ky) * k_ + kx];
  }
  std::size_t parameter_count() const { return kernel_.size() + bias_.size(); }

 private:
  int out_;
  int in_;
  int k_;
  Resample resample_;
  std::optional<double> slope_;
  std::vector<double> kernel_;
  std::vector<double> bias_;
  // (ky, kx, in) x out, row-major, matching the im2col row layout.
  std::vector<double> packed_;
};

// He-uniform stage: w = (2u - 1) * sqrt(6 / (in * k * k)) drawn from `rng`
// in (out, in, ky, kx) order and rounded to float; zero bias.
ConvStage random_conv_stage(SplitMix64& rng, int out_channels, int in_channels,
                            int kernel_size, Resample resample,
                            std::optional<double> leaky_slope);
ConvStage zero_conv_stage(int out_channels, int in_channels, int kernel_size,
                          Resample resample, std::optional<double> leaky_slope);

FeatureMap upsample_nearest2x(const FeatureMap& input);
FeatureMap concat_channels(std::span<const FeatureMap* const> parts);
void add_inplace(FeatureMap& target, const FeatureMap& addend);
void leaky_relu_inplace(FeatureMap& map, double slope);

}  // namespace msfdpm

#endif  // MSFDPM_CONV_H_
