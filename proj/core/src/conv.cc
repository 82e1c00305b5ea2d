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

#include "msfdpm/conv.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <utility>

#include "msfdpm/error.h"
#include "msfdpm/parallel.h"

namespace msfdpm {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

std::string to_string(Resample r) {
  switch (r) {
    case Resample::kNone:
      return "none";
    case Resample::kDown:
      return "down";
    case Resample::kUp:
      return "up";
  }
  return "none";
}

Resample resample_from_string(const std::string& s) {
  if (s == "none") return Resample::kNone;
  if (s == "down") return Resample::kDown;
  if (s == "up") return Resample::kUp;
  throw ConfigError("unknown resample mode '" + s + "'");
}

ConvStage::ConvStage(int out_channels, int in_channels, int kernel_size, Resample resample,
                     std::optional<double> leaky_slope, std::vector<double> kernel,
                     std::vector<double> bias)
    : out_(out_channels),
      in_(in_channels),
      k_(kernel_size),
      resample_(resample),
      slope_(leaky_slope),
      kernel_(std::move(kernel)),
      bias_(std::move(bias)) {
  if (out_ <= 0 || in_ <= 0) throw ConfigError("conv channel counts must be positive");
  if (k_ <= 0 || k_ % 2 == 0) throw ConfigError("conv kernel size must be odd and positive");
  if (kernel_.size() != static_cast<std::size_t>(out_) * in_ * k_ * k_) {
    throw ConfigError("conv kernel holds " + std::to_string(kernel_.size()) +
                      " values, shape needs " + std::to_string(out_ * in_ * k_ * k_));
  }
  if (bias_.size() != static_cast<std::size_t>(out_)) {
    throw ConfigError("conv bias length " + std::to_string(bias_.size()) +
                      " != out channels " + std::to_string(out_));
  }
  packed_.resize(kernel_.size());
  for (int o = 0; o < out_; ++o) {
    for (int i = 0; i < in_; ++i) {
      for (int ky = 0; ky < k_; ++ky) {
        for (int kx = 0; kx < k_; ++kx) {
          const std::size_t row = (static_cast<std::size_t>(ky) * k_ + kx) * in_ + i;
          packed_[row * out_ + o] = weight(o, i, ky, kx);
        }
      }
    }
  }
}

FeatureMap ConvStage::forward(const FeatureMap& input) const {
  if (input.channels() != in_) {
    throw InvalidInputError("conv expects " + std::to_string(in_) + " input channels, got " +
                            std::to_string(input.channels()));
  }
  FeatureMap upsampled;
  const FeatureMap* src = &input;
  if (resample_ == Resample::kUp) {
    upsampled = upsample_nearest2x(input);
    src = &upsampled;
  }
  const int stride = resample_ == Resample::kDown ? 2 : 1;
  if (resample_ == Resample::kDown && (src->height() % 2 != 0 || src->width() % 2 != 0)) {
    throw GeometryError("strided conv needs even input dims");
  }
  const int out_h = src->height() / stride;
  const int out_w = src->width() / stride;
  const int pad = k_ / 2;
  const int patch_len = k_ * k_ * in_;

  FeatureMap output(out_h, out_w, out_);
  const Eigen::Map<const RowMatrix> weights(packed_.data(), patch_len, out_);
  const Eigen::Map<const Eigen::RowVectorXd> bias(bias_.data(), out_);

  parallel_for(static_cast<std::size_t>(out_h), [&](std::size_t y_index) {
    const int y = static_cast<int>(y_index);
    RowMatrix cols = RowMatrix::Zero(out_w, patch_len);
    for (int x = 0; x < out_w; ++x) {
      double* dst = cols.row(x).data();
      for (int ky = 0; ky < k_; ++ky) {
        const int sy = y * stride + ky - pad;
        if (sy < 0 || sy >= src->height()) continue;
        for (int kx = 0; kx < k_; ++kx) {
          const int sx = x * stride + kx - pad;
          if (sx < 0 || sx >= src->width()) continue;
          const double* px = src->row(sy) + static_cast<std::size_t>(sx) * in_;
          std::copy_n(px, in_, dst + (ky * k_ + kx) * in_);
        }
      }
    }
    Eigen::Map<RowMatrix> out_row(output.row(y), out_w, out_);
    out_row.noalias() = cols * weights;
    out_row.rowwise() += bias;
    if (slope_) {
      const double s = *slope_;
      for (double& v : std::span<double>(output.row(y), static_cast<std::size_t>(out_w) * out_)) {
        if (v < 0) v *= s;
      }
    }
  });
  return output;
}

ConvStage random_conv_stage(SplitMix64& rng, int out_channels, int in_channels,
                            int kernel_size, Resample resample,
                            std::optional<double> leaky_slope) {
  const double limit = std::sqrt(6.0 / (in_channels * kernel_size * kernel_size));
  std::vector<double> kernel(static_cast<std::size_t>(out_channels) * in_channels *
                             kernel_size * kernel_size);
  for (double& w : kernel) w = static_cast<float>(rng.symmetric() * limit);
  return ConvStage(out_channels, in_channels, kernel_size, resample, leaky_slope,
                   std::move(kernel), std::vector<double>(out_channels, 0.0));
}

ConvStage zero_conv_stage(int out_channels, int in_channels, int kernel_size,
                          Resample resample, std::optional<double> leaky_slope) {
  return ConvStage(out_channels, in_channels, kernel_size, resample, leaky_slope,
                   std::vector<double>(static_cast<std::size_t>(out_channels) * in_channels *
                                       kernel_size * kernel_size),
                   std::vector<double>(out_channels, 0.0));
}

FeatureMap upsample_nearest2x(const FeatureMap& input) {
  FeatureMap out(2 * input.height(), 2 * input.width(), input.channels());
  const int c = input.channels();
  for (int y = 0; y < out.height(); ++y) {
    const double* src = input.row(y / 2);
    double* dst = out.row(y);
    for (int x = 0; x < out.width(); ++x) {
      std::copy_n(src + static_cast<std::size_t>(x / 2) * c, c, dst + static_cast<std::size_t>(x) * c);
    }
  }
  return out;
}

FeatureMap concat_channels(std::span<const FeatureMap* const> parts) {
  if (parts.empty()) throw InvalidInputError("concat of zero maps");
  const int h = parts[0]->height();
  const int w = parts[0]->width();
  int channels = 0;
  for (const FeatureMap* p : parts) {
    if (p->height() != h || p->width() != w) {
      throw GeometryError("concat operands differ in spatial size");
    }
    channels += p->channels();
  }
  FeatureMap out(h, w, channels);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double* dst = out.row(y) + static_cast<std::size_t>(x) * channels;
      for (const FeatureMap* p : parts) {
        dst = std::copy_n(p->row(y) + static_cast<std::size_t>(x) * p->channels(),
                          p->channels(), dst);
      }
    }
  }
  return out;
}

void add_inplace(FeatureMap& target, const FeatureMap& addend) {
  if (!target.same_shape(addend)) throw GeometryError("elementwise add of mismatched maps");
  auto t = target.values();
  auto a = addend.values();
  for (std::size_t n = 0; n < t.size(); ++n) t[n] += a[n];
}

void leaky_relu_inplace(FeatureMap& map, double slope) {
  for (double& v : map.values()) {
    if (v < 0) v *= slope;
  }
}

}  // namespace msfdpm
