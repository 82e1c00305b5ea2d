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

#include "msfdpm/fusion.h"

#include <algorithm>
#include <utility>

#include "msfdpm/error.h"
#include "msfdpm/extractor.h"
#include "msfdpm/rng.h"

namespace msfdpm {
namespace {

ResidualBlock make_block(int in, int out, bool zero, SplitMix64* rng) {
  auto conv = [&](int o, int i, int k, std::optional<double> slope) {
    return zero ? zero_conv_stage(o, i, k, Resample::kNone, slope)
                : random_conv_stage(*rng, o, i, k, Resample::kNone, slope);
  };
  ConvStage first = conv(out, in, kFusionKernel, kLeakySlope);
  ConvStage second = conv(out, out, kFusionKernel, kLeakySlope);
  std::optional<ConvStage> skip;
  if (in != out) skip = conv(out, in, 1, std::nullopt);
  return ResidualBlock(std::move(first), std::move(second), std::move(skip));
}

FusionWeights make_weights(int channels, bool zero, SplitMix64* rng) {
  if (channels < 1) throw ConfigError("channel count must be at least 1");
  FusionWeights w;
  w.channels = channels;
  std::vector<std::optional<FusionLevelWeights>> by_level(kPyramidLevels);
  for (int h = kPyramidLevels; h >= 1; --h) {
    const int in = (h == kPyramidLevels ? 2 : 3) * channels;
    ResidualBlock first = make_block(in, channels, zero, rng);
    ResidualBlock second = make_block(channels, channels, zero, rng);
    by_level[h - 1].emplace(FusionLevelWeights{std::move(first), std::move(second)});
  }
  for (auto& level : by_level) w.levels.push_back(std::move(*level));
  w.head.push_back(zero ? zero_conv_stage(kImageChannels, channels, kFusionKernel,
                                          Resample::kUp, std::nullopt)
                        : random_conv_stage(*rng, kImageChannels, channels, kFusionKernel,
                                            Resample::kUp, std::nullopt));
  return w;
}

}  // namespace

ResidualBlock::ResidualBlock(ConvStage first, ConvStage second, std::optional<ConvStage> skip)
    : first_(std::move(first)), second_(std::move(second)), skip_(std::move(skip)) {
  if (first_.out_channels() != second_.in_channels() ||
      first_.resample() != Resample::kNone || second_.resample() != Resample::kNone) {
    throw ConfigError("residual block convolutions do not chain");
  }
  const int in = first_.in_channels();
  const int out = second_.out_channels();
  if (in != out && !skip_) throw ConfigError("residual block changing channels needs a skip");
  if (skip_ && (skip_->in_channels() != in || skip_->out_channels() != out ||
                skip_->resample() != Resample::kNone || skip_->leaky_slope())) {
    throw ConfigError("residual skip projection has the wrong shape");
  }
}

FeatureMap ResidualBlock::forward(const FeatureMap& input) const {
  FeatureMap out = second_.forward(first_.forward(input));
  add_inplace(out, skip_ ? skip_->forward(input) : input);
  return out;
}

void FusionWeights::validate() const {
  if (channels <= 0) throw ConfigError("fusion channel count must be positive");
  if (levels.size() != kPyramidLevels || head.size() != 1) {
    throw ConfigError("fusion weights need 4 levels and one head");
  }
  for (int h = 1; h <= kPyramidLevels; ++h) {
    const auto& lw = levels[h - 1];
    const int in = (h == kPyramidLevels ? 2 : 3) * channels;
    if (lw.first.in_channels() != in || lw.first.out_channels() != channels ||
        lw.second.in_channels() != channels || lw.second.out_channels() != channels) {
      throw ConfigError("fusion level " + std::to_string(h) + " blocks have wrong channels");
    }
  }
  const ConvStage& hd = head[0];
  if (hd.in_channels() != channels || hd.out_channels() != kImageChannels ||
      hd.resample() != Resample::kUp) {
    throw ConfigError("fusion head must map C channels to 3 with x2 upsampling");
  }
}

FusionWeights seeded_fusion_weights(std::uint64_t seed, int channels) {
  SplitMix64 rng(seed);
  FusionWeights w = make_weights(channels, false, &rng);
  w.provenance = "seed:" + std::to_string(seed);
  return w;
}

FusionWeights zero_fusion_weights(int channels) {
  FusionWeights w = make_weights(channels, true, nullptr);
  w.provenance = "zero";
  return w;
}

FeatureMap fuse_level(int level, const FeatureMap& main_h, const FeatureMap& aligned_h,
                      const FeatureMap* prev, const FusionWeights& weights) {
  if (level < 1 || level > kPyramidLevels) {
    throw ConfigError("fusion level " + std::to_string(level) + " outside 1..4");
  }
  if (level == kPyramidLevels && prev) {
    throw ContractError("fusion level 4 starts the recursion and takes no previous output");
  }
  if (level < kPyramidLevels && !prev) {
    throw ContractError("fusion level " + std::to_string(level) +
                        " needs the output of level " + std::to_string(level + 1));
  }
  if (!main_h.same_shape(aligned_h) || main_h.channels() != weights.channels) {
    throw GeometryError("fusion inputs at level " + std::to_string(level) +
                        " differ in shape or channel count");
  }
  const FusionLevelWeights& lw = weights.levels.at(level - 1);
  if (!prev) {
    const FeatureMap* parts[] = {&main_h, &aligned_h};
    return lw.second.forward(lw.first.forward(concat_channels(parts)));
  }
  if (2 * prev->height() != main_h.height() || 2 * prev->width() != main_h.width() ||
      prev->channels() != weights.channels) {
    throw GeometryError("previous fusion output does not sit one level below");
  }
  const FeatureMap up = upsample_nearest2x(*prev);
  const FeatureMap* parts[] = {&main_h, &aligned_h, &up};
  FeatureMap inner = lw.first.forward(concat_channels(parts));
  add_inplace(inner, up);
  return lw.second.forward(inner);
}

FeatureMap fuse_all(const FeaturePyramid& main, const FeaturePyramid& aligned,
                    const FusionWeights& weights) {
  weights.validate();
  FeatureMap phi = fuse_level(kPyramidLevels, main.level(kPyramidLevels),
                              aligned.level(kPyramidLevels), nullptr, weights);
  for (int h = kPyramidLevels - 1; h >= 1; --h) {
    phi = fuse_level(h, main.level(h), aligned.level(h), &phi, weights);
  }
  return phi;
}

FeatureMap reconstruct(const FeatureMap& phi1, const FeatureMap& x_hat_1,
                       const FusionWeights& weights) {
  weights.validate();
  if (x_hat_1.channels() != kImageChannels || 2 * phi1.height() != x_hat_1.height() ||
      2 * phi1.width() != x_hat_1.width()) {
    throw GeometryError("phi^1 must be half the size of the first-stage image");
  }
  FeatureMap out = weights.head[0].forward(phi1);
  add_inplace(out, x_hat_1);
  return out;
}

FeatureMap clamp_unit(const FeatureMap& image) {
  FeatureMap out = image;
  for (double& v : out.values()) v = std::clamp(v, 0.0, 1.0);
  return out;
}

}  // namespace msfdpm
