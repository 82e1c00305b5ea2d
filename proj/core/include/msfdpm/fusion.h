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

#ifndef MSFDPM_FUSION_H_
#define MSFDPM_FUSION_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "msfdpm/conv.h"
#include "msfdpm/tensor.h"

namespace msfdpm {

inline constexpr int kFusionKernel = 3;

// conv3x3 -> leaky -> conv3x3 -> leaky, plus the input (through a 1x1
// projection when the channel count changes).
class ResidualBlock {
 public:
  ResidualBlock(ConvStage first, ConvStage second, std::optional<ConvStage> skip);

  FeatureMap forward(const FeatureMap& input) const;

  const ConvStage& first() const { return first_; }
  const ConvStage& second() const { return second_; }
  const std::optional<ConvStage>& skip() const { return skip_; }
  int in_channels() const { return first_.in_channels(); }
  int out_channels() const { return second_.out_channels(); }

 private:
  ConvStage first_;
  ConvStage second_;
  std::optional<ConvStage> skip_;
};

struct FusionLevelWeights {
  ResidualBlock first;
  ResidualBlock second;
};

// Per-level fusion blocks (index h - 1) and the C -> 3 image head that
// upsamples phi^1 from H/2 to H.
struct FusionWeights {
  int channels = 0;
  std::vector<FusionLevelWeights> levels;
  std::vector<ConvStage> head;  // exactly one stage
  std::string provenance;

  void validate() const;
};

// Values drawn like random_conv_stage, in the order level 4..1 (block 1
// conv1, conv2, skip, block 2 conv1, conv2), then the head.
FusionWeights seeded_fusion_weights(std::uint64_t seed, int channels);
FusionWeights zero_fusion_weights(int channels);

// phi^4 = Res2(Res1([main, aligned]))
// phi^h = Res2(Res1([main, aligned, up(prev)]) + up(prev)),  h = 3, 2, 1
// `prev` must be phi^(h+1) for h < 4 and absent for h == 4.
FeatureMap fuse_level(int level, const FeatureMap& main_h, const FeatureMap& aligned_h,
                      const FeatureMap* prev, const FusionWeights& weights);

// Runs fuse_level from h = 4 down to h = 1 and returns phi^1.
FeatureMap fuse_all(const FeaturePyramid& main, const FeaturePyramid& aligned,
                    const FusionWeights& weights);

// Second-stage image head(phi^1) + x_hat_1, unclamped.
FeatureMap reconstruct(const FeatureMap& phi1, const FeatureMap& x_hat_1,
                       const FusionWeights& weights);

// Clamp to [0, 1]; applied once when an image leaves the pipeline.
FeatureMap clamp_unit(const FeatureMap& image);

}  // namespace msfdpm

#endif  // MSFDPM_FUSION_H_
