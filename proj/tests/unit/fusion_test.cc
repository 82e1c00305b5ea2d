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

#include <gtest/gtest.h>

#include "msfdpm/error.h"
#include "oracles.h"
#include "test_util.h"

namespace msfdpm {
namespace {

using testing::max_abs_diff;
using testing::random_map;

constexpr int kC = 3;

struct Inputs {
  std::array<FeatureMap, 4> main;
  std::array<FeatureMap, 4> aligned;
};

Inputs make_inputs(int height, int width, std::uint64_t seed) {
  Inputs in;
  for (int h = 1; h <= 4; ++h) {
    in.main[h - 1] = random_map(height >> h, width >> h, kC, seed + h);
    in.aligned[h - 1] = random_map(height >> h, width >> h, kC, seed + 10 + h);
  }
  return in;
}

TEST(FusionTest, EveryLevelMatchesNaiveOracle) {
  const FusionWeights w = seeded_fusion_weights(3, kC);
  const Inputs in = make_inputs(32, 48, 1);
  FeatureMap prev;
  for (int h = 4; h >= 1; --h) {
    const FeatureMap* p = h == 4 ? nullptr : &prev;
    const FeatureMap got = fuse_level(h, in.main[h - 1], in.aligned[h - 1], p, w);
    const FeatureMap want = oracle::fuse_level(h, in.main[h - 1], in.aligned[h - 1], p, w);
    EXPECT_LT(max_abs_diff(got, want), 1e-10) << h;
    prev = got;
  }
  const FeatureMap x1 = random_map(32, 48, 3, 77, 0, 1);
  EXPECT_LT(max_abs_diff(reconstruct(prev, x1, w), oracle::reconstruct(prev, x1, w)), 1e-10);
}

TEST(FusionTest, ZeroWeightsZeroInputs) {
  const FusionWeights w = zero_fusion_weights(kC);
  const FeatureMap z4(2, 3, kC);
  const FeatureMap phi4 = fuse_level(4, z4, z4, nullptr, w);
  for (double v : phi4.values()) EXPECT_EQ(v, 0.0);
  const FeatureMap z3(4, 6, kC);
  const FeatureMap phi3 = fuse_level(3, z3, z3, &phi4, w);
  for (double v : phi3.values()) EXPECT_EQ(v, 0.0);
}

TEST(FusionTest, ZeroConvsPassUpsampledPrevThrough) {
  const FusionWeights w = zero_fusion_weights(kC);
  const FeatureMap prev = random_map(2, 3, kC, 5);
  const FeatureMap phi3 =
      fuse_level(3, random_map(4, 6, kC, 1), random_map(4, 6, kC, 2), &prev, w);
  EXPECT_EQ(phi3, upsample_nearest2x(prev));
}

TEST(FusionTest, CoarseToFineOrderIsEnforced) {
  const FusionWeights w = seeded_fusion_weights(1, kC);
  const FeatureMap m4 = random_map(2, 2, kC, 1);
  const FeatureMap m3 = random_map(4, 4, kC, 1);
  EXPECT_THROW(fuse_level(3, m3, m3, nullptr, w), ContractError);
  EXPECT_THROW(fuse_level(4, m4, m4, &m4, w), ContractError);
  EXPECT_THROW(fuse_level(3, m3, m3, &m3, w), GeometryError);
  EXPECT_THROW(fuse_level(0, m3, m3, &m4, w), ConfigError);
}

TEST(ReconstructTest, ZeroHeadPassesFirstStage) {
  FusionWeights w = seeded_fusion_weights(2, kC);
  w.head = zero_fusion_weights(kC).head;
  const FeatureMap x1 = random_map(16, 16, 3, 1, 0, 1);
  EXPECT_EQ(reconstruct(random_map(8, 8, kC, 2), x1, w), x1);
}

TEST(ReconstructTest, ZeroFirstStageGivesHeadOutput) {
  const FusionWeights w = seeded_fusion_weights(2, kC);
  const FeatureMap phi = random_map(8, 8, kC, 2);
  EXPECT_EQ(reconstruct(phi, FeatureMap(16, 16, 3), w), w.head[0].forward(phi));
  EXPECT_THROW(reconstruct(phi, FeatureMap(8, 8, 3), w), GeometryError);
}

TEST(ClampTest, ClampsToUnitInterval) {
  const FeatureMap m(1, 3, 1, std::vector<double>{-0.5, 0.25, 1.5});
  EXPECT_EQ(clamp_unit(m).values()[0], 0.0);
  EXPECT_EQ(clamp_unit(m).values()[1], 0.25);
  EXPECT_EQ(clamp_unit(m).values()[2], 1.0);
}

TEST(FusionWeightsTest, SeededAreDeterministicAndValid) {
  const FusionWeights a = seeded_fusion_weights(4, 2);
  const FusionWeights b = seeded_fusion_weights(4, 2);
  EXPECT_NO_THROW(a.validate());
  EXPECT_TRUE(std::ranges::equal(a.levels[0].second.first().kernel(),
                                 b.levels[0].second.first().kernel()));
  EXPECT_EQ(a.levels[3].first.in_channels(), 4);
  EXPECT_EQ(a.levels[0].first.in_channels(), 6);
  EXPECT_TRUE(a.levels[0].first.skip().has_value());
  EXPECT_FALSE(a.levels[0].second.skip().has_value());
}

}  // namespace
}  // namespace msfdpm
