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

#include <gtest/gtest.h>

#include <fstream>

#include "msfdpm/error.h"
#include "msfdpm/fmap_io.h"
#include "msfdpm/image_io.h"
#include "msfdpm/weights_io.h"
#include "test_util.h"

namespace msfdpm {
namespace {

using testing::random_map;
using testing::TempDir;

FeatureMap float_exact(FeatureMap m) {
  for (double& v : m.values()) v = static_cast<float>(v);
  return m;
}

TEST(FmapTest, RoundTripIsExactForFloatValues) {
  const FeatureMap m = float_exact(random_map(5, 7, 3, 11));
  EXPECT_EQ(decode_fmap(encode_fmap(m)), m);
}

TEST(FmapTest, HeaderLayout) {
  const std::vector<std::uint8_t> bytes = encode_fmap(FeatureMap(2, 3, 4, 1.0f));
  ASSERT_EQ(bytes.size(), kFmapHeaderBytes + 2 * 3 * 4 * 4);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 5), "FMAP1");
  // Little-endian uint32 dims H, W, C.
  EXPECT_EQ(bytes[5], 2);
  EXPECT_EQ(bytes[9], 3);
  EXPECT_EQ(bytes[13], 4);
  // 1.0f = 0x3F800000
  EXPECT_EQ(bytes[kFmapHeaderBytes + 3], 0x3F);
}

TEST(FmapTest, RejectsCorruptInput) {
  std::vector<std::uint8_t> bytes = encode_fmap(FeatureMap(2, 2, 1, 0.5));
  std::vector<std::uint8_t> bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(decode_fmap(bad_magic), InvalidInputError);
  std::vector<std::uint8_t> truncated(bytes.begin(), bytes.end() - 1);
  EXPECT_THROW(decode_fmap(truncated), InvalidInputError);
  std::vector<std::uint8_t> nan_payload = bytes;
  nan_payload[kFmapHeaderBytes + 3] = 0x7F;
  nan_payload[kFmapHeaderBytes + 2] = 0xC0;
  EXPECT_THROW(decode_fmap(nan_payload), InvalidInputError);
  EXPECT_THROW(read_fmap("/nonexistent/x.fmap"), InvalidInputError);
}

TEST(FmapTest, PyramidBundleRoundTrip) {
  TempDir dir("pyr");
  std::array<FeatureMap, kPyramidLevels> levels = {
      float_exact(random_map(8, 16, 2, 1)), float_exact(random_map(4, 8, 2, 2)),
      float_exact(random_map(2, 4, 2, 3)), float_exact(random_map(1, 2, 2, 4))};
  const FeaturePyramid p(levels);
  write_pyramid_bundle(dir.path() / "b", p);
  EXPECT_EQ(read_pyramid_bundle(dir.path() / "b"), p);
  EXPECT_THROW(read_pyramid_bundle(dir.path()), InvalidInputError);
}

TEST(WeightsBundleTest, RoundTripPreservesForwardPass) {
  TempDir dir("weights");
  const ModelWeights w = seeded_model_weights(5, 4, 0.5);
  write_weights_bundle(dir.path(), w);
  const ModelWeights r = read_weights_bundle(dir.path());
  EXPECT_EQ(r.step, 0.5);
  EXPECT_EQ(r.codec.channels, 4);
  ASSERT_EQ(r.codec.encoder.size(), w.codec.encoder.size());
  for (std::size_t s = 0; s < w.codec.encoder.size(); ++s) {
    const auto a = w.codec.encoder[s].kernel();
    const auto b = r.codec.encoder[s].kernel();
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin(), b.end()));
  }
  const auto a = w.fusion.levels[2].first.skip()->kernel();
  const auto b = r.fusion.levels[2].first.skip()->kernel();
  EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin(), b.end()));
}

TEST(WeightsBundleTest, MissingStageIsConfigError) {
  TempDir dir("weights_missing");
  write_weights_bundle(dir.path(), seeded_model_weights(5, 2));
  std::filesystem::remove(dir.path() / "fusion.head.kernel.fmap");
  EXPECT_ANY_THROW(read_weights_bundle(dir.path()));
}

TEST(ImageIoTest, PpmAndPngRoundTripAt8Bits) {
  TempDir dir("img");
  FeatureMap m = random_map(9, 13, 3, 8, 0.0, 1.0);
  for (double& v : m.values()) v = std::round(v * 255.0) / 255.0;
  for (const char* name : {"a.ppm", "a.png"}) {
    save_image(dir.path() / name, m);
    EXPECT_EQ(load_image(dir.path() / name), m) << name;
  }
  EXPECT_THROW(load_image(dir.path() / "missing.png"), InvalidInputError);
  EXPECT_THROW(load_image(dir.path() / "a.bmp"), InvalidInputError);
}

TEST(ImageIoTest, SixteenBitPgmIsReplicated) {
  TempDir dir("pgm");
  const auto path = dir.path() / "g.pgm";
  {
    std::ofstream f(path, std::ios::binary);
    f << "P5\n# comment\n2 1\n65535\n";
    const unsigned char px[] = {0xFF, 0xFF, 0x00, 0x00};
    f.write(reinterpret_cast<const char*>(px), 4);
  }
  const FeatureMap m = load_image(path);
  ASSERT_EQ(m.channels(), 3);
  EXPECT_EQ(m.at(0, 0, 1), 1.0);
  EXPECT_EQ(m.at(0, 1, 2), 0.0);
}

TEST(ImageIoTest, CenterCrop) {
  const FeatureMap m = random_map(37, 70, 3, 9);
  CropInfo info;
  const FeatureMap c = center_crop_to_multiple(m, 16, &info);
  EXPECT_EQ(c.height(), 32);
  EXPECT_EQ(c.width(), 64);
  EXPECT_EQ(info.top, 2);
  EXPECT_EQ(info.left, 3);
  EXPECT_EQ(c.at(0, 0, 0), m.at(2, 3, 0));
  EXPECT_THROW(center_crop_to_multiple(random_map(8, 64, 3, 1), 16), GeometryError);
}

}  // namespace
}  // namespace msfdpm
