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

#ifndef MSFDPM_FMAP_IO_H_
#define MSFDPM_FMAP_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "msfdpm/tensor.h"

namespace msfdpm {

// FMAP1 container: the five magic bytes "FMAP1", then height, width and
// channels as little-endian uint32, then height * width * channels
// little-endian IEEE-754 binary32 values in (row, column, channel) order.
// Values are narrowed to float on encode.
inline constexpr char kFmapMagic[5] = {'F', 'M', 'A', 'P', '1'};
inline constexpr std::size_t kFmapHeaderBytes = 5 + 3 * 4;

std::vector<std::uint8_t> encode_fmap(const FeatureMap& map);
// Throws InvalidInputError on a bad magic, zero dims, a size mismatch or a
// non-finite value.
FeatureMap decode_fmap(std::span<const std::uint8_t> bytes);

void write_fmap(const std::filesystem::path& path, const FeatureMap& map);
FeatureMap read_fmap(const std::filesystem::path& path);

// Pyramid bundle: a directory holding manifest.json plus level1..4.fmap.
void write_pyramid_bundle(const std::filesystem::path& dir, const FeaturePyramid& pyramid);
FeaturePyramid read_pyramid_bundle(const std::filesystem::path& dir);

}  // namespace msfdpm

#endif  // MSFDPM_FMAP_IO_H_
