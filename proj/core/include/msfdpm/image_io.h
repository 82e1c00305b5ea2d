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

#ifndef MSFDPM_IMAGE_IO_H_
#define MSFDPM_IMAGE_IO_H_

#include <filesystem>

#include "msfdpm/tensor.h"

namespace msfdpm {

// Loads an 8-bit PNG or a binary PPM (P6) / PGM (P5) as an H x W x 3 map
// with values in [0, 1]. Gray inputs are replicated to three channels.
FeatureMap load_image(const std::filesystem::path& path);

// Writes a 3-channel map as 8-bit PNG or P6 PPM chosen by extension
// (.png / .ppm). Values are clamped to [0, 1] and rounded.
void save_image(const std::filesystem::path& path, const FeatureMap& image);

struct CropInfo {
  int original_height = 0;
  int original_width = 0;
  int height = 0;
  int width = 0;
  int top = 0;
  int left = 0;
};

// Center crop to the largest dims that are multiples of `multiple`.
FeatureMap center_crop_to_multiple(const FeatureMap& image, int multiple, CropInfo* info = nullptr);

}  // namespace msfdpm

#endif  // MSFDPM_IMAGE_IO_H_
