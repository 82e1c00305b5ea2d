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

#include "msfdpm/tensor.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "msfdpm/error.h"

namespace msfdpm {
namespace {

std::string dims(int h, int w, int c) {
  return std::to_string(h) + "x" + std::to_string(w) + "x" + std::to_string(c);
}

void check_dims(int height, int width, int channels) {
  if (height <= 0 || width <= 0 || channels <= 0) {
    throw InvalidInputError("feature map dimensions must be positive, got " +
                            dims(height, width, channels));
  }
}

void check_window(const FeatureMap& map, const PatchGrid& grid, int i, int j) {
  if (grid.height != map.height() || grid.width != map.width()) {
    throw GeometryError("patch grid over " + std::to_string(grid.height) + "x" +
                        std::to_string(grid.width) + " does not match map " +
                        dims(map.height(), map.width(), map.channels()));
  }
  if (!grid.contains(i, j)) {
    throw IndexError("patch index (" + std::to_string(i) + ", " +
                     std::to_string(j) + ") outside grid bounds I=" +
                     std::to_string(grid.max_i) + " J=" + std::to_string(grid.max_j));
  }
}

}  // namespace

FeatureMap::FeatureMap(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  check_dims(height, width, channels);
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

FeatureMap::FeatureMap(int height, int width, int channels, std::vector<double> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  check_dims(height, width, channels);
  if (data_.size() != static_cast<std::size_t>(height) * width * channels) {
    throw InvalidInputError("feature map " + dims(height, width, channels) +
                            " given " + std::to_string(data_.size()) + " values");
  }
}

bool FeatureMap::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

FeaturePyramid::FeaturePyramid(std::array<FeatureMap, kPyramidLevels> levels)
    : levels_(std::move(levels)) {
  const FeatureMap& first = levels_[0];
  if (first.empty()) throw GeometryError("pyramid level 1 is empty");
  const int base_h = 2 * first.height();
  const int base_w = 2 * first.width();
  if (base_h % 16 != 0 || base_w % 16 != 0) {
    throw GeometryError("pyramid base " + std::to_string(base_h) + "x" +
                        std::to_string(base_w) + " is not divisible by 16");
  }
  for (int h = 1; h <= kPyramidLevels; ++h) {
    const FeatureMap& level = levels_[h - 1];
    const int want_h = base_h >> h;
    const int want_w = base_w >> h;
    if (level.height() != want_h || level.width() != want_w ||
        level.channels() != first.channels()) {
      throw GeometryError("pyramid level " + std::to_string(h) + " is " +
                          dims(level.height(), level.width(), level.channels()) +
                          ", expected " + dims(want_h, want_w, first.channels()));
    }
  }
}

const FeatureMap& FeaturePyramid::level(int h) const {
  if (h < 1 || h > kPyramidLevels) {
    throw IndexError("pyramid level " + std::to_string(h) + " outside 1..4");
  }
  return levels_[h - 1];
}

std::size_t FeaturePyramid::bytes() const {
  std::size_t total = 0;
  for (const auto& level : levels_) total += level.bytes();
  return total;
}

PatchGrid make_patch_grid(int height, int width, int patch, int stride) {
  if (height <= 0 || width <= 0) {
    throw GeometryError("patch grid source must be non-empty");
  }
  if (patch <= 0 || stride <= 0) {
    throw GeometryError("patch size and stride must be positive");
  }
  if (patch > height || patch > width) {
    throw GeometryError("patch size " + std::to_string(patch) + " exceeds map " +
                        std::to_string(height) + "x" + std::to_string(width));
  }
  return PatchGrid{height, width, patch, stride, (width - patch) / stride,
                   (height - patch) / stride};
}

std::vector<double> PatchView::flatten() const {
  std::vector<double> out;
  out.reserve(count());
  for (int dy = 0; dy < size_; ++dy) {
    const auto r = row(dy);
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

PatchView extract_patch(const FeatureMap& map, const PatchGrid& grid, int i, int j) {
  check_window(map, grid, i, j);
  return PatchView(map, j * grid.stride, i * grid.stride, grid.patch);
}

void write_patch(FeatureMap& map, const PatchGrid& grid, int i, int j,
                 std::span<const double> values) {
  if (!grid.non_overlapping()) {
    throw ContractError("write_patch requires a non-overlapping grid (stride " +
                        std::to_string(grid.stride) + " != patch " +
                        std::to_string(grid.patch) + ")");
  }
  check_window(map, grid, i, j);
  const std::size_t row_len = static_cast<std::size_t>(grid.patch) * map.channels();
  if (values.size() != row_len * grid.patch) {
    throw InvalidInputError("patch holds " + std::to_string(values.size()) +
                            " values, window needs " +
                            std::to_string(row_len * grid.patch));
  }
  for (int dy = 0; dy < grid.patch; ++dy) {
    std::copy_n(values.begin() + dy * row_len, row_len,
                map.row(j * grid.stride + dy) +
                    static_cast<std::size_t>(i) * grid.stride * map.channels());
  }
}

void write_patch(FeatureMap& map, const PatchGrid& grid, int i, int j,
                 const PatchView& patch) {
  if (patch.size() != grid.patch || patch.channels() != map.channels()) {
    throw InvalidInputError("source patch shape does not match the target grid");
  }
  if (!grid.non_overlapping()) {
    throw ContractError("write_patch requires a non-overlapping grid");
  }
  check_window(map, grid, i, j);
  for (int dy = 0; dy < grid.patch; ++dy) {
    const auto src = patch.row(dy);
    std::copy(src.begin(), src.end(),
              map.row(j * grid.stride + dy) +
                  static_cast<std::size_t>(i) * grid.stride * map.channels());
  }
}

}  // namespace msfdpm
