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

#ifndef MSFDPM_TENSOR_H_
#define MSFDPM_TENSOR_H_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace msfdpm {

// Dense height x width x channels array stored row-major as
// (row, column, channel). Images, feature maps and latents all use it.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(int height, int width, int channels, double fill = 0.0);
  FeatureMap(int height, int width, int channels, std::vector<double> data);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  std::size_t bytes() const { return data_.size() * sizeof(double); }

  std::size_t offset(int row, int col, int channel = 0) const {
    return (static_cast<std::size_t>(row) * width_ + col) * channels_ + channel;
  }
  double& at(int row, int col, int channel) { return data_[offset(row, col, channel)]; }
  double at(int row, int col, int channel) const { return data_[offset(row, col, channel)]; }

  // Pointer to (row, 0, 0); a row holds width * channels contiguous values.
  double* row(int r) { return data_.data() + offset(r, 0); }
  const double* row(int r) const { return data_.data() + offset(r, 0); }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool same_shape(const FeatureMap& other) const {
    return height_ == other.height_ && width_ == other.width_ &&
           channels_ == other.channels_;
  }
  bool all_finite() const;

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

inline constexpr int kPyramidLevels = 4;

// Four feature maps at scales h = 1..4 of a base H x W image: level h is
// (H / 2^h) x (W / 2^h) x C. Smaller h is the larger map.
class FeaturePyramid {
 public:
  FeaturePyramid() = default;
  // levels[0] is h = 1. Throws GeometryError unless the chain is dyadic with
  // a base size divisible by 16 and a common channel count.
  explicit FeaturePyramid(std::array<FeatureMap, kPyramidLevels> levels);

  const FeatureMap& level(int h) const;
  int base_height() const { return 2 * levels_[0].height(); }
  int base_width() const { return 2 * levels_[0].width(); }
  int channels() const { return levels_[0].channels(); }
  std::size_t bytes() const;

  friend bool operator==(const FeaturePyramid&, const FeaturePyramid&) = default;

 private:
  std::array<FeatureMap, kPyramidLevels> levels_;
};

// Patch set of B x B windows at stride s over a height x width map. Patch
// (i, j) has its top-left corner at row j * s, column i * s; i runs over
// the width and j over the height.
struct PatchGrid {
  int height = 0;
  int width = 0;
  int patch = 0;
  int stride = 0;
  int max_i = 0;  // floor((width - patch) / stride)
  int max_j = 0;  // floor((height - patch) / stride)

  int count_i() const { return max_i + 1; }
  int count_j() const { return max_j + 1; }
  std::size_t count() const {
    return static_cast<std::size_t>(count_i()) * count_j();
  }
  bool contains(int i, int j) const {
    return i >= 0 && j >= 0 && i <= max_i && j <= max_j;
  }
  bool non_overlapping() const { return stride == patch; }

  friend bool operator==(const PatchGrid&, const PatchGrid&) = default;
};

PatchGrid make_patch_grid(int height, int width, int patch, int stride);

// Read-only window into a FeatureMap. The map must outlive the view.
class PatchView {
 public:
  PatchView(const FeatureMap& map, int row0, int col0, int size)
      : map_(&map), row0_(row0), col0_(col0), size_(size) {}

  int size() const { return size_; }
  int channels() const { return map_->channels(); }
  int row0() const { return row0_; }
  int col0() const { return col0_; }
  std::size_t count() const {
    return static_cast<std::size_t>(size_) * size_ * map_->channels();
  }

  double operator()(int dy, int dx, int channel) const {
    return map_->at(row0_ + dy, col0_ + dx, channel);
  }
  // size * channels contiguous values of window row dy.
  std::span<const double> row(int dy) const {
    return {map_->row(row0_ + dy) + static_cast<std::size_t>(col0_) * channels(),
            static_cast<std::size_t>(size_) * channels()};
  }
  std::vector<double> flatten() const;

 private:
  const FeatureMap* map_;
  int row0_;
  int col0_;
  int size_;
};

PatchView extract_patch(const FeatureMap& map, const PatchGrid& grid, int i, int j);

// Overwrites window (i, j) of a non-overlapping grid. `values` is a flattened
// B x B x channels patch.
void write_patch(FeatureMap& map, const PatchGrid& grid, int i, int j,
                 std::span<const double> values);
void write_patch(FeatureMap& map, const PatchGrid& grid, int i, int j,
                 const PatchView& patch);

}  // namespace msfdpm

#endif  // MSFDPM_TENSOR_H_
