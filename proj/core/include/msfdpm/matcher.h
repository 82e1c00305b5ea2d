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

#ifndef MSFDPM_MATCHER_H_
#define MSFDPM_MATCHER_H_

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

#include "msfdpm/tensor.h"

namespace msfdpm {

// Index of a side patch on a stride-1 grid: column k, row l.
struct SideIndex {
  int k = 0;
  int l = 0;
  friend auto operator<=>(const SideIndex&, const SideIndex&) = default;
};

// Patches whose per-element variance falls below this are treated as flat
// and score 0 against everything.
inline constexpr double kFlatVariance = 1e-12;

// Correlation scores are snapped to a multiple of 2^-20 before masking.
// Two arithmetic routes to the same Pearson value (direct sums, sliding
// window sums, affinely rescaled inputs) differ only in the last few ulps,
// far below this step, so they land on the same representable score.
inline constexpr double kScoreResolution = 0x1.0p-20;

// Pearson correlation of two equally sized vectors. Returns 0 when either
// side has per-element variance below kFlatVariance.
double pearson(std::span<const double> a, std::span<const double> b);
double pearson(const PatchView& a, const PatchView& b);

double snap_score(double r);

// Spatial prior m = exp(-d^2 / (2 sigma^2)) where d is the distance between
// a main patch's top-left corner (i * B, j * B) and side position (k, l).
// sigma = +inf yields a constant mask of 1.
class GaussianMask {
 public:
  explicit GaussianMask(double sigma);

  double sigma() const { return sigma_; }
  double value(int main_row, int main_col, SideIndex side) const;
  // Dense table indexed [main patch][side patch], both in row-major order.
  std::vector<double> table(const PatchGrid& main_grid, const PatchGrid& side_grid) const;

 private:
  double sigma_;
};

// Masked correlation of every main patch (stride B) against every side
// patch (stride 1), plus the per-main-patch argmax.
class CorrelationField {
 public:
  CorrelationField(PatchGrid main_grid, PatchGrid side_grid, double sigma,
                   std::vector<double> mask, std::vector<double> scores);

  const PatchGrid& main_grid() const { return main_grid_; }
  const PatchGrid& side_grid() const { return side_grid_; }
  int patch_size() const { return main_grid_.patch; }
  double sigma() const { return sigma_; }

  std::size_t main_index(int i, int j) const {
    return static_cast<std::size_t>(j) * main_grid_.count_i() + i;
  }
  // Masked scores of main patch (i, j) against all side patches, row-major
  // over (l, k).
  std::span<const double> scores(int i, int j) const;
  double score(int i, int j, SideIndex side) const;
  double mask(int i, int j, SideIndex side) const;
  SideIndex best(int i, int j) const { return best_[main_index(i, j)]; }
  const std::vector<SideIndex>& best_indices() const { return best_; }

  // Bytes held by scores, mask table and argmax indices.
  std::size_t bytes() const;

 private:
  PatchGrid main_grid_;
  PatchGrid side_grid_;
  double sigma_;
  std::vector<double> mask_;
  std::vector<double> scores_;
  std::vector<SideIndex> best_;
};

struct FieldTimings {
  double mask_seconds = 0;
  double correlation_seconds = 0;
};

// Masked Pearson field between two same-sized maps. The inner products are
// evaluated by sliding each main patch over the side map as a convolution
// kernel; the side normalization comes from per-window sums. Argmax ties go
// to the smallest l, then the smallest k.
CorrelationField correlation_field(const FeatureMap& main, const FeatureMap& side,
                                   int patch_size, double sigma,
                                   FieldTimings* timings = nullptr);

// Patch size used at pyramid level h for a level-1 patch size B: B / 2^(h-1).
// Throws ConfigError when that is not a positive integer.
int patch_size_at_level(int patch_size, int level);

// Direct matching at pyramid level h (no reuse). `patch_size` and `sigma`
// are given in level-1 units and scaled by 2^-(h-1).
CorrelationField correlation_field_per_level(int level, const FeatureMap& main_h,
                                             const FeatureMap& side_h, int patch_size,
                                             double sigma, FieldTimings* timings = nullptr);

// Level-h side index -> level-1 index: (2^(h-1) k, 2^(h-1) l).
SideIndex lift_index(int level, SideIndex index);
// Level-1 side index -> level-h index by floor division; the exact inverse
// of lift_index on multiples of 2^(h-1).
SideIndex reuse_index(int level, SideIndex index);

// Builds a map the size of `source` by copying, for every main patch (i, j)
// of a non-overlapping grid with the given patch size, the source window at
// best[(i, j)].
FeatureMap align_with_indices(const FeatureMap& source, int patch_size,
                              const std::vector<SideIndex>& best);

FeatureMap align_level1(const CorrelationField& field, const FeatureMap& lossless_side);

// Aligns all four lossless levels from the level-1 field only.
FeaturePyramid align_all_levels(const CorrelationField& field,
                                const FeaturePyramid& lossless, int patch_size);

}  // namespace msfdpm

#endif  // MSFDPM_MATCHER_H_
