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

#include "msfdpm/matcher.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "msfdpm/error.h"
#include "msfdpm/parallel.h"

namespace msfdpm {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

inline double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
#pragma omp simd reduction(+ : s)
  for (std::size_t t = 0; t < n; ++t) s += a[t] * b[t];
  return s;
}

void check_level(int level) {
  if (level < 2 || level > kPyramidLevels) {
    throw ConfigError("reused levels are 2..4, got " + std::to_string(level));
  }
}

}  // namespace

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw InvalidInputError("pearson needs two non-empty vectors of equal length");
  }
  const double n = static_cast<double>(a.size());
  double sum_a = 0.0;
  double sum_b = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    sum_a += a[t];
    sum_b += b[t];
  }
  const double mean_a = sum_a / n;
  const double mean_b = sum_b / n;
  double cov = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double da = a[t] - mean_a;
    const double db = b[t] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a / n < kFlatVariance || var_b / n < kFlatVariance) return 0.0;
  return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

double pearson(const PatchView& a, const PatchView& b) {
  if (a.size() != b.size() || a.channels() != b.channels()) {
    throw InvalidInputError("pearson of differently shaped patches");
  }
  const auto fa = a.flatten();
  const auto fb = b.flatten();
  return pearson(fa, fb);
}

double snap_score(double r) {
  return std::nearbyint(std::clamp(r, -1.0, 1.0) / kScoreResolution) * kScoreResolution;
}

GaussianMask::GaussianMask(double sigma) : sigma_(sigma) {
  if (!(sigma > 0)) throw ConfigError("Gaussian mask sigma must be positive");
}

double GaussianMask::value(int main_row, int main_col, SideIndex side) const {
  if (std::isinf(sigma_)) return 1.0;
  const double dy = static_cast<double>(main_row - side.l);
  const double dx = static_cast<double>(main_col - side.k);
  return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma_ * sigma_));
}

std::vector<double> GaussianMask::table(const PatchGrid& main_grid,
                                        const PatchGrid& side_grid) const {
  const std::size_t side_count = side_grid.count();
  std::vector<double> out(main_grid.count() * side_count);
  parallel_for(main_grid.count(), [&](std::size_t p) {
    const int i = static_cast<int>(p % main_grid.count_i());
    const int j = static_cast<int>(p / main_grid.count_i());
    double* row = out.data() + p * side_count;
    for (int l = 0; l <= side_grid.max_j; ++l) {
      for (int k = 0; k <= side_grid.max_i; ++k) {
        *row++ = value(j * main_grid.stride, i * main_grid.stride, SideIndex{k, l});
      }
    }
  });
  return out;
}

CorrelationField::CorrelationField(PatchGrid main_grid, PatchGrid side_grid, double sigma,
                                   std::vector<double> mask, std::vector<double> scores)
    : main_grid_(main_grid),
      side_grid_(side_grid),
      sigma_(sigma),
      mask_(std::move(mask)),
      scores_(std::move(scores)) {
  const std::size_t side_count = side_grid_.count();
  if (scores_.size() != main_grid_.count() * side_count || mask_.size() != scores_.size()) {
    throw InvalidInputError("correlation field tables do not match the grids");
  }
  best_.resize(main_grid_.count());
  for (std::size_t p = 0; p < main_grid_.count(); ++p) {
    const double* row = scores_.data() + p * side_count;
    std::size_t arg = 0;
    for (std::size_t s = 1; s < side_count; ++s) {
      if (row[s] > row[arg]) arg = s;
    }
    best_[p] = SideIndex{static_cast<int>(arg % side_grid_.count_i()),
                         static_cast<int>(arg / side_grid_.count_i())};
  }
}

std::span<const double> CorrelationField::scores(int i, int j) const {
  if (!main_grid_.contains(i, j)) throw IndexError("main patch index out of range");
  const std::size_t side_count = side_grid_.count();
  return {scores_.data() + main_index(i, j) * side_count, side_count};
}

double CorrelationField::score(int i, int j, SideIndex side) const {
  if (!side_grid_.contains(side.k, side.l)) throw IndexError("side patch index out of range");
  return scores(i, j)[static_cast<std::size_t>(side.l) * side_grid_.count_i() + side.k];
}

double CorrelationField::mask(int i, int j, SideIndex side) const {
  if (!main_grid_.contains(i, j) || !side_grid_.contains(side.k, side.l)) {
    throw IndexError("patch index out of range");
  }
  return mask_[main_index(i, j) * side_grid_.count() +
               static_cast<std::size_t>(side.l) * side_grid_.count_i() + side.k];
}

std::size_t CorrelationField::bytes() const {
  return (scores_.size() + mask_.size()) * sizeof(double) + best_.size() * sizeof(SideIndex);
}

CorrelationField correlation_field(const FeatureMap& main, const FeatureMap& side,
                                   int patch_size, double sigma, FieldTimings* timings) {
  if (!main.same_shape(side)) {
    throw GeometryError("main and side feature maps differ in shape");
  }
  if (patch_size < 1) throw GeometryError("patch size must be positive");
  if (!main.all_finite() || !side.all_finite()) {
    throw InvalidInputError("correlation inputs must be finite");
  }
  if (main.height() % patch_size != 0 || main.width() % patch_size != 0) {
    throw GeometryError("feature map " + std::to_string(main.height()) + "x" +
                        std::to_string(main.width()) + " is not divisible by patch size " +
                        std::to_string(patch_size));
  }
  const GaussianMask prior(sigma);
  const int B = patch_size;
  const int C = main.channels();
  const PatchGrid main_grid = make_patch_grid(main.height(), main.width(), B, B);
  const PatchGrid side_grid = make_patch_grid(side.height(), side.width(), B, 1);
  const std::size_t side_count = side_grid.count();
  const std::size_t row_len = static_cast<std::size_t>(B) * C;
  const double n = static_cast<double>(row_len * B);

  auto start = Clock::now();
  std::vector<double> mask = prior.table(main_grid, side_grid);
  if (timings) timings->mask_seconds = seconds_since(start);
  start = Clock::now();

  // Centering the side map on its global mean leaves every Pearson score
  // unchanged and keeps the window sums small.
  double total = 0.0;
  for (double v : side.values()) total += v;
  const double global_mean = total / static_cast<double>(side.size());
  FeatureMap centered = side;
  for (double& v : centered.values()) v -= global_mean;

  // Per-row segment sums over B columns, then per-window sums over B rows.
  const int ks = side_grid.count_i();
  const int ls = side_grid.count_j();
  std::vector<double> seg_sum(static_cast<std::size_t>(side.height()) * ks);
  std::vector<double> seg_sq(seg_sum.size());
  parallel_for(static_cast<std::size_t>(side.height()), [&](std::size_t r) {
    const double* row = centered.row(static_cast<int>(r));
    for (int k = 0; k < ks; ++k) {
      const double* seg = row + static_cast<std::size_t>(k) * C;
      double s = 0.0;
      double q = 0.0;
      for (std::size_t t = 0; t < row_len; ++t) {
        s += seg[t];
        q += seg[t] * seg[t];
      }
      seg_sum[r * ks + k] = s;
      seg_sq[r * ks + k] = q;
    }
  });
  std::vector<double> side_inv_norm(side_count);
  for (int l = 0; l < ls; ++l) {
    for (int k = 0; k < ks; ++k) {
      double s = 0.0;
      double q = 0.0;
      for (int dy = 0; dy < B; ++dy) {
        s += seg_sum[static_cast<std::size_t>(l + dy) * ks + k];
        q += seg_sq[static_cast<std::size_t>(l + dy) * ks + k];
      }
      const double var_sum = q - s * s / n;
      side_inv_norm[static_cast<std::size_t>(l) * ks + k] =
          (var_sum / n < kFlatVariance) ? 0.0 : 1.0 / std::sqrt(var_sum);
    }
  }

  std::vector<double> scores(main_grid.count() * side_count);
  parallel_for(main_grid.count(), [&](std::size_t p) {
    const int i = static_cast<int>(p % main_grid.count_i());
    const int j = static_cast<int>(p / main_grid.count_i());
    std::vector<double> kernel = extract_patch(main, main_grid, i, j).flatten();
    double mean = 0.0;
    for (double v : kernel) mean += v;
    mean /= n;
    double norm_sq = 0.0;
    for (double& v : kernel) {
      v -= mean;
      norm_sq += v * v;
    }
    double* out = scores.data() + p * side_count;
    const double* mrow = mask.data() + p * side_count;
    if (norm_sq / n < kFlatVariance) {
      for (std::size_t s = 0; s < side_count; ++s) out[s] = 0.0 * mrow[s];
      return;
    }
    const double inv_main = 1.0 / std::sqrt(norm_sq);
    for (int l = 0; l < ls; ++l) {
      double* acc = out + static_cast<std::size_t>(l) * ks;
      std::fill_n(acc, ks, 0.0);
      for (int dy = 0; dy < B; ++dy) {
        const double* krow = kernel.data() + dy * row_len;
        const double* srow = centered.row(l + dy);
        for (int k = 0; k < ks; ++k) {
          acc[k] += dot(krow, srow + static_cast<std::size_t>(k) * C, row_len);
        }
      }
      for (int k = 0; k < ks; ++k) {
        const std::size_t s = static_cast<std::size_t>(l) * ks + k;
        acc[k] = snap_score(acc[k] * inv_main * side_inv_norm[s]) * mrow[s];
      }
    }
  });
  if (timings) timings->correlation_seconds = seconds_since(start);
  return CorrelationField(main_grid, side_grid, sigma, std::move(mask), std::move(scores));
}

int patch_size_at_level(int patch_size, int level) {
  if (level < 1 || level > kPyramidLevels) {
    throw ConfigError("pyramid level " + std::to_string(level) + " outside 1..4");
  }
  const int factor = 1 << (level - 1);
  if (patch_size < factor || patch_size % factor != 0) {
    throw ConfigError("patch size " + std::to_string(patch_size) + " does not halve cleanly to level " +
                      std::to_string(level) + " (needs a multiple of " + std::to_string(factor) + ")");
  }
  return patch_size / factor;
}

CorrelationField correlation_field_per_level(int level, const FeatureMap& main_h,
                                             const FeatureMap& side_h, int patch_size,
                                             double sigma, FieldTimings* timings) {
  const int patch_h = patch_size_at_level(patch_size, level);
  const double sigma_h = sigma / static_cast<double>(1 << (level - 1));
  return correlation_field(main_h, side_h, patch_h, sigma_h, timings);
}

SideIndex lift_index(int level, SideIndex index) {
  check_level(level);
  if (index.k < 0 || index.l < 0) throw IndexError("negative side index");
  const int f = 1 << (level - 1);
  return SideIndex{index.k * f, index.l * f};
}

SideIndex reuse_index(int level, SideIndex index) {
  check_level(level);
  if (index.k < 0 || index.l < 0) throw IndexError("negative side index");
  const int shift = level - 1;
  return SideIndex{index.k >> shift, index.l >> shift};
}

FeatureMap align_with_indices(const FeatureMap& source, int patch_size,
                              const std::vector<SideIndex>& best) {
  const PatchGrid grid = make_patch_grid(source.height(), source.width(), patch_size, patch_size);
  if (best.size() != grid.count()) {
    throw InvalidInputError("alignment needs " + std::to_string(grid.count()) +
                            " indices, got " + std::to_string(best.size()));
  }
  const PatchGrid side_grid = make_patch_grid(source.height(), source.width(), patch_size, 1);
  FeatureMap out(source.height(), source.width(), source.channels());
  for (int j = 0; j < grid.count_j(); ++j) {
    for (int i = 0; i < grid.count_i(); ++i) {
      const SideIndex s = best[static_cast<std::size_t>(j) * grid.count_i() + i];
      if (!side_grid.contains(s.k, s.l)) {
        throw IndexError("aligned side index (" + std::to_string(s.k) + ", " +
                         std::to_string(s.l) + ") outside the side grid");
      }
      write_patch(out, grid, i, j, extract_patch(source, side_grid, s.k, s.l));
    }
  }
  return out;
}

FeatureMap align_level1(const CorrelationField& field, const FeatureMap& lossless_side) {
  if (lossless_side.height() != field.side_grid().height ||
      lossless_side.width() != field.side_grid().width) {
    throw GeometryError("lossless side features do not match the correlation field");
  }
  return align_with_indices(lossless_side, field.patch_size(), field.best_indices());
}

FeaturePyramid align_all_levels(const CorrelationField& field, const FeaturePyramid& lossless,
                                int patch_size) {
  if (patch_size % 8 != 0) {
    throw ConfigError("reusing the level-1 field needs a patch size divisible by 8, got " +
                      std::to_string(patch_size));
  }
  if (field.patch_size() != patch_size) {
    throw ConfigError("field was computed with patch size " +
                      std::to_string(field.patch_size()));
  }
  std::array<FeatureMap, kPyramidLevels> levels;
  levels[0] = align_level1(field, lossless.level(1));
  for (int h = 2; h <= kPyramidLevels; ++h) {
    std::vector<SideIndex> best;
    best.reserve(field.best_indices().size());
    for (const SideIndex& s : field.best_indices()) best.push_back(reuse_index(h, s));
    levels[h - 1] =
        align_with_indices(lossless.level(h), patch_size_at_level(patch_size, h), best);
  }
  return FeaturePyramid(std::move(levels));
}

}  // namespace msfdpm
