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

#ifndef MSFDPM_METRICS_H_
#define MSFDPM_METRICS_H_

#include <vector>

#include "msfdpm/extractor.h"
#include "msfdpm/tensor.h"

namespace msfdpm {

struct RdPoint {
  double bpp = 0;
  double psnr = 0;
  double ms_ssim = 0;
};

// Rate-distortion curve with strictly increasing bpp.
class RdCurve {
 public:
  RdCurve() = default;
  // Throws InvalidInputError on negative bpp, MS-SSIM outside [0, 1] or
  // non-increasing bpp.
  explicit RdCurve(std::vector<RdPoint> points);

  const std::vector<RdPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

 private:
  std::vector<RdPoint> points_;
};

double mse(const FeatureMap& a, const FeatureMap& b);

// 10 log10(peak^2 / MSE). Identical inputs give +infinity.
double psnr(const FeatureMap& a, const FeatureMap& b, double peak);

struct MsSsimResult {
  double value = 0;
  int scales = 0;  // 5 unless the image is too small for the full pyramid
};

// Multi-scale SSIM on BT.601 luma (or the single channel of a 1-channel
// map), 11x11 Gaussian window with sigma 1.5, valid filtering, 2x2 average
// downsampling, K1 = 0.01, K2 = 0.03, dynamic range 1, scale weights
// {0.0448, 0.2856, 0.3001, 0.2363, 0.1333}. Negative contrast-structure
// terms are clamped to 0. When min(H, W) < 176 the largest scale count with
// at least an 11-pixel side is used and the weights are renormalized.
MsSsimResult ms_ssim_detailed(const FeatureMap& a, const FeatureMap& b);
double ms_ssim(const FeatureMap& a, const FeatureMap& b);

// Bits per symbol of the empirical histogram of the latent's integer
// symbols.
double latent_entropy_bits(const Latent& latent);
// Empirical-entropy bound on the coded size, per image pixel.
double bpp_estimate(const Latent& latent, int height, int width);

// entropy + lambda ((1 - alpha) d1 + alpha d2).
double rd_loss(double entropy, double d1, double d2, double lambda, double alpha);

enum class QualityField { kPsnr, kMsSsim };
enum class BdMethod {
  kCubicFit,     // least-squares cubic of log10(bpp) against quality
  kPiecewiseCubic,  // monotone piecewise-cubic (PCHIP) interpolation
};

inline constexpr int kBdIntegrationSamples = 1000;

// Bjontegaard delta rate in percent: average log-rate gap over the shared
// quality interval, integrated by the trapezoid rule on 1000 samples.
// Negative means `test` needs fewer bits than `reference`.
double bd_rate(const RdCurve& reference, const RdCurve& test, QualityField field,
               BdMethod method = BdMethod::kCubicFit);

// 1 - gain_after / gain_before, as a fraction (0.25 == 25%).
double performance_reduction(double gain_before, double gain_after);

}  // namespace msfdpm

#endif  // MSFDPM_METRICS_H_
