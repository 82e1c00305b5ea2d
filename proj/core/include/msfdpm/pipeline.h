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

#ifndef MSFDPM_PIPELINE_H_
#define MSFDPM_PIPELINE_H_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "msfdpm/image_io.h"
#include "msfdpm/matcher.h"
#include "msfdpm/perturb.h"
#include "msfdpm/weights_io.h"

namespace msfdpm {

inline constexpr const char* kReportSchema = "msfdpm-report/1";

struct PipelineConfig {
  int patch_size = 16;       // B, one of 8, 16, 32
  int channels = 128;        // C, used for seeded weights
  double sigma = 0.0;        // Gaussian mask sigma in level-1 units; <= 0 means 2 * B
  double step = 1.0;         // latent quantization step q
  double lambda = 0.035;
  double alpha = 1.0;
  std::uint64_t seed = 1;
  std::string weights_path;  // weights bundle; empty selects seeded weights
  bool reuse = true;         // reuse the level-1 correlation for levels 2..4
  bool record_timings = true;

  // Throws ConfigError on an unsupported combination.
  void validate() const;
  double effective_sigma() const { return sigma > 0 ? sigma : 2.0 * patch_size; }
  // Inputs are center-cropped to a multiple of this so every patch grid is
  // an exact partition at every level.
  int crop_multiple() const;
};

ModelWeights load_model(const PipelineConfig& config);

// Decoded main, decoded side and lossless side pyramids.
struct MatchingInputs {
  FeaturePyramid main_decoded;
  FeaturePyramid side_decoded;
  FeaturePyramid side_lossless;
};

// Crops both images, then encodes/decodes them and extracts the lossless
// side pyramid. Throws GeometryError if the cropped sizes differ.
MatchingInputs prepare_matching_inputs(const FeatureMap& main_image, const FeatureMap& side_image,
                                       const PipelineConfig& config, const ModelWeights& model);

struct MatchResult {
  FeaturePyramid aligned;
  // Side index used for every main patch at each level (index h - 1), in
  // that level's coordinates.
  std::array<std::vector<SideIndex>, kPyramidLevels> best;
  std::size_t field_bytes = 0;
  double mask_seconds = 0;
  double correlation_seconds = 0;
};

// One level-1 field; deeper levels take the floor-mapped level-1 indices.
MatchResult match_with_reuse(const FeatureMap& main_level1, const FeatureMap& side_level1,
                             const FeaturePyramid& side_lossless, int patch_size, double sigma);

// reuse == true: match_with_reuse on level 1 of the decoded pyramids.
// reuse == false: an independent field per level.
MatchResult match_features(const MatchingInputs& inputs, int patch_size, double sigma, bool reuse);

struct PhaseTimings {
  double encode_decode_ms = 0;
  double extract_ms = 0;
  double mask_ms = 0;
  double match_ms = 0;
  double fuse_ms = 0;
  double metrics_ms = 0;
  double total_ms = 0;
};

struct PipelineReport {
  CropInfo main_crop;
  CropInfo side_crop;
  int channels = 0;
  int patch_size = 0;
  double sigma = 0;
  double step = 0;
  bool reuse = true;
  std::string weights;
  double bpp = 0;  // empirical-entropy bound
  double mse_x1 = 0;
  double mse_x2 = 0;
  double psnr_x1 = 0;
  double psnr_x2 = 0;
  double ms_ssim_x1 = 0;
  double ms_ssim_x2 = 0;
  int ms_ssim_scales = 0;
  double rd_loss = 0;
  std::optional<PhaseTimings> timings;
};

struct PipelineResult {
  FeatureMap x_hat_1;  // clamped to [0, 1]
  FeatureMap x_hat_2;  // clamped to [0, 1]
  std::vector<SideIndex> best;  // level-1 match per main patch
  PipelineReport report;
};

// encode -> decode (main and side) -> lossless side features -> match ->
// align -> fuse levels 4..1 -> reconstruct -> metrics. Errors carry the
// name of the failing stage.
PipelineResult run_pipeline(const FeatureMap& main_image, const FeatureMap& side_image,
                            const PipelineConfig& config, const ModelWeights& model);

// Deterministic JSON (keys sorted, shortest round-trip numbers). Infinite
// PSNR is written as null.
std::string report_to_json(const PipelineReport& report, int indent = 2);

enum class SweepMetric { kMsSsim, kPsnr };
SweepMetric sweep_metric_from_string(const std::string& s);

struct SweepRow {
  double factor = 1.0;
  double improvement = 0;     // metric(x_hat_2) - metric(x_hat_1)
  std::optional<double> pr;   // fraction; empty when the baseline gain is 0
};

struct SweepTable {
  PerturbKind kind = PerturbKind::kBrightness;
  SweepMetric metric = SweepMetric::kMsSsim;
  double baseline_improvement = 0;
  std::vector<SweepRow> rows;
};

// PR table from an arbitrary improvement function; `factors` must contain
// 1.0, which serves as the baseline.
SweepTable sweep_with(const std::function<double(double)>& improvement_at, PerturbKind kind,
                      SweepMetric metric, const std::vector<double>& factors);

// Runs the pipeline once per factor with the side image perturbed.
SweepTable robustness_sweep(const FeatureMap& main_image, const FeatureMap& side_image,
                            const PipelineConfig& config, const ModelWeights& model,
                            PerturbKind kind, const std::vector<double>& factors,
                            SweepMetric metric = SweepMetric::kMsSsim);

std::string sweep_to_json(const SweepTable& table, int indent = 2);

}  // namespace msfdpm

#endif  // MSFDPM_PIPELINE_H_
