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

#include "msfdpm/pipeline.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <utility>

#include "json.hpp"
#include "msfdpm/error.h"
#include "msfdpm/fusion.h"
#include "msfdpm/metrics.h"

namespace msfdpm {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Runs `fn`, tagging any library error with `stage`.
template <typename Fn>
auto staged(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (Error& e) {
    e.set_stage(stage);
    throw;
  }
}

json crop_json(const CropInfo& c) {
  return {{"original_height", c.original_height}, {"original_width", c.original_width},
          {"height", c.height}, {"width", c.width}, {"top", c.top}, {"left", c.left}};
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Prepared {
  FeatureMap main;
  FeatureMap side;
  CropInfo main_crop;
  CropInfo side_crop;
};

Prepared crop_pair(const FeatureMap& main_image, const FeatureMap& side_image,
                   const PipelineConfig& config) {
  Prepared p;
  p.main = center_crop_to_multiple(main_image, config.crop_multiple(), &p.main_crop);
  p.side = center_crop_to_multiple(side_image, config.crop_multiple(), &p.side_crop);
  if (!p.main.same_shape(p.side)) {
    throw GeometryError("main and side images crop to different sizes");
  }
  return p;
}

}  // namespace

void PipelineConfig::validate() const {
  if (patch_size != 8 && patch_size != 16 && patch_size != 32) {
    throw ConfigError("patch size must be 8, 16 or 32, got " + std::to_string(patch_size));
  }
  if (channels < 1) throw ConfigError("channel count must be positive");
  if (std::isnan(sigma)) throw ConfigError("sigma must be a number");
  if (!(step > 0) || !std::isfinite(step)) throw ConfigError("q must be positive");
  if (!(lambda > 0)) throw ConfigError("lambda must be positive");
  if (!(alpha >= 0 && alpha <= 1)) throw ConfigError("alpha must lie in [0, 1]");
}

int PipelineConfig::crop_multiple() const { return std::lcm(16, 2 * patch_size); }

ModelWeights load_model(const PipelineConfig& config) {
  config.validate();
  if (!config.weights_path.empty()) {
    ModelWeights w = read_weights_bundle(config.weights_path);
    w.step = config.step;
    return w;
  }
  return seeded_model_weights(config.seed, config.channels, config.step);
}

MatchingInputs prepare_matching_inputs(const FeatureMap& main_image, const FeatureMap& side_image,
                                       const PipelineConfig& config, const ModelWeights& model) {
  config.validate();
  const Prepared p = staged("crop", [&] { return crop_pair(main_image, side_image, config); });
  return staged("extract", [&] {
    return MatchingInputs{
        decode_multiscale(encode(p.main, model.codec, config.step), model.codec).pyramid,
        decode_multiscale(encode(p.side, model.codec, config.step), model.codec).pyramid,
        extract_lossless_features(p.side, model.codec)};
  });
}

MatchResult match_with_reuse(const FeatureMap& main_level1, const FeatureMap& side_level1,
                             const FeaturePyramid& side_lossless, int patch_size, double sigma) {
  MatchResult result;
  FieldTimings t;
  const CorrelationField field =
      correlation_field(main_level1, side_level1, patch_size, sigma, &t);
  result.aligned = align_all_levels(field, side_lossless, patch_size);
  for (int h = 1; h <= kPyramidLevels; ++h) {
    auto& best = result.best[h - 1];
    for (const SideIndex& s : field.best_indices()) {
      best.push_back(h == 1 ? s : reuse_index(h, s));
    }
  }
  result.field_bytes = field.bytes();
  result.mask_seconds = t.mask_seconds;
  result.correlation_seconds = t.correlation_seconds;
  return result;
}

MatchResult match_features(const MatchingInputs& inputs, int patch_size, double sigma, bool reuse) {
  if (reuse) {
    return match_with_reuse(inputs.main_decoded.level(1), inputs.side_decoded.level(1),
                            inputs.side_lossless, patch_size, sigma);
  }

  MatchResult result;
  // All four fields stay alive until alignment is done.
  std::vector<CorrelationField> fields;
  std::array<FeatureMap, kPyramidLevels> aligned;
  for (int h = 1; h <= kPyramidLevels; ++h) {
    FieldTimings t;
    fields.push_back(correlation_field_per_level(h, inputs.main_decoded.level(h),
                                                 inputs.side_decoded.level(h), patch_size, sigma,
                                                 &t));
    result.mask_seconds += t.mask_seconds;
    result.correlation_seconds += t.correlation_seconds;
  }
  for (int h = 1; h <= kPyramidLevels; ++h) {
    const CorrelationField& field = fields[h - 1];
    aligned[h - 1] = align_with_indices(inputs.side_lossless.level(h), field.patch_size(),
                                        field.best_indices());
    result.best[h - 1] = field.best_indices();
    result.field_bytes += field.bytes();
  }
  result.aligned = FeaturePyramid(std::move(aligned));
  return result;
}

PipelineResult run_pipeline(const FeatureMap& main_image, const FeatureMap& side_image,
                            const PipelineConfig& config, const ModelWeights& model) {
  staged("config", [&] { config.validate(); });
  const auto t_start = Clock::now();
  PhaseTimings timings;

  const Prepared p = staged("crop", [&] { return crop_pair(main_image, side_image, config); });

  auto t = Clock::now();
  const Latent latent = staged("encode", [&] { return encode(p.main, model.codec, config.step); });
  const DecodedMain main_dec = staged("decode", [&] { return decode_multiscale(latent, model.codec); });
  const DecodedMain side_dec = staged("decode", [&] {
    return decode_multiscale(encode(p.side, model.codec, config.step), model.codec);
  });
  timings.encode_decode_ms = ms_since(t);

  t = Clock::now();
  const FeaturePyramid lossless =
      staged("extract", [&] { return extract_lossless_features(p.side, model.codec); });
  timings.extract_ms = ms_since(t);

  t = Clock::now();
  const MatchingInputs inputs{main_dec.pyramid, side_dec.pyramid, lossless};
  const MatchResult matched = staged("match", [&] {
    return match_features(inputs, config.patch_size, config.effective_sigma(), config.reuse);
  });
  timings.match_ms = ms_since(t);
  timings.mask_ms = matched.mask_seconds * 1e3;

  t = Clock::now();
  const FeatureMap x_hat_2_raw = staged("fuse", [&] {
    const FeatureMap phi1 = fuse_all(main_dec.pyramid, matched.aligned, model.fusion);
    return reconstruct(phi1, main_dec.image, model.fusion);
  });
  timings.fuse_ms = ms_since(t);

  t = Clock::now();
  PipelineResult result;
  result.x_hat_1 = clamp_unit(main_dec.image);
  result.x_hat_2 = clamp_unit(x_hat_2_raw);
  result.best = matched.best[0];

  PipelineReport& r = result.report;
  r.main_crop = p.main_crop;
  r.side_crop = p.side_crop;
  r.channels = model.codec.channels;
  r.patch_size = config.patch_size;
  r.sigma = config.effective_sigma();
  r.step = config.step;
  r.reuse = config.reuse;
  r.weights = model.codec.provenance;
  staged("metrics", [&] {
    r.bpp = bpp_estimate(latent, p.main.height(), p.main.width());
    r.mse_x1 = mse(p.main, result.x_hat_1);
    r.mse_x2 = mse(p.main, result.x_hat_2);
    r.psnr_x1 = psnr(p.main, result.x_hat_1, 1.0);
    r.psnr_x2 = psnr(p.main, result.x_hat_2, 1.0);
    const MsSsimResult m1 = ms_ssim_detailed(p.main, result.x_hat_1);
    const MsSsimResult m2 = ms_ssim_detailed(p.main, result.x_hat_2);
    r.ms_ssim_x1 = m1.value;
    r.ms_ssim_x2 = m2.value;
    r.ms_ssim_scales = m1.scales;
    r.rd_loss = rd_loss(r.bpp, r.mse_x1, r.mse_x2, config.lambda, config.alpha);
  });
  timings.metrics_ms = ms_since(t);
  timings.total_ms = ms_since(t_start);
  if (config.record_timings) r.timings = timings;
  return result;
}

std::string report_to_json(const PipelineReport& r, int indent) {
  json j = {
      {"schema", kReportSchema},
      {"bpp", r.bpp},
      {"bpp_entropy_bound", r.bpp},
      {"psnr_db", {{"x_hat_1", finite_or_null(r.psnr_x1)}, {"x_hat_2", finite_or_null(r.psnr_x2)}}},
      {"ms_ssim", {{"x_hat_1", r.ms_ssim_x1}, {"x_hat_2", r.ms_ssim_x2}, {"scales", r.ms_ssim_scales}}},
      {"mse", {{"x_hat_1", r.mse_x1}, {"x_hat_2", r.mse_x2}}},
      {"rd_loss", r.rd_loss},
      {"bd_rate_p", nullptr},
      {"bd_rate_m", nullptr},
      {"pr", nullptr},
      {"config",
       {{"channels", r.channels},
        {"patch_size", r.patch_size},
        {"sigma", finite_or_null(r.sigma)},
        {"q", r.step},
        {"reuse", r.reuse},
        {"weights", r.weights}}},
      {"crop", {{"main", crop_json(r.main_crop)}, {"side", crop_json(r.side_crop)}}},
  };
  if (r.timings) {
    const PhaseTimings& t = *r.timings;
    j["timings_ms"] = {{"encode_decode", t.encode_decode_ms}, {"extract", t.extract_ms},
                       {"mask", t.mask_ms},  {"match", t.match_ms},
                       {"fuse", t.fuse_ms},  {"metrics", t.metrics_ms},
                       {"total", t.total_ms}};
  }
  return j.dump(indent);
}

SweepMetric sweep_metric_from_string(const std::string& s) {
  if (s == "ms_ssim" || s == "ms-ssim") return SweepMetric::kMsSsim;
  if (s == "psnr") return SweepMetric::kPsnr;
  throw ConfigError("unknown sweep metric '" + s + "' (ms_ssim|psnr)");
}

SweepTable sweep_with(const std::function<double(double)>& improvement_at, PerturbKind kind,
                      SweepMetric metric, const std::vector<double>& factors) {
  if (std::find(factors.begin(), factors.end(), 1.0) == factors.end()) {
    throw ConfigError("sweep factors must include the 1.0 baseline");
  }
  for (double f : factors) {
    if (!(f > 0) || !std::isfinite(f)) throw ConfigError("sweep factors must be positive");
  }
  SweepTable table;
  table.kind = kind;
  table.metric = metric;
  table.baseline_improvement = improvement_at(1.0);
  for (double f : factors) {
    SweepRow row;
    row.factor = f;
    row.improvement = f == 1.0 ? table.baseline_improvement : improvement_at(f);
    if (table.baseline_improvement != 0.0) {
      row.pr = performance_reduction(table.baseline_improvement, row.improvement);
    }
    table.rows.push_back(row);
  }
  return table;
}

SweepTable robustness_sweep(const FeatureMap& main_image, const FeatureMap& side_image,
                            const PipelineConfig& config, const ModelWeights& model,
                            PerturbKind kind, const std::vector<double>& factors,
                            SweepMetric metric) {
  auto improvement_at = [&](double factor) {
    const FeatureMap side = perturb(side_image, PerturbSpec{kind, factor});
    const PipelineReport r = run_pipeline(main_image, side, config, model).report;
    return metric == SweepMetric::kMsSsim ? r.ms_ssim_x2 - r.ms_ssim_x1 : r.psnr_x2 - r.psnr_x1;
  };
  return sweep_with(improvement_at, kind, metric, factors);
}

std::string sweep_to_json(const SweepTable& table, int indent) {
  json rows = json::array();
  for (const SweepRow& row : table.rows) {
    rows.push_back({{"factor", row.factor},
                    {"improvement", finite_or_null(row.improvement)},
                    {"pr", row.pr ? finite_or_null(*row.pr) : json(nullptr)}});
  }
  json j = {{"schema", kReportSchema},
            {"kind", to_string(table.kind)},
            {"metric", table.metric == SweepMetric::kMsSsim ? "ms_ssim" : "psnr"},
            {"baseline_improvement", finite_or_null(table.baseline_improvement)},
            {"rows", rows}};
  return j.dump(indent);
}

}  // namespace msfdpm
