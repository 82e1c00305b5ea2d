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

// msfdpm command-line front end. Every subcommand prints a JSON document to
// stdout (or --out) and exits with 0 on success, 2 on invalid input, 3 on a
// geometry error and 4 on a configuration error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "msfdpm/bench.h"
#include "msfdpm/error.h"
#include "msfdpm/fmap_io.h"
#include "msfdpm/fusion.h"
#include "msfdpm/image_io.h"
#include "msfdpm/matcher.h"
#include "msfdpm/metrics.h"
#include "msfdpm/parallel.h"
#include "msfdpm/pipeline.h"
#include "msfdpm/synthetic.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace msfdpm {
namespace {

enum ExitCode { kOk = 0, kInternal = 1, kInvalidInput = 2, kGeometry = 3, kConfig = 4 };

struct Options {
  PipelineConfig config;
  std::string out;
  int threads = 0;
  bool no_reuse = false;
  bool no_timings = false;
};

void add_config_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--patch-size,-B", o.config.patch_size, "patch size B (8, 16 or 32)")
      ->capture_default_str();
  cmd->add_option("--channels,-C", o.config.channels, "feature channels for seeded weights")
      ->capture_default_str();
  cmd->add_option("--sigma", o.config.sigma, "Gaussian mask sigma; <= 0 selects 2B")
      ->capture_default_str();
  cmd->add_option("--q", o.config.step, "latent quantization step")->capture_default_str();
  cmd->add_option("--lambda", o.config.lambda, "rate-distortion trade-off")
      ->capture_default_str();
  cmd->add_option("--alpha", o.config.alpha, "weight of the second-stage distortion")
      ->capture_default_str();
  auto* seed = cmd->add_option("--seed", o.config.seed, "seed for reference weights")
                   ->capture_default_str();
  cmd->add_option("--weights", o.config.weights_path, "weights bundle directory")
      ->excludes(seed);
}

void add_reuse_options(CLI::App* cmd, Options& o) {
  cmd->add_flag("--no-reuse", o.no_reuse, "match every pyramid level independently");
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw InvalidInputError("cannot write " + o.out);
  f << text << "\n";
}

// .fmap keeps full precision; anything else goes through save_image.
void save_output(const std::string& path, const FeatureMap& map) {
  if (path.empty()) return;
  if (fs::path(path).extension() == ".fmap") {
    write_fmap(path, map);
  } else {
    save_image(path, clamp_unit(map));
  }
}

FeatureMap load_cropped(const std::string& path, const PipelineConfig& config, CropInfo* info) {
  return center_crop_to_multiple(load_image(path), config.crop_multiple(), info);
}

json crop_json(const CropInfo& c) {
  return {{"original_height", c.original_height}, {"original_width", c.original_width},
          {"height", c.height}, {"width", c.width}, {"top", c.top}, {"left", c.left}};
}

json indices_json(const std::vector<SideIndex>& best) {
  json a = json::array();
  for (const SideIndex& s : best) a.push_back({s.k, s.l});
  return a;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// Accepts a pyramid bundle directory or a single level-1 FMAP1 file.
struct FeatureInput {
  std::optional<FeaturePyramid> pyramid;
  FeatureMap level1;
};

FeatureInput read_features(const std::string& path) {
  FeatureInput in;
  if (fs::is_directory(path)) {
    in.pyramid = read_pyramid_bundle(path);
    in.level1 = in.pyramid->level(1);
  } else {
    in.level1 = read_fmap(path);
  }
  return in;
}

RdCurve read_curve(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidInputError("cannot open " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw InvalidInputError(path + ": " + e.what());
  }
  if (j.is_object()) j = j.value("points", json::array());
  if (!j.is_array()) throw InvalidInputError(path + ": expected an array of points");
  std::vector<RdPoint> points;
  for (const json& p : j) {
    if (!p.is_object() || !p.contains("bpp")) {
      throw InvalidInputError(path + ": every point needs bpp");
    }
    points.push_back({p.at("bpp").get<double>(), p.value("psnr", 0.0), p.value("ms_ssim", 0.0)});
  }
  return RdCurve(std::move(points));
}

std::pair<int, int> parse_size(const std::string& s) {
  int h = 0;
  int w = 0;
  char x = 0;
  if (std::sscanf(s.c_str(), "%d%c%d", &h, &x, &w) != 3 || (x != 'x' && x != 'X') || h <= 0 ||
      w <= 0) {
    throw ConfigError("size must look like HxW, got '" + s + "'");
  }
  return {h, w};
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const GeometryError*>(&e)) return kGeometry;
  if (dynamic_cast<const ConfigError*>(&e)) return kConfig;
  return kInvalidInput;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Multi-scale feature-domain patch matching decoder for distributed image coding"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--threads", o.threads, "worker threads (0 = hardware concurrency)");
  app.add_option("--out,-o", o.out, "write the JSON report here instead of stdout");

  // encode
  std::string image_path, latent_out;
  auto* encode_cmd = app.add_subcommand("encode", "crop, encode and quantize an image");
  encode_cmd->add_option("--image", image_path)->required();
  encode_cmd->add_option("--latent-out", latent_out, "quantized latent (FMAP1)")->required();
  add_config_options(encode_cmd, o);

  // decode
  std::string latent_in, pyramid_out, image_out;
  auto* decode_cmd = app.add_subcommand("decode", "decode a latent into features and X_hat_1");
  decode_cmd->add_option("--latent", latent_in)->required();
  decode_cmd->add_option("--pyramid-out", pyramid_out, "decoded feature bundle directory");
  decode_cmd->add_option("--image-out", image_out, "X_hat_1 as .png, .ppm or .fmap");
  add_config_options(decode_cmd, o);

  // extract
  auto* extract_cmd = app.add_subcommand("extract", "lossless side features of an image");
  extract_cmd->add_option("--image", image_path)->required();
  extract_cmd->add_option("--pyramid-out", pyramid_out)->required();
  add_config_options(extract_cmd, o);

  // match
  std::string main_in, side_in, lossless_in, aligned_out;
  auto* match_cmd = app.add_subcommand("match", "patch matching and alignment");
  match_cmd->add_option("--main", main_in, "decoded main features (.fmap level 1 or bundle)")
      ->required();
  match_cmd->add_option("--side", side_in, "decoded side features (.fmap level 1 or bundle)")
      ->required();
  match_cmd->add_option("--lossless", lossless_in, "lossless side feature bundle")
      ->required();
  match_cmd->add_option("--aligned-out", aligned_out, "aligned feature bundle directory");
  add_config_options(match_cmd, o);
  add_reuse_options(match_cmd, o);

  // fuse
  std::string x1_in, fmap_out;
  auto* fuse_cmd = app.add_subcommand("fuse", "fuse features and form X_hat_2");
  fuse_cmd->add_option("--main", main_in, "decoded main feature bundle")
      ->required();
  fuse_cmd->add_option("--aligned", aligned_out, "aligned feature bundle")
      ->required();
  fuse_cmd->add_option("--x1", x1_in, "first-stage reconstruction (FMAP1)")
      ->required();
  fuse_cmd->add_option("--image-out", image_out, "X_hat_2 as .png or .ppm");
  fuse_cmd->add_option("--fmap-out", fmap_out, "X_hat_2 as FMAP1");
  add_config_options(fuse_cmd, o);

  // run
  std::string x1_out, x2_out;
  auto* run_cmd = app.add_subcommand("run", "end-to-end decode with side information");
  run_cmd->add_option("--main", main_in)->required();
  run_cmd->add_option("--side", side_in)->required();
  run_cmd->add_option("--x1-out", x1_out, "X_hat_1 as .png, .ppm or .fmap");
  run_cmd->add_option("--x2-out", x2_out, "X_hat_2 as .png, .ppm or .fmap");
  run_cmd->add_flag("--no-timings", o.no_timings, "omit wall-clock timings from the report");
  add_config_options(run_cmd, o);
  add_reuse_options(run_cmd, o);

  // eval
  std::string ref_image, test_image, ref_curve, test_curve, bd_method = "cubic";
  std::optional<double> gain_before, gain_after;
  auto* eval_cmd = app.add_subcommand("eval", "image metrics, BD-rate or performance reduction");
  eval_cmd->add_option("--reference", ref_image);
  eval_cmd->add_option("--test", test_image);
  eval_cmd->add_option("--ref-curve", ref_curve, "JSON array of {bpp, psnr, ms_ssim}");
  eval_cmd->add_option("--test-curve", test_curve);
  eval_cmd->add_option("--bd-method", bd_method, "cubic or pchip")->capture_default_str();
  eval_cmd->add_option("--gain-before", gain_before, "quality gain with the clean side image");
  eval_cmd->add_option("--gain-after", gain_after, "quality gain with the perturbed side image");

  // sweep
  std::string kind = "brightness", metric = "ms_ssim";
  std::vector<double> factors = {0.6, 0.8, 1.0, 1.2, 1.4};
  auto* sweep_cmd = app.add_subcommand("sweep", "performance reduction under side perturbation");
  sweep_cmd->add_option("--main", main_in)->required();
  sweep_cmd->add_option("--side", side_in)->required();
  sweep_cmd->add_option("--kind", kind, "brightness or scale")->capture_default_str();
  sweep_cmd->add_option("--factors", factors, "comma separated, must include 1.0")
      ->delimiter(',')
      ->capture_default_str();
  sweep_cmd->add_option("--metric", metric, "ms_ssim or psnr")->capture_default_str();
  add_config_options(sweep_cmd, o);
  add_reuse_options(sweep_cmd, o);

  // bench
  std::string synthetic = "128x384";
  int repetitions = 9;
  int shift = 5;
  auto* bench_cmd = app.add_subcommand("bench", "reuse vs per-level matching cost");
  bench_cmd->add_option("--main", main_in);
  bench_cmd->add_option("--side", side_in);
  bench_cmd->add_option("--synthetic", synthetic, "HxW of a generated shifted pair")
      ->capture_default_str();
  bench_cmd->add_option("--shift", shift, "column shift of the generated pair")
      ->capture_default_str();
  bench_cmd->add_option("--repetitions", repetitions)->capture_default_str();
  add_config_options(bench_cmd, o);

  // gen-weights
  std::string weights_out;
  auto* gen_cmd = app.add_subcommand("gen-weights", "write a seeded weights bundle");
  gen_cmd->add_option("--out-dir", weights_out)->required();
  add_config_options(gen_cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (o.threads < 0) throw ConfigError("--threads must be >= 0");
    set_num_threads(o.threads);
    PipelineConfig& config = o.config;
    config.reuse = !o.no_reuse;
    config.record_timings = !o.no_timings;

    if (*encode_cmd) {
      const ModelWeights model = load_model(config);
      CropInfo crop;
      const FeatureMap image = load_cropped(image_path, config, &crop);
      const Latent latent = encode(image, model.codec, config.step);
      write_fmap(latent_out, latent.values);
      const double bpp = bpp_estimate(latent, image.height(), image.width());
      emit(o, json{{"schema", kReportSchema},
                   {"latent", latent_out},
                   {"latent_shape",
                    {latent.values.height(), latent.values.width(), latent.values.channels()}},
                   {"q", config.step},
                   {"bpp", bpp},
                   {"bpp_entropy_bound", bpp},
                   {"crop", crop_json(crop)}}
                  .dump(2));
    } else if (*decode_cmd) {
      const ModelWeights model = load_model(config);
      const Latent latent{quantize(read_fmap(latent_in), config.step), config.step};
      const DecodedMain decoded = decode_multiscale(latent, model.codec);
      if (!pyramid_out.empty()) write_pyramid_bundle(pyramid_out, decoded.pyramid);
      save_output(image_out, decoded.image);
      emit(o, json{{"schema", kReportSchema},
                   {"height", decoded.image.height()},
                   {"width", decoded.image.width()},
                   {"channels", decoded.pyramid.channels()},
                   {"pyramid", pyramid_out},
                   {"image", image_out}}
                  .dump(2));
    } else if (*extract_cmd) {
      const ModelWeights model = load_model(config);
      CropInfo crop;
      const FeatureMap image = load_cropped(image_path, config, &crop);
      const FeaturePyramid pyramid = extract_lossless_features(image, model.codec);
      write_pyramid_bundle(pyramid_out, pyramid);
      emit(o, json{{"schema", kReportSchema},
                   {"pyramid", pyramid_out},
                   {"channels", pyramid.channels()},
                   {"crop", crop_json(crop)}}
                  .dump(2));
    } else if (*match_cmd) {
      config.validate();
      const FeatureInput main = read_features(main_in);
      const FeatureInput side = read_features(side_in);
      const FeaturePyramid lossless = read_pyramid_bundle(lossless_in);
      MatchResult result;
      if (config.reuse) {
        result = match_with_reuse(main.level1, side.level1, lossless, config.patch_size,
                                  config.effective_sigma());
      } else {
        if (!main.pyramid || !side.pyramid) {
          throw InvalidInputError("--no-reuse needs feature bundles for --main and --side");
        }
        result = match_features(MatchingInputs{*main.pyramid, *side.pyramid, lossless},
                                config.patch_size, config.effective_sigma(), false);
      }
      if (!aligned_out.empty()) write_pyramid_bundle(aligned_out, result.aligned);
      json best = json::object();
      for (int h = 1; h <= kPyramidLevels; ++h) {
        best["level" + std::to_string(h)] = indices_json(result.best[h - 1]);
      }
      emit(o, json{{"schema", kReportSchema},
                   {"patch_size", config.patch_size},
                   {"sigma", finite_or_null(config.effective_sigma())},
                   {"reuse", config.reuse},
                   {"main_patches", {main.level1.height() / config.patch_size,
                                     main.level1.width() / config.patch_size}},
                   {"field_bytes", result.field_bytes},
                   {"best", best},
                   {"aligned", aligned_out}}
                  .dump(2));
    } else if (*fuse_cmd) {
      const ModelWeights model = load_model(config);
      const FeaturePyramid main = read_pyramid_bundle(main_in);
      const FeaturePyramid aligned = read_pyramid_bundle(aligned_out);
      const FeatureMap x1 = read_fmap(x1_in);
      const FeatureMap x2 = clamp_unit(reconstruct(fuse_all(main, aligned, model.fusion), x1,
                                                   model.fusion));
      save_output(image_out, x2);
      if (!fmap_out.empty()) write_fmap(fmap_out, x2);
      emit(o, json{{"schema", kReportSchema},
                   {"height", x2.height()},
                   {"width", x2.width()},
                   {"image", image_out},
                   {"fmap", fmap_out}}
                  .dump(2));
    } else if (*run_cmd) {
      const ModelWeights model = load_model(config);
      const PipelineResult result =
          run_pipeline(load_image(main_in), load_image(side_in), config, model);
      save_output(x1_out, result.x_hat_1);
      save_output(x2_out, result.x_hat_2);
      emit(o, report_to_json(result.report));
    } else if (*eval_cmd) {
      json j = {{"schema", kReportSchema}};
      bool any = false;
      if (!ref_image.empty() || !test_image.empty()) {
        if (ref_image.empty() || test_image.empty()) {
          throw ConfigError("--reference and --test go together");
        }
        const FeatureMap a = load_image(ref_image);
        const FeatureMap b = load_image(test_image);
        const MsSsimResult m = ms_ssim_detailed(a, b);
        j["mse"] = mse(a, b);
        j["psnr_db"] = finite_or_null(psnr(a, b, 1.0));
        j["ms_ssim"] = m.value;
        j["ms_ssim_scales"] = m.scales;
        any = true;
      }
      if (!ref_curve.empty() || !test_curve.empty()) {
        if (ref_curve.empty() || test_curve.empty()) {
          throw ConfigError("--ref-curve and --test-curve go together");
        }
        BdMethod method;
        if (bd_method == "cubic") {
          method = BdMethod::kCubicFit;
        } else if (bd_method == "pchip") {
          method = BdMethod::kPiecewiseCubic;
        } else {
          throw ConfigError("unknown --bd-method '" + bd_method + "' (cubic|pchip)");
        }
        const RdCurve ref = read_curve(ref_curve);
        const RdCurve test = read_curve(test_curve);
        j["bd_rate_p"] = bd_rate(ref, test, QualityField::kPsnr, method);
        j["bd_rate_m"] = bd_rate(ref, test, QualityField::kMsSsim, method);
        j["bd_method"] = bd_method;
        any = true;
      }
      if (gain_before || gain_after) {
        if (!gain_before || !gain_after) {
          throw ConfigError("--gain-before and --gain-after go together");
        }
        j["pr"] = performance_reduction(*gain_before, *gain_after);
        any = true;
      }
      if (!any) throw ConfigError("eval needs images, curves or gains");
      emit(o, j.dump(2));
    } else if (*sweep_cmd) {
      config.record_timings = false;
      const ModelWeights model = load_model(config);
      const SweepTable table =
          robustness_sweep(load_image(main_in), load_image(side_in), config, model,
                           perturb_kind_from_string(kind), factors,
                           sweep_metric_from_string(metric));
      emit(o, sweep_to_json(table));
    } else if (*bench_cmd) {
      const ModelWeights model = load_model(config);
      FeatureMap main_image, side_image;
      if (!main_in.empty() || !side_in.empty()) {
        if (main_in.empty() || side_in.empty()) throw ConfigError("--main and --side go together");
        main_image = load_image(main_in);
        side_image = load_image(side_in);
      } else {
        const auto [h, w] = parse_size(synthetic);
        StereoPair pair = shifted_pair(h, w, shift, config.seed);
        main_image = std::move(pair.main);
        side_image = std::move(pair.side);
      }
      emit(o, bench_to_json(bench_reuse(main_image, side_image, config, model, repetitions)));
    } else if (*gen_cmd) {
      config.validate();
      const ModelWeights model = seeded_model_weights(config.seed, config.channels, config.step);
      write_weights_bundle(weights_out, model);
      emit(o, json{{"schema", kReportSchema},
                   {"weights", weights_out},
                   {"channels", config.channels},
                   {"seed", config.seed},
                   {"q", config.step}}
                  .dump(2));
    }
  } catch (const Error& e) {
    std::cerr << "msfdpm: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "msfdpm: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}

}  // namespace msfdpm

int main(int argc, char** argv) { return msfdpm::run_cli(argc, argv); }
