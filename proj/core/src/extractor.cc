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

#include "msfdpm/extractor.h"

#include <cmath>
#include <string>

#include "msfdpm/error.h"
#include "msfdpm/rng.h"

namespace msfdpm {
namespace {

void check_stage(const ConvStage& stage, const std::string& name, int out, int in,
                 Resample resample, bool activated) {
  if (stage.out_channels() != out || stage.in_channels() != in ||
      stage.resample() != resample || stage.leaky_slope().has_value() != activated) {
    throw ConfigError("stage " + name + " is " + std::to_string(stage.in_channels()) + "->" +
                      std::to_string(stage.out_channels()) + " " + to_string(stage.resample()) +
                      ", expected " + std::to_string(in) + "->" + std::to_string(out) + " " +
                      to_string(resample));
  }
}

void check_image(const FeatureMap& image) {
  if (image.channels() != kImageChannels) {
    throw InvalidInputError("expected a 3-channel image, got " +
                            std::to_string(image.channels()) + " channels");
  }
  if (image.height() % 16 != 0 || image.width() % 16 != 0) {
    throw GeometryError("image " + std::to_string(image.height()) + "x" +
                        std::to_string(image.width()) + " is not divisible by 16");
  }
}

}  // namespace

void CodecWeights::validate() const {
  if (channels <= 0) throw ConfigError("codec channel count must be positive");
  if (encoder.size() != 4 || decoder.size() != 4 || head.size() != 1 || extractor.size() != 4) {
    throw ConfigError("codec needs 4 encoder, 4 decoder, 1 head and 4 extractor stages");
  }
  const int c = channels;
  for (int s = 0; s < 4; ++s) {
    const std::string n = std::to_string(s);
    check_stage(encoder[s], "encoder." + n, c, s == 0 ? kImageChannels : c, Resample::kDown,
                s != 3);
    check_stage(decoder[s], "decoder." + n, c, c, s == 0 ? Resample::kNone : Resample::kUp,
                true);
    check_stage(extractor[s], "extractor." + n, c, s == 0 ? kImageChannels : c,
                Resample::kDown, true);
  }
  check_stage(head[0], "head", kImageChannels, c, Resample::kUp, false);
}

FeatureMap quantize(const FeatureMap& map, double step) {
  if (!(step > 0) || !std::isfinite(step)) {
    throw ConfigError("quantization step must be positive and finite");
  }
  FeatureMap out = map;
  for (double& v : out.values()) v = std::round(v / step) * step;
  return out;
}

Latent encode(const FeatureMap& image, const CodecWeights& weights, double step) {
  check_image(image);
  weights.validate();
  FeatureMap x = weights.encoder[0].forward(image);
  for (int s = 1; s < 4; ++s) x = weights.encoder[s].forward(x);
  return Latent{quantize(x, step), step};
}

DecodedMain decode_multiscale(const Latent& latent, const CodecWeights& weights) {
  weights.validate();
  if (latent.values.channels() != weights.channels) {
    throw ConfigError("latent has " + std::to_string(latent.values.channels()) +
                      " channels, weights expect " + std::to_string(weights.channels));
  }
  std::array<FeatureMap, kPyramidLevels> levels;
  FeatureMap x = weights.decoder[0].forward(latent.values);
  levels[3] = x;
  for (int s = 1; s < 4; ++s) {
    x = weights.decoder[s].forward(x);
    levels[3 - s] = x;
  }
  FeatureMap image = weights.head[0].forward(levels[0]);
  return DecodedMain{FeaturePyramid(std::move(levels)), std::move(image)};
}

FeaturePyramid extract_lossless_features(const FeatureMap& image, const CodecWeights& weights) {
  check_image(image);
  weights.validate();
  std::array<FeatureMap, kPyramidLevels> levels;
  levels[0] = weights.extractor[0].forward(image);
  for (int s = 1; s < 4; ++s) levels[s] = weights.extractor[s].forward(levels[s - 1]);
  return FeaturePyramid(std::move(levels));
}

namespace {

ConvStage scaled(const ConvStage& stage, double gain) {
  std::vector<double> kernel(stage.kernel().begin(), stage.kernel().end());
  for (double& w : kernel) w *= gain;
  return ConvStage(stage.out_channels(), stage.in_channels(), stage.kernel_size(),
                   stage.resample(), stage.leaky_slope(), std::move(kernel),
                   std::vector<double>(stage.bias().begin(), stage.bias().end()));
}

}  // namespace

CodecWeights seeded_reference_weights(std::uint64_t seed, int channels) {
  if (channels < 1) throw ConfigError("channel count must be at least 1");
  SplitMix64 rng(seed);
  const int c = channels;
  CodecWeights w;
  w.channels = c;
  w.provenance = "seed:" + std::to_string(seed);
  for (int s = 0; s < 4; ++s) {
    w.encoder.push_back(random_conv_stage(rng, c, s == 0 ? kImageChannels : c, kCodecKernel,
                                          Resample::kDown,
                                          s == 3 ? std::nullopt : std::optional(kLeakySlope)));
  }
  for (int s = 0; s < 4; ++s) {
    w.decoder.push_back(random_conv_stage(rng, c, c, kCodecKernel,
                                          s == 0 ? Resample::kNone : Resample::kUp,
                                          kLeakySlope));
  }
  w.head.push_back(
      random_conv_stage(rng, kImageChannels, c, kCodecKernel, Resample::kUp, std::nullopt));
  for (int s = 0; s < 4; ++s) {
    w.extractor.push_back(random_conv_stage(rng, c, s == 0 ? kImageChannels : c, kCodecKernel,
                                            Resample::kDown, kLeakySlope));
  }
  w.encoder[3] = scaled(w.encoder[3], kSeededLatentGain);
  w.decoder[0] = scaled(w.decoder[0], 1.0 / kSeededLatentGain);
  return w;
}

}  // namespace msfdpm
