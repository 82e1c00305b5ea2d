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

#ifndef MSFDPM_EXTRACTOR_H_
#define MSFDPM_EXTRACTOR_H_

#include <cstdint>
#include <string>
#include <vector>

#include "msfdpm/conv.h"
#include "msfdpm/tensor.h"

namespace msfdpm {

inline constexpr int kImageChannels = 3;
inline constexpr int kCodecKernel = 5;
// Power of two, so the rescaling of float weights is exact.
inline constexpr double kSeededLatentGain = 16.0;

// Weights of the shared single-image autoencoder plus the lossless side
// feature extractor.
//
//   encoder   : 3->C down, C->C down, C->C down, C->C down (linear)  -> H/16
//   decoder   : C->C none (level 4), C->C up (level 3), C->C up (level 2),
//               C->C up (level 1)
//   head      : C->3 up, linear                                       -> H
//   extractor : 3->C down (level 1), C->C down x3 (levels 2..4)
//
// All kernels are 5x5; hidden stages use leaky-ReLU with slope 0.01.
struct CodecWeights {
  int channels = 0;
  std::vector<ConvStage> encoder;
  std::vector<ConvStage> decoder;
  std::vector<ConvStage> head;  // exactly one stage
  std::vector<ConvStage> extractor;
  std::string provenance;

  // Throws ConfigError if any stage breaks the layout above.
  void validate() const;
};

// Quantized latent: every value is an integer multiple of `step`.
struct Latent {
  FeatureMap values;
  double step = 1.0;
};

// Uniform scalar quantizer: round-to-nearest multiple of `step`, ties away
// from zero. Idempotent.
FeatureMap quantize(const FeatureMap& map, double step);

Latent encode(const FeatureMap& image, const CodecWeights& weights, double step);

struct DecodedMain {
  FeaturePyramid pyramid;  // decoded features, levels 1..4
  FeatureMap image;        // first-stage reconstruction, H x W x 3
};

DecodedMain decode_multiscale(const Latent& latent, const CodecWeights& weights);

// Lossless side features; no quantization on this path.
FeaturePyramid extract_lossless_features(const FeatureMap& image, const CodecWeights& weights);

// Deterministic stand-in for trained weights. Values come from a SplitMix64
// stream seeded with `seed`, consumed stage by stage in the order encoder,
// decoder, head, extractor and within a stage in (out, in, ky, kx) order:
// w = (2u - 1) * sqrt(6 / fan_in), u uniform in [0, 1), rounded to float.
// Biases are zero. The last encoder stage is then multiplied by
// kSeededLatentGain and the first decoder stage divided by it, so a unit
// quantization step neither erases the latent nor leaves it untouched.
CodecWeights seeded_reference_weights(std::uint64_t seed, int channels);

}  // namespace msfdpm

#endif  // MSFDPM_EXTRACTOR_H_
