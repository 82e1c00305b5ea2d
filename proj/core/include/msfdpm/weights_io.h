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

#ifndef MSFDPM_WEIGHTS_IO_H_
#define MSFDPM_WEIGHTS_IO_H_

#include <cstdint>
#include <filesystem>

#include "msfdpm/extractor.h"
#include "msfdpm/fusion.h"

namespace msfdpm {

// Everything the decoder needs: autoencoder, side extractor, fusion network
// and the quantization step the latent was produced with.
struct ModelWeights {
  CodecWeights codec;
  FusionWeights fusion;
  double step = 1.0;
};

// Codec from seeded_reference_weights(seed, C); fusion from
// seeded_fusion_weights(seed ^ kFusionSeedSalt, C).
inline constexpr std::uint64_t kFusionSeedSalt = 0xF0510Dull;
ModelWeights seeded_model_weights(std::uint64_t seed, int channels, double step = 1.0);

// Weights bundle: a directory with manifest.json listing every stage (name,
// shape, resample mode, activation, kernel and bias file) plus the leaky
// slope and quantization step. Kernels are FMAP1 files of dims
// (out, in, k * k); biases are (out, 1, 1).
void write_weights_bundle(const std::filesystem::path& dir, const ModelWeights& weights);
// Throws InvalidInputError for unreadable files and ConfigError when a
// stored shape disagrees with the manifest or the stage layout.
ModelWeights read_weights_bundle(const std::filesystem::path& dir);

}  // namespace msfdpm

#endif  // MSFDPM_WEIGHTS_IO_H_
