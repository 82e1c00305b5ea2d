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

#ifndef MSFDPM_BENCH_H_
#define MSFDPM_BENCH_H_

#include <array>
#include <cstddef>
#include <string>

#include "msfdpm/pipeline.h"

namespace msfdpm {

struct PathStats {
  double median_ms = 0;        // matching + alignment wall time
  double median_mask_ms = 0;   // Gaussian mask generation inside that time
  std::size_t field_bytes = 0; // score, mask and index storage of all fields
};

struct BenchReport {
  int height = 0;  // cropped main image size
  int width = 0;
  int channels = 0;
  int patch_size = 0;
  int repetitions = 0;
  PathStats reuse;
  PathStats per_level;
  // Fraction of main patches whose side index differs between the two
  // paths, per level (index h - 1). Level 1 is always 0.
  std::array<double, kPyramidLevels> disagreement{};
  bool level1_identical = true;
  bool aligned_identical = true;  // all four aligned levels equal
};

// Times layer-1 matching with index reuse against independent matching at
// every level on the same decoded features. Runs alternate between the two
// paths so drift affects both equally. Throws ConfigError if
// repetitions < 5.
BenchReport bench_reuse(const MatchingInputs& inputs, const PipelineConfig& config,
                        int repetitions);
BenchReport bench_reuse(const FeatureMap& main_image, const FeatureMap& side_image,
                        const PipelineConfig& config, const ModelWeights& model,
                        int repetitions);

std::string bench_to_json(const BenchReport& report, int indent = 2);

}  // namespace msfdpm

#endif  // MSFDPM_BENCH_H_
