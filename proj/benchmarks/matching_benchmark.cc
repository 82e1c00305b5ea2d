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

#include <benchmark/benchmark.h>

#include "msfdpm/extractor.h"
#include "msfdpm/matcher.h"
#include "msfdpm/pipeline.h"
#include "msfdpm/synthetic.h"

namespace msfdpm {
namespace {

constexpr int kChannels = 8;
constexpr int kPatch = 16;

MatchingInputs make_inputs(int height, int width) {
  PipelineConfig config;
  config.channels = kChannels;
  config.patch_size = kPatch;
  const ModelWeights model = seeded_model_weights(config.seed, kChannels);
  const StereoPair pair = shifted_pair(height, width, 5, 7);
  return prepare_matching_inputs(pair.main, pair.side, config, model);
}

void BM_Matching(benchmark::State& state, bool reuse) {
  const int height = static_cast<int>(state.range(0));
  const MatchingInputs inputs = make_inputs(height, 3 * height);
  std::size_t bytes = 0;
  for (auto _ : state) {
    MatchResult m = match_features(inputs, kPatch, 2.0 * kPatch, reuse);
    bytes = m.field_bytes;
    benchmark::DoNotOptimize(m);
  }
  state.counters["field_bytes"] = static_cast<double>(bytes);
}

void BM_MatchReuse(benchmark::State& state) { BM_Matching(state, true); }
void BM_MatchPerLevel(benchmark::State& state) { BM_Matching(state, false); }

void BM_CorrelationField(benchmark::State& state) {
  const int height = static_cast<int>(state.range(0));
  const MatchingInputs inputs = make_inputs(height, 3 * height);
  for (auto _ : state) {
    benchmark::DoNotOptimize(correlation_field(inputs.main_decoded.level(1),
                                               inputs.side_decoded.level(1), kPatch,
                                               2.0 * kPatch));
  }
}

void BM_GaussianMask(benchmark::State& state) {
  const int height = static_cast<int>(state.range(0)) / 2;
  const PatchGrid main_grid = make_patch_grid(height, 3 * height, kPatch, kPatch);
  const PatchGrid side_grid = make_patch_grid(height, 3 * height, kPatch, 1);
  const GaussianMask mask(2.0 * kPatch);
  for (auto _ : state) benchmark::DoNotOptimize(mask.table(main_grid, side_grid));
}

void BM_Encode(benchmark::State& state) {
  const int height = static_cast<int>(state.range(0));
  const CodecWeights weights = seeded_reference_weights(1, kChannels);
  const FeatureMap image = textured_image(height, 3 * height, 3);
  for (auto _ : state) benchmark::DoNotOptimize(encode(image, weights, 1.0));
}

BENCHMARK(BM_MatchReuse)->Arg(64)->Arg(128)->Arg(192)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MatchPerLevel)->Arg(64)->Arg(128)->Arg(192)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CorrelationField)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GaussianMask)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Encode)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace msfdpm

BENCHMARK_MAIN();
