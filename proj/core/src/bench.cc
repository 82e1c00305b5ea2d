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

#include "msfdpm/bench.h"

#include <algorithm>
#include <chrono>
#include <vector>

#include "json.hpp"
#include "msfdpm/error.h"

namespace msfdpm {
namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

nlohmann::json path_json(const PathStats& s) {
  return {{"median_ms", s.median_ms},
          {"median_mask_ms", s.median_mask_ms},
          {"field_bytes", s.field_bytes}};
}

}  // namespace

BenchReport bench_reuse(const MatchingInputs& inputs, const PipelineConfig& config,
                        int repetitions) {
  config.validate();
  if (repetitions < 5) throw ConfigError("bench needs at least 5 repetitions");
  const double sigma = config.effective_sigma();

  std::vector<double> reuse_ms, reuse_mask, level_ms, level_mask;
  MatchResult reuse, per_level;
  for (int r = 0; r < repetitions; ++r) {
    for (const bool use_reuse : {true, false}) {
      const auto start = std::chrono::steady_clock::now();
      MatchResult m = match_features(inputs, config.patch_size, sigma, use_reuse);
      const double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
              .count();
      (use_reuse ? reuse_ms : level_ms).push_back(ms);
      (use_reuse ? reuse_mask : level_mask).push_back(m.mask_seconds * 1e3);
      (use_reuse ? reuse : per_level) = std::move(m);
    }
  }

  BenchReport report;
  report.height = inputs.main_decoded.base_height();
  report.width = inputs.main_decoded.base_width();
  report.channels = inputs.main_decoded.channels();
  report.patch_size = config.patch_size;
  report.repetitions = repetitions;
  report.reuse = {median(reuse_ms), median(reuse_mask), reuse.field_bytes};
  report.per_level = {median(level_ms), median(level_mask), per_level.field_bytes};
  for (int h = 1; h <= kPyramidLevels; ++h) {
    const auto& a = reuse.best[h - 1];
    const auto& b = per_level.best[h - 1];
    std::size_t differ = 0;
    for (std::size_t t = 0; t < a.size(); ++t) differ += a[t] != b[t];
    report.disagreement[h - 1] = a.empty() ? 0.0 : static_cast<double>(differ) / a.size();
  }
  report.level1_identical = reuse.best[0] == per_level.best[0] &&
                            reuse.aligned.level(1) == per_level.aligned.level(1);
  report.aligned_identical = reuse.aligned == per_level.aligned;
  return report;
}

BenchReport bench_reuse(const FeatureMap& main_image, const FeatureMap& side_image,
                        const PipelineConfig& config, const ModelWeights& model,
                        int repetitions) {
  if (repetitions < 5) throw ConfigError("bench needs at least 5 repetitions");
  return bench_reuse(prepare_matching_inputs(main_image, side_image, config, model), config,
                     repetitions);
}

std::string bench_to_json(const BenchReport& r, int indent) {
  nlohmann::json j = {
      {"schema", kReportSchema},
      {"height", r.height},
      {"width", r.width},
      {"channels", r.channels},
      {"patch_size", r.patch_size},
      {"repetitions", r.repetitions},
      {"reuse", path_json(r.reuse)},
      {"per_level", path_json(r.per_level)},
      {"disagreement_rate", r.disagreement},
      {"level1_identical", r.level1_identical},
      {"aligned_identical", r.aligned_identical},
  };
  return j.dump(indent);
}

}  // namespace msfdpm
