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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "msfdpm/bench.h"
#include "msfdpm/error.h"
#include "msfdpm/fusion.h"
#include "msfdpm/matcher.h"
#include "msfdpm/metrics.h"
#include "msfdpm/parallel.h"
#include "msfdpm/pipeline.h"
#include "msfdpm/rng.h"
#include "msfdpm/synthetic.h"
#include "oracles.h"
#include "test_util.h"

namespace msfdpm {
namespace {

using testing::max_abs_diff;
using testing::random_map;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

FeaturePyramid random_pyramid(int h, int w, int c, std::uint64_t seed) {
  return FeaturePyramid({random_map(h / 2, w / 2, c, seed), random_map(h / 4, w / 4, c, seed + 1),
                         random_map(h / 8, w / 8, c, seed + 2),
                         random_map(h / 16, w / 16, c, seed + 3)});
}

// Side map equal to `main` moved right by `shift` columns.
FeatureMap shift_right(const FeatureMap& main, int shift, std::uint64_t seed) {
  FeatureMap side = random_map(main.height(), main.width(), main.channels(), seed);
  for (int y = 0; y < main.height(); ++y) {
    for (int x = shift; x < main.width(); ++x) {
      for (int c = 0; c < main.channels(); ++c) side.at(y, x, c) = main.at(y, x - shift, c);
    }
  }
  return side;
}

// 1. Convolution-form field against the brute-force masked-Pearson oracle.
Outcome matching_oracle_equivalence() {
  constexpr int kInstances = 120;
  constexpr double kTolerance = 1e-5;
  const auto start = std::chrono::steady_clock::now();
  SplitMix64 rng(2024);
  const int patch_sizes[] = {4, 8, 16};
  double worst = 0;
  int argmax_mismatch = 0;
  for (int n = 0; n < kInstances; ++n) {
    const int b = patch_sizes[n % 3];
    const int h = b * (1 + static_cast<int>(rng.next() % (64 / b)));
    const int w = b * (1 + static_cast<int>(rng.next() % (64 / b)));
    const int c = 1 + static_cast<int>(rng.next() % 8);
    const FeatureMap main = random_map(h, w, c, rng.next());
    // Half the instances use a related side map so the argmax is meaningful.
    FeatureMap side = n % 2 == 0 ? random_map(h, w, c, rng.next())
                                 : shift_right(main, static_cast<int>(rng.next() % b), rng.next());
    const double sigma = n % 4 == 3 ? kInf : b * (0.5 + 3.0 * rng.uniform());
    const CorrelationField f = correlation_field(main, side, b, sigma);
    const oracle::BruteField o = oracle::masked_pearson_field(main, side, b, sigma);
    std::size_t t = 0;
    for (int j = 0; j < o.count_j; ++j) {
      for (int i = 0; i < o.count_i; ++i, ++t) {
        const auto scores = f.scores(i, j);
        for (std::size_t s = 0; s < scores.size(); ++s) {
          worst = std::max(worst, std::abs(scores[s] - o.scores[t * scores.size() + s]));
        }
        argmax_mismatch += f.best(i, j) != o.best[t];
      }
    }
  }
  const double secs = seconds_since(start);
  return {worst <= kTolerance && argmax_mismatch == 0 && secs < 120.0,
          fmt("%d instances, max |score diff| %.3g (tol 1e-5), argmax mismatches %d, %.1f s "
              "(limit 120 s)",
              kInstances, worst, argmax_mismatch, secs)};
}

// 2. Exhaustive lift/reuse checks over layer-1 grids up to 64.
Outcome index_mapping() {
  constexpr int kGrid = 64;
  long checked = 0;
  long failures = 0;
  for (int h = 2; h <= kPyramidLevels; ++h) {
    const int f = 1 << (h - 1);
    for (int k = 0; k < kGrid; ++k) {
      for (int l = 0; l < kGrid; ++l) {
        const SideIndex layer1{k, l};
        const SideIndex down = reuse_index(h, layer1);
        failures += down != SideIndex{k / f, l / f};
        const SideIndex back = lift_index(h, down);
        failures += !(back.k <= k && k < back.k + f && back.l <= l && l < back.l + f);
        if (k % f == 0 && l % f == 0) failures += back != layer1;
        if (k < kGrid / f && l < kGrid / f) {
          const SideIndex level_h{k, l};
          const SideIndex lifted = lift_index(h, level_h);
          failures += lifted != SideIndex{k * f, l * f};
          failures += reuse_index(h, lifted) != level_h;
        }
        ++checked;
      }
    }
    // Main patch (i, j) keeps its index at every level: the level-h
    // non-overlapping grid has the same extent as the layer-1 grid.
    for (int b : {8, 16, 32}) {
      for (int size_h = b; size_h <= kGrid; size_h += b) {
        for (int size_w = b; size_w <= kGrid; size_w += b) {
          const PatchGrid g1 = make_patch_grid(size_h, size_w, b, b);
          const PatchGrid gh = make_patch_grid(size_h / f, size_w / f, b / f, b / f);
          failures += g1.count_i() != gh.count_i() || g1.count_j() != gh.count_j();
        }
      }
    }
  }
  return {failures == 0, fmt("%ld (h, k, l) triples, %ld mismatches (exact)", checked, failures)};
}

// 3. Shifted-texture recovery and pyramid alignment.
Outcome shifted_texture() {
  long interior_wrong = 0;
  long level1_values_wrong = 0;
  long pyramid_wrong = 0;
  int cases = 0;
  for (int b : {8, 16}) {
    const FeatureMap main = random_map(64, 128, 4, 31 + b);
    const FeaturePyramid lossless = random_pyramid(128, 256, 3, 77 + b);
    for (int t = 1; t < b; ++t, ++cases) {
      const FeatureMap side = shift_right(main, t, 500 + t);
      const CorrelationField f = correlation_field(main, side, b, 2.0 * b);
      const FeaturePyramid aligned = align_all_levels(f, lossless, b);
      for (int j = 0; j < f.main_grid().count_j(); ++j) {
        for (int i = 0; i < f.main_grid().count_i(); ++i) {
          if (i * b + t > f.side_grid().max_i) continue;  // border patch
          interior_wrong += f.best(i, j) != SideIndex{i * b + t, j * b};
          for (int y = j * b; y < (j + 1) * b; ++y) {
            for (int x = i * b; x < (i + 1) * b; ++x) {
              for (int c = 0; c < 3; ++c) {
                level1_values_wrong += aligned.level(1).at(y, x, c) != lossless.level(1).at(y, x + t, c);
              }
            }
          }
        }
      }
      for (int h = 1; h <= kPyramidLevels; ++h) {
        std::vector<SideIndex> mapped;
        for (const SideIndex& s : f.best_indices()) {
          mapped.push_back({s.k >> (h - 1), s.l >> (h - 1)});
        }
        pyramid_wrong += aligned.level(h) != oracle::align(lossless.level(h), b >> (h - 1), mapped);
      }
    }
  }
  return {interior_wrong == 0 && level1_values_wrong == 0 && pyramid_wrong == 0,
          fmt("%d (B, t) cases: interior index errors %ld, shifted level-1 value errors %ld, "
              "pyramid levels differing from oracle %ld (exact)",
              cases, interior_wrong, level1_values_wrong, pyramid_wrong)};
}

// 4. Affine change of the side features leaves scores and argmax identical.
Outcome affine_invariance() {
  long score_diffs = 0;
  long argmax_diffs = 0;
  long scores_seen = 0;
  int cases = 0;
  const int patch_sizes[] = {4, 8, 16};
  for (int n = 0; n < 6; ++n) {
    const int b = patch_sizes[n % 3];
    const FeatureMap main = random_map(48, 64, 1 + n, 900 + n);
    const FeatureMap side = n % 2 == 0 ? shift_right(main, n % b, 950 + n)
                                       : random_map(48, 64, 1 + n, 960 + n);
    const CorrelationField ref = correlation_field(main, side, b, 2.0 * b);
    for (double a : {0.6, 0.8, 1.25, 1.5}) {
      for (double off : {-0.1, 0.1}) {
        FeatureMap moved = side;
        for (double& v : moved.values()) v = a * v + off;
        const CorrelationField f = correlation_field(main, moved, b, 2.0 * b);
        ++cases;
        for (int j = 0; j < ref.main_grid().count_j(); ++j) {
          for (int i = 0; i < ref.main_grid().count_i(); ++i) {
            const auto x = ref.scores(i, j);
            const auto y = f.scores(i, j);
            for (std::size_t s = 0; s < x.size(); ++s) score_diffs += x[s] != y[s];
            scores_seen += static_cast<long>(x.size());
            argmax_diffs += ref.best(i, j) != f.best(i, j);
          }
        }
      }
    }
  }
  return {score_diffs == 0 && argmax_diffs == 0,
          fmt("%d (map, a, b) cases, %ld scores: %ld differ, %ld argmax differ (bit-exact)", cases,
              scores_seen, score_diffs, argmax_diffs)};
}

// 5. Worked performance-reduction example.
Outcome pr_worked_example() {
  const double pr = performance_reduction(0.02, 0.015);
  return {pr == 0.25, fmt("performance_reduction(0.02, 0.015) = %.17g (expected 0.25 = 25%%)", pr)};
}

// 6. RD loss at alpha 0 and 1 against hand computation.
Outcome rd_loss_endpoints() {
  struct Case {
    double entropy, d1, d2, lambda;
  };
  const Case cases[] = {{2.0, 0.5, 0.5, 0.035}, {0.8, 0.01, 0.002, 0.005},
                        {1.37, 0.0042, 0.0031, 0.1}, {0.0, 3.0, 1.0, 0.0125}};
  double worst = 0;
  for (const Case& c : cases) {
    worst = std::max(worst, std::abs(rd_loss(c.entropy, c.d1, c.d2, c.lambda, 0.0) -
                                     (c.entropy + c.lambda * c.d1)));
    worst = std::max(worst, std::abs(rd_loss(c.entropy, c.d1, c.d2, c.lambda, 1.0) -
                                     (c.entropy + c.lambda * c.d2)));
  }
  const double example = rd_loss(2.0, 0.5, 0.5, 0.035, 0.4);
  worst = std::max(worst, std::abs(example - 2.0175));
  return {worst <= 1e-12, fmt("%zu cases at alpha 0 and 1 plus (2, 0.5, 0.5, 0.035): max error "
                              "%.3g (tol 1e-12)",
                              std::size(cases), worst)};
}

// 7. BD-rate on identical, halved and doubled curves.
Outcome bd_rate_sanity() {
  const double bpp[] = {0.08, 0.15, 0.31, 0.6, 1.2};
  const double q[] = {27.4, 30.1, 32.9, 35.2, 37.3};
  const double m[] = {0.88, 0.925, 0.952, 0.969, 0.981};
  auto curve = [&](double scale) {
    std::vector<RdPoint> pts;
    for (int t = 0; t < 5; ++t) pts.push_back({bpp[t] * scale, q[t], m[t]});
    return pts;
  };
  const RdCurve ref(curve(1.0));
  const double same = bd_rate(ref, ref, QualityField::kPsnr);
  const double half = bd_rate(ref, RdCurve(curve(0.5)), QualityField::kPsnr);
  const double twice = bd_rate(ref, RdCurve(curve(2.0)), QualityField::kPsnr);
  const double half_m = bd_rate(ref, RdCurve(curve(0.5)), QualityField::kMsSsim);
  const double oracle_half = oracle::bd_rate_linear(curve(1.0), curve(0.5));
  const double oracle_twice = oracle::bd_rate_linear(curve(1.0), curve(2.0));
  const bool pass = std::abs(same) < 1e-9 && std::abs(half + 50.0) <= 0.5 &&
                    std::abs(twice - 100.0) <= 1.0 && std::abs(half_m + 50.0) <= 0.5 &&
                    std::abs(half - oracle_half) <= 0.5 && std::abs(twice - oracle_twice) <= 1.0;
  return {pass, fmt("identical %.3g%%, halved %.4f%% (oracle %.4f%%), doubled %.4f%% (oracle "
                    "%.4f%%), halved on MS-SSIM %.4f%%",
                    same, half, oracle_half, twice, oracle_twice, half_m)};
}

// 8. Fusion forward pass against the naive-loop oracle.
Outcome fusion_oracle() {
  constexpr int kC = 8;
  const FusionWeights w = seeded_fusion_weights(17, kC);
  double worst = 0;
  FeatureMap prev;
  for (int h = 4; h >= 1; --h) {
    const FeatureMap main = random_map(64 >> h, 96 >> h, kC, 10 + h);
    const FeatureMap aligned = random_map(64 >> h, 96 >> h, kC, 20 + h);
    const FeatureMap* p = h == 4 ? nullptr : &prev;
    const FeatureMap got = fuse_level(h, main, aligned, p, w);
    worst = std::max(worst, max_abs_diff(got, oracle::fuse_level(h, main, aligned, p, w)));
    prev = got;
  }
  const FeatureMap x1 = random_map(64, 96, 3, 30, 0, 1);
  worst = std::max(worst, max_abs_diff(reconstruct(prev, x1, w), oracle::reconstruct(prev, x1, w)));
  return {worst <= 1e-5, fmt("levels 4..1 and reconstruct, C=%d: max |diff| %.3g (tol 1e-5)", kC,
                             worst)};
}

// 9. Reuse path is no slower and no larger than per-level matching.
Outcome efficiency_direction() {
  constexpr int kRepetitions = 9;
  PipelineConfig config;
  config.channels = 4;
  config.patch_size = 16;
  const ModelWeights model = seeded_model_weights(config.seed, config.channels, config.step);
  const std::pair<int, int> sizes[] = {{64, 192}, {128, 384}, {256, 768}};
  bool pass = true;
  std::string detail = fmt("C=%d B=%d reps=%d;", config.channels, config.patch_size, kRepetitions);
  for (const auto& [h, w] : sizes) {
    const StereoPair pair = shifted_pair(h, w, 5, 11);
    const MatchingInputs inputs = prepare_matching_inputs(pair.main, pair.side, config, model);
    // Guard against a degenerate workload (flat features skip most work).
    const auto level1 = inputs.main_decoded.level(1).values();
    const auto [lo, hi] = std::minmax_element(level1.begin(), level1.end());
    const BenchReport r = bench_reuse(inputs, config, kRepetitions);
    const bool ok = *hi > *lo && r.reuse.median_ms <= r.per_level.median_ms &&
                    r.reuse.field_bytes <= r.per_level.field_bytes && r.level1_identical;
    pass = pass && ok;
    detail += fmt(" %dx%d: %.1f vs %.1f ms, %zu vs %zu B, disagreement L2-4 %.2f/%.2f/%.2f%s;",
                  h, w, r.reuse.median_ms, r.per_level.median_ms, r.reuse.field_bytes,
                  r.per_level.field_bytes, r.disagreement[1], r.disagreement[2], r.disagreement[3],
                  ok ? "" : " <- violated");
  }
  return {pass, detail};
}

// 10. Bit-identical X_hat_2 and reports across runs and thread counts.
Outcome determinism() {
  PipelineConfig config;
  config.channels = 8;
  config.record_timings = false;
  const ModelWeights model = seeded_model_weights(config.seed, config.channels, config.step);
  const StereoPair pair = shifted_pair(128, 384, 7, 5);
  const int many = std::max(4, static_cast<int>(std::thread::hardware_concurrency()));
  std::vector<PipelineResult> runs;
  for (int threads : {1, 1, many, many}) {
    set_num_threads(threads);
    runs.push_back(run_pipeline(pair.main, pair.side, config, model));
  }
  set_num_threads(0);
  bool same = true;
  for (const PipelineResult& r : runs) {
    same = same && r.x_hat_2 == runs[0].x_hat_2 &&
           report_to_json(r.report) == report_to_json(runs[0].report);
  }
  return {same, fmt("4 runs (1, 1, %d, %d threads) at 128x384: X_hat_2 and JSON report %s", many,
                    many, same ? "bit-identical" : "differ")};
}

// 11. Metric golden values.
Outcome metric_golden_values() {
  const FeatureMap a(8, 8, 3, 100.0);
  const FeatureMap b(8, 8, 3, 101.0);
  const double p = psnr(a, b, 255.0);
  const FeatureMap img = textured_image(192, 256, 3);
  const double ss = ms_ssim(img, img);
  const Latent constant{FeatureMap(4, 6, 8, 2.0), 1.0};
  const double bpp = bpp_estimate(constant, 64, 96);
  return {std::abs(p - 48.1308) <= 1e-3 && ss == 1.0 && bpp == 0.0,
          fmt("psnr(MSE=1, peak=255) = %.7f (48.1308 +- 1e-3), ms_ssim(a, a) = %.17g, constant "
              "latent bpp = %g",
              p, ss, bpp)};
}

}  // namespace
}  // namespace msfdpm

int main() {
  using namespace msfdpm;
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"matching oracle equivalence", matching_oracle_equivalence},
      {"index mapping lift/reuse", index_mapping},
      {"shifted-texture recovery", shifted_texture},
      {"affine invariance", affine_invariance},
      {"performance reduction worked example", pr_worked_example},
      {"rd loss endpoints", rd_loss_endpoints},
      {"bd-rate sanity", bd_rate_sanity},
      {"fusion forward oracle", fusion_oracle},
      {"efficiency direction", efficiency_direction},
      {"determinism", determinism},
      {"metric golden values", metric_golden_values},
  };
  int failed = 0;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, c.name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", index - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
