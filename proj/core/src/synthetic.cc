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

#include "msfdpm/synthetic.h"

#include <vector>

#include "msfdpm/error.h"
#include "msfdpm/rng.h"

namespace msfdpm {
namespace {

constexpr int kLattice = 8;
constexpr double kNoiseShare = 0.3;

}  // namespace

FeatureMap textured_image(int height, int width, std::uint64_t seed, double lo, double hi) {
  if (height <= 0 || width <= 0) throw InvalidInputError("texture dims must be positive");
  if (!(lo <= hi)) throw InvalidInputError("texture range is empty");
  SplitMix64 rng(seed);
  const int gh = height / kLattice + 2;
  const int gw = width / kLattice + 2;
  std::vector<double> lattice(static_cast<std::size_t>(gh) * gw * 3);
  for (double& v : lattice) v = rng.uniform();

  FeatureMap out(height, width, 3);
  for (int y = 0; y < height; ++y) {
    const int gy = y / kLattice;
    const double ty = static_cast<double>(y % kLattice) / kLattice;
    for (int x = 0; x < width; ++x) {
      const int gx = x / kLattice;
      const double tx = static_cast<double>(x % kLattice) / kLattice;
      for (int c = 0; c < 3; ++c) {
        auto g = [&](int yy, int xx) {
          return lattice[(static_cast<std::size_t>(yy) * gw + xx) * 3 + c];
        };
        const double top = g(gy, gx) + (g(gy, gx + 1) - g(gy, gx)) * tx;
        const double bottom = g(gy + 1, gx) + (g(gy + 1, gx + 1) - g(gy + 1, gx)) * tx;
        const double smooth = top + (bottom - top) * ty;
        const double v = (1 - kNoiseShare) * smooth + kNoiseShare * rng.uniform();
        out.at(y, x, c) = lo + (hi - lo) * v;
      }
    }
  }
  return out;
}

StereoPair shifted_pair(int height, int width, int shift, std::uint64_t seed, double lo,
                        double hi) {
  if (shift < 0 || shift >= width) throw InvalidInputError("shift must lie in [0, width)");
  const FeatureMap wide = textured_image(height, width + shift, seed, lo, hi);
  StereoPair pair{FeatureMap(height, width, 3), FeatureMap(height, width, 3)};
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) {
        pair.main.at(y, x, c) = wide.at(y, x + shift, c);
        pair.side.at(y, x, c) = wide.at(y, x, c);
      }
    }
  }
  return pair;
}

}  // namespace msfdpm
