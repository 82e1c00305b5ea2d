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

#ifndef MSFDPM_SYNTHETIC_H_
#define MSFDPM_SYNTHETIC_H_

#include <cstdint>

#include "msfdpm/tensor.h"

namespace msfdpm {

// Seeded RGB texture in [lo, hi]: bilinear value noise on an 8-pixel
// lattice plus per-pixel white noise, so every window is distinct.
FeatureMap textured_image(int height, int width, std::uint64_t seed, double lo = 0.1,
                          double hi = 0.9);

struct StereoPair {
  FeatureMap main;
  FeatureMap side;
};

// Horizontal stereo stand-in: side(y, x) == main(y, x - shift) wherever
// both are defined. The columns that enter from the left are fresh texture.
StereoPair shifted_pair(int height, int width, int shift, std::uint64_t seed, double lo = 0.1,
                        double hi = 0.9);

}  // namespace msfdpm

#endif  // MSFDPM_SYNTHETIC_H_
