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

#ifndef MSFDPM_PERTURB_H_
#define MSFDPM_PERTURB_H_

#include <string>

#include "msfdpm/tensor.h"

namespace msfdpm {

enum class PerturbKind { kBrightness, kScale };

struct PerturbSpec {
  PerturbKind kind = PerturbKind::kBrightness;
  double factor = 1.0;  // > 0
};

PerturbKind perturb_kind_from_string(const std::string& s);
std::string to_string(PerturbKind kind);

// brightness: per-value multiply, then clamp to [0, 1].
// scale: bilinear resize (half-pixel centers, edge clamped) by `factor`,
// then center crop or zero pad back to the original dims.
FeatureMap perturb(const FeatureMap& image, const PerturbSpec& spec);

}  // namespace msfdpm

#endif  // MSFDPM_PERTURB_H_
