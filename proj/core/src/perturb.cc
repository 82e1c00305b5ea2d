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

#include "msfdpm/perturb.h"

#include <algorithm>
#include <cmath>

#include "msfdpm/error.h"

namespace msfdpm {
namespace {

FeatureMap resize_bilinear(const FeatureMap& in, int out_h, int out_w) {
  FeatureMap out(out_h, out_w, in.channels());
  const double sy = static_cast<double>(in.height()) / out_h;
  const double sx = static_cast<double>(in.width()) / out_w;
  for (int y = 0; y < out_h; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, in.height() - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, in.height() - 1);
    const double ty = fy - y0;
    for (int x = 0; x < out_w; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, in.width() - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, in.width() - 1);
      const double tx = fx - x0;
      for (int c = 0; c < in.channels(); ++c) {
        const double top = in.at(y0, x0, c) + (in.at(y0, x1, c) - in.at(y0, x0, c)) * tx;
        const double bottom = in.at(y1, x0, c) + (in.at(y1, x1, c) - in.at(y1, x0, c)) * tx;
        out.at(y, x, c) = top + (bottom - top) * ty;
      }
    }
  }
  return out;
}

}  // namespace

PerturbKind perturb_kind_from_string(const std::string& s) {
  if (s == "brightness") return PerturbKind::kBrightness;
  if (s == "scale") return PerturbKind::kScale;
  throw ConfigError("unknown perturbation '" + s + "' (brightness|scale)");
}

std::string to_string(PerturbKind kind) {
  return kind == PerturbKind::kBrightness ? "brightness" : "scale";
}

FeatureMap perturb(const FeatureMap& image, const PerturbSpec& spec) {
  if (!(spec.factor > 0) || !std::isfinite(spec.factor)) {
    throw ConfigError("perturbation factor must be positive");
  }
  if (spec.kind == PerturbKind::kBrightness) {
    FeatureMap out = image;
    for (double& v : out.values()) v = std::clamp(v * spec.factor, 0.0, 1.0);
    return out;
  }
  const int h = image.height();
  const int w = image.width();
  const int sh = std::max(1, static_cast<int>(std::lround(h * spec.factor)));
  const int sw = std::max(1, static_cast<int>(std::lround(w * spec.factor)));
  const FeatureMap scaled = resize_bilinear(image, sh, sw);
  FeatureMap out(h, w, image.channels());
  // Offsets of the scaled image inside the output; negative means cropped.
  const int top = (h - sh) / 2;
  const int left = (w - sw) / 2;
  for (int y = 0; y < h; ++y) {
    const int src_y = y - top;
    if (src_y < 0 || src_y >= sh) continue;
    for (int x = 0; x < w; ++x) {
      const int src_x = x - left;
      if (src_x < 0 || src_x >= sw) continue;
      for (int c = 0; c < image.channels(); ++c) out.at(y, x, c) = scaled.at(src_y, src_x, c);
    }
  }
  return out;
}

}  // namespace msfdpm
