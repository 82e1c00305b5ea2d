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

#ifndef MSFDPM_TESTS_TEST_UTIL_H_
#define MSFDPM_TESTS_TEST_UTIL_H_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include "msfdpm/rng.h"
#include "msfdpm/tensor.h"

namespace msfdpm::testing {

inline FeatureMap random_map(int h, int w, int c, std::uint64_t seed, double lo = -1.0,
                             double hi = 1.0) {
  SplitMix64 rng(seed);
  FeatureMap m(h, w, c);
  for (double& v : m.values()) v = lo + (hi - lo) * rng.uniform();
  return m;
}

inline double max_abs_diff(const FeatureMap& a, const FeatureMap& b) {
  double d = 0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    d = std::max(d, std::abs(a.values()[t] - b.values()[t]));
  }
  return d;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("msfdpm_" + tag + "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace msfdpm::testing

#endif  // MSFDPM_TESTS_TEST_UTIL_H_
