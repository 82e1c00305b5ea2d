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

#ifndef MSFDPM_PARALLEL_H_
#define MSFDPM_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace msfdpm {

// Process-wide worker count used by the data-parallel kernels. Values < 1
// select std::thread::hardware_concurrency().
void set_num_threads(int threads);
int num_threads();

// Runs fn(i) for every i in [0, count). Each index is processed by exactly
// one worker and work items never share accumulators, so results do not
// depend on the worker count. The first exception thrown by any item is
// rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace msfdpm

#endif  // MSFDPM_PARALLEL_H_
