// Copyright 2026 The PSR-Lab Authors
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

#ifndef PSRLAB_UTIL_PARALLEL_H_
#define PSRLAB_UTIL_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace psrlab {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Work items must be
// independent and write only to their own output slots; under that contract
// the result does not depend on the worker count. workers <= 1 runs inline.
// The first exception thrown by any item is rethrown after all threads join.
void ParallelFor(std::size_t n, int workers,
                 const std::function<void(std::size_t)>& fn);

}  // namespace psrlab

#endif  // PSRLAB_UTIL_PARALLEL_H_
