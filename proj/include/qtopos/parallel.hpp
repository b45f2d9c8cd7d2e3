// Copyright 2026 The qtopos developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

namespace qtopos {

// Execution policy for the enumeration kernels.  Parallel kernels write to
// disjoint preallocated slots, so results are identical to the serial
// reference implementation.
enum class Exec { Serial, Parallel };

// Bodies must not throw when mode is Parallel.
template <typename F>
void par_for(Exec mode, int n, F&& f) {
#ifdef _OPENMP
  if (mode == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
#endif
  (void)mode;
  for (int i = 0; i < n; ++i) f(i);
}

}  // namespace qtopos
