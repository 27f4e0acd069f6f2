// pitlab/parallel.hpp

// Copyright 2026  pit-lab authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef PITLAB_PARALLEL_HPP_
#define PITLAB_PARALLEL_HPP_

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pitlab {

// Execution mode for the data-parallel kernels.  Serial is the reference
// path; Parallel distributes loop iterations over OpenMP threads.  Every
// kernel written against ParallelFor must produce bitwise-identical results
// in both modes: iterations write to disjoint, index-addressed slots and
// any reduction happens afterwards in index order.
enum class ExecMode { kSerial, kParallel };

inline int MaxThreads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

template <typename F>
void ParallelFor(int n, ExecMode mode, F &&fn) {
  if (mode == ExecMode::kParallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) fn(i);
    return;
#endif
  }
  for (int i = 0; i < n; ++i) fn(i);
}

}  // namespace pitlab

#endif  // PITLAB_PARALLEL_HPP_
