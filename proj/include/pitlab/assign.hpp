// pitlab/assign.hpp

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

#ifndef PITLAB_ASSIGN_HPP_
#define PITLAB_ASSIGN_HPP_

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "pitlab/waveform.hpp"

namespace pitlab {

// n x n pairwise losses: values[i][j] is the cost of pairing output i with
// target j.
struct LossMatrix {
  int n = 0;
  std::vector<double> values;  // row-major n*n

  double At(int i, int j) const { return values[i * n + j]; }
  double &At(int i, int j) { return values[i * n + j]; }
};

// A chosen output->target permutation and its summed cost.  total_loss is
// always the sum of the chosen entries, accumulated in output-index order.
struct Assignment {
  std::vector<int> perm;
  double total_loss = 0.0;
};

using PairLossFn =
    std::function<double(const Waveform &out, const Waveform &target)>;

// Builds the n x n matrix with exactly n^2 loss evaluations.
LossMatrix PairwiseLossMatrix(const std::vector<Waveform> &outputs,
                              const std::vector<Waveform> &targets,
                              const PairLossFn &loss);

// Exhaustive search over all n! permutations; ties broken by the
// lexicographically smallest permutation.  Guarded at n <= 8; beyond that
// a CapabilityError points at the Hungarian solver.
Assignment BestAssignmentBruteForce(const LossMatrix &m);

// O(n^3) Kuhn-Munkres solver for any n >= 1.  The returned total_loss is
// recomputed from the permutation with the same summation order as the
// brute-force path, so optimal costs compare exactly.  On detectable cost
// ties the permutation is polished toward lexicographic order.
Assignment BestAssignmentHungarian(const LossMatrix &m);

// Matrix construction plus solver (brute force for n <= 4, Hungarian
// above).  Returns the mean per-pair loss under the best assignment, which
// keeps loss magnitude independent of the source count.
struct PitResult {
  double mean_pair_loss = 0.0;
  Assignment assignment;
  LossMatrix matrix;
};
PitResult PitLoss(const std::vector<Waveform> &outputs,
                  const std::vector<Waveform> &targets,
                  const PairLossFn &loss);

// Per-epoch map from example id to the chosen permutation.
class SwitchLog {
 public:
  void Record(int epoch, const std::string &example_id,
              const std::vector<int> &perm);

  bool HasEpoch(int epoch) const;
  const std::map<std::string, std::vector<int>> &Epoch(int epoch) const;
  std::vector<int> Epochs() const;

  // 100 * |{id : perm differs between the two epochs}| / |ids|.  Both
  // epochs must be present and cover the identical id set.
  double SwitchPercentage(int epoch_a, int epoch_b) const;

  // Line format: epoch<TAB>example_id<TAB>perm-as-digits (e.g. "12\tutt_0042\t10").
  void Serialize(std::ostream &os) const;
  static SwitchLog Deserialize(std::istream &is);

 private:
  std::map<int, std::map<std::string, std::vector<int>>> by_epoch_;
};

}  // namespace pitlab

#endif  // PITLAB_ASSIGN_HPP_
