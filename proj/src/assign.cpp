// assign.cpp

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

#include "pitlab/assign.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "pitlab/common.hpp"

namespace pitlab {

namespace {

// Sum of the chosen entries in output-index order.  Both solvers report
// totals through this one function so optimal costs compare bitwise.
double TotalInRowOrder(const LossMatrix &m, const std::vector<int> &perm) {
  double total = 0.0;
  for (int i = 0; i < m.n; ++i) total += m.At(i, perm[i]);
  return total;
}

// Swaps tied pairs toward the lexicographically smallest permutation.
// Detects two-cycles of exact cost ties; deeper tie structures are left
// as the solver produced them.
void LexicographicPolish(const LossMatrix &m, std::vector<int> *perm) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < m.n; ++i) {
      for (int k = i + 1; k < m.n; ++k) {
        const int pi = (*perm)[i], pk = (*perm)[k];
        if (pk < pi &&
            m.At(i, pi) + m.At(k, pk) == m.At(i, pk) + m.At(k, pi)) {
          std::swap((*perm)[i], (*perm)[k]);
          changed = true;
        }
      }
    }
  }
}

}  // namespace

LossMatrix PairwiseLossMatrix(const std::vector<Waveform> &outputs,
                              const std::vector<Waveform> &targets,
                              const PairLossFn &loss) {
  PITLAB_CHECK_STRUCTURAL(!outputs.empty(), "no outputs");
  PITLAB_CHECK_STRUCTURAL(outputs.size() == targets.size(),
                          "output/target count mismatch");
  LossMatrix m;
  m.n = static_cast<int>(outputs.size());
  m.values.resize(static_cast<size_t>(m.n) * m.n);
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) m.At(i, j) = loss(outputs[i], targets[j]);
  return m;
}

Assignment BestAssignmentBruteForce(const LossMatrix &m) {
  PITLAB_CHECK_STRUCTURAL(m.n >= 1, "empty matrix");
  if (m.n > 8)
    throw CapabilityError(
        "brute-force assignment limited to n <= 8; use the Hungarian solver");
  std::vector<int> perm(m.n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_total = TotalInRowOrder(m, perm);
  // next_permutation walks lexicographically, so keeping strict improvements
  // leaves the lexicographically smallest permutation among ties.
  while (std::next_permutation(perm.begin(), perm.end())) {
    const double total = TotalInRowOrder(m, perm);
    if (total < best_total) {
      best_total = total;
      best = perm;
    }
  }
  return Assignment{best, best_total};
}

Assignment BestAssignmentHungarian(const LossMatrix &m) {
  PITLAB_CHECK_STRUCTURAL(m.n >= 1, "empty matrix");
  for (double v : m.values)
    PITLAB_CHECK_STRUCTURAL(std::isfinite(v), "non-finite loss entry");

  // Shortest-augmenting-path Kuhn-Munkres with potentials, 1-based
  // internals.  p[j] is the row matched to column j.
  const int n = m.n;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = m.At(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> perm(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] != 0) perm[p[j] - 1] = j - 1;
  LexicographicPolish(m, &perm);
  return Assignment{perm, TotalInRowOrder(m, perm)};
}

PitResult PitLoss(const std::vector<Waveform> &outputs,
                  const std::vector<Waveform> &targets,
                  const PairLossFn &loss) {
  PitResult res;
  res.matrix = PairwiseLossMatrix(outputs, targets, loss);
  res.assignment = res.matrix.n <= 4 ? BestAssignmentBruteForce(res.matrix)
                                     : BestAssignmentHungarian(res.matrix);
  res.mean_pair_loss = res.assignment.total_loss / res.matrix.n;
  return res;
}

void SwitchLog::Record(int epoch, const std::string &example_id,
                       const std::vector<int> &perm) {
  by_epoch_[epoch][example_id] = perm;
}

bool SwitchLog::HasEpoch(int epoch) const { return by_epoch_.count(epoch) > 0; }

const std::map<std::string, std::vector<int>> &SwitchLog::Epoch(
    int epoch) const {
  auto it = by_epoch_.find(epoch);
  PITLAB_CHECK_STRUCTURAL(it != by_epoch_.end(), "epoch not recorded");
  return it->second;
}

std::vector<int> SwitchLog::Epochs() const {
  std::vector<int> out;
  out.reserve(by_epoch_.size());
  for (const auto &kv : by_epoch_) out.push_back(kv.first);
  return out;
}

double SwitchLog::SwitchPercentage(int epoch_a, int epoch_b) const {
  const auto &a = Epoch(epoch_a);
  const auto &b = Epoch(epoch_b);
  PITLAB_CHECK_STRUCTURAL(a.size() == b.size(),
                          "epochs cover different id sets");
  int differing = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end(); ++ia, ++ib) {
    PITLAB_CHECK_STRUCTURAL(ia->first == ib->first,
                            "epochs cover different id sets");
    if (ia->second != ib->second) ++differing;
  }
  if (a.empty()) return 0.0;
  return 100.0 * differing / static_cast<double>(a.size());
}

void SwitchLog::Serialize(std::ostream &os) const {
  for (const auto &[epoch, ids] : by_epoch_) {
    for (const auto &[id, perm] : ids) {
      os << epoch << '\t' << id << '\t';
      for (int t : perm) os << t;  // single digits; this lab never has n > 10
      os << '\n';
    }
  }
}

SwitchLog SwitchLog::Deserialize(std::istream &is) {
  SwitchLog log;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    int epoch = 0;
    std::string id, digits;
    PITLAB_CHECK_STRUCTURAL(static_cast<bool>(ls >> epoch >> id >> digits),
                            "malformed switch-log line: " + line);
    std::vector<int> perm;
    perm.reserve(digits.size());
    for (char c : digits) {
      PITLAB_CHECK_STRUCTURAL(c >= '0' && c <= '9',
                              "malformed permutation digits: " + digits);
      perm.push_back(c - '0');
    }
    log.Record(epoch, id, perm);
  }
  return log;
}

}  // namespace pitlab
