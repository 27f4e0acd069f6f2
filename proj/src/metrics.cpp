// metrics.cpp

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

#include "pitlab/metrics.hpp"

#include <cmath>

#include "pitlab/common.hpp"

namespace pitlab {

namespace {

constexpr double kLn10 = 2.302585092994045684;

double Dot(const std::vector<double> &a, const std::vector<double> &b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double Mean(const std::vector<double> &v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double ClampDb(double ratio_num, double ratio_den) {
  // 10*log10(num/den) with the cap; num==0 or den==0 resolve to the caps
  // instead of infinities.
  if (ratio_num <= 0.0) return -kDbCap;
  if (ratio_den <= 0.0) return kDbCap;
  double db = 10.0 * std::log10(ratio_num / ratio_den);
  if (db > kDbCap) return kDbCap;
  if (db < -kDbCap) return -kDbCap;
  return db;
}

}  // namespace

double SiSnrNoMeanRemoval(const Waveform &est, const Waveform &ref) {
  ValidateCombinable({&est, &ref});
  const double ref_energy = Dot(ref.samples, ref.samples);
  PITLAB_CHECK_DEGENERATE(ref_energy > 0.0, "zero-energy reference");
  const double alpha = Dot(est.samples, ref.samples) / ref_energy;
  const double proj_energy = alpha * alpha * ref_energy;
  double err_energy = 0.0;
  for (size_t i = 0; i < est.samples.size(); ++i) {
    const double e = est.samples[i] - alpha * ref.samples[i];
    err_energy += e * e;
  }
  return ClampDb(proj_energy, err_energy);
}

double SiSnr(const Waveform &est, const Waveform &ref) {
  ValidateCombinable({&est, &ref});
  Waveform est_c = est, ref_c = ref;
  const double em = Mean(est_c.samples), rm = Mean(ref_c.samples);
  for (double &x : est_c.samples) x -= em;
  for (double &x : ref_c.samples) x -= rm;
  return SiSnrNoMeanRemoval(est_c, ref_c);
}

double SiSnrImprovement(const Waveform &est, const Waveform &ref,
                        const Waveform &mixture) {
  return SiSnr(est, ref) - SiSnr(mixture, ref);
}

double Snr(const Waveform &est, const Waveform &ref) {
  ValidateCombinable({&est, &ref});
  const double ref_energy = Dot(ref.samples, ref.samples);
  PITLAB_CHECK_DEGENERATE(ref_energy > 0.0, "zero-energy reference");
  double err_energy = 0.0;
  for (size_t i = 0; i < est.samples.size(); ++i) {
    const double e = ref.samples[i] - est.samples[i];
    err_energy += e * e;
  }
  return ClampDb(ref_energy, err_energy);
}

double SdrImprovement(const Waveform &est, const Waveform &ref,
                      const Waveform &mixture) {
  return Snr(est, ref) - Snr(mixture, ref);
}

double NegSiSnrLossGrad(const std::vector<double> &est,
                        const std::vector<double> &ref,
                        std::vector<double> *grad) {
  PITLAB_CHECK_STRUCTURAL(est.size() == ref.size() && !est.empty(),
                          "length mismatch in loss");
  const size_t n = est.size();
  grad->assign(n, 0.0);

  const double em = Mean(est), rm = Mean(ref);
  double ref_energy = 0.0, dot_er = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double r = ref[i] - rm;
    ref_energy += r * r;
    dot_er += (est[i] - em) * r;
  }
  PITLAB_CHECK_DEGENERATE(ref_energy > 0.0, "zero-energy reference");

  const double alpha = dot_er / ref_energy;
  const double proj_energy = alpha * alpha * ref_energy;
  double err_energy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double e = (est[i] - em) - alpha * (ref[i] - rm);
    err_energy += e * e;
  }

  if (proj_energy <= 0.0 || err_energy <= 0.0) {
    // Capped region; flat loss, zero gradient.
    return proj_energy <= 0.0 ? kDbCap : -kDbCap;
  }
  double db = 10.0 * std::log10(proj_energy / err_energy);
  if (db >= kDbCap) return -kDbCap;
  if (db <= -kDbCap) return kDbCap;

  // d(-si_snr)/d(est_centered) = -(20/ln10) * (alpha*r/P - e/E),
  // then project out the mean to chain through the centering step.
  const double c = 20.0 / kLn10;
  const double k_proj = c * alpha / proj_energy;
  const double k_err = c / err_energy;
  double gsum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double r = ref[i] - rm;
    const double e = (est[i] - em) - alpha * r;
    const double g = -(k_proj * r - k_err * e);
    (*grad)[i] = g;
    gsum += g;
  }
  const double gmean = gsum / static_cast<double>(n);
  for (size_t i = 0; i < n; ++i) (*grad)[i] -= gmean;
  return -db;
}

}  // namespace pitlab
