// waveform.cpp

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

#include "pitlab/waveform.hpp"

#include <cmath>

#include "pitlab/common.hpp"

namespace pitlab {

namespace {
double Energy(const std::vector<double> &v) {
  double e = 0.0;
  for (double x : v) e += x * x;
  return e;
}
}  // namespace

void ValidateCombinable(const std::vector<const Waveform *> &waves) {
  PITLAB_CHECK_STRUCTURAL(!waves.empty(), "no waveforms given");
  const Waveform &first = *waves[0];
  PITLAB_CHECK_STRUCTURAL(first.Size() > 0, "empty waveform");
  for (const Waveform *w : waves) {
    PITLAB_CHECK_STRUCTURAL(w->Size() == first.Size(),
                            "waveform length mismatch");
    PITLAB_CHECK_STRUCTURAL(w->sample_rate == first.sample_rate,
                            "sample rate mismatch");
    for (double x : w->samples)
      PITLAB_CHECK_STRUCTURAL(std::isfinite(x), "non-finite sample");
  }
}

Waveform Mix(const std::vector<Waveform> &sources,
             const std::vector<double> &gains) {
  PITLAB_CHECK_STRUCTURAL(!sources.empty(), "mix of zero sources");
  PITLAB_CHECK_STRUCTURAL(sources.size() == gains.size(),
                          "one gain per source required");
  std::vector<const Waveform *> ptrs;
  ptrs.reserve(sources.size());
  for (const Waveform &s : sources) ptrs.push_back(&s);
  ValidateCombinable(ptrs);
  for (double g : gains)
    PITLAB_CHECK_STRUCTURAL(std::isfinite(g), "non-finite gain");

  Waveform out;
  out.sample_rate = sources[0].sample_rate;
  out.samples.assign(sources[0].samples.size(), 0.0);
  for (size_t s = 0; s < sources.size(); ++s) {
    const double g = gains[s];
    const std::vector<double> &src = sources[s].samples;
    for (size_t i = 0; i < src.size(); ++i) out.samples[i] += g * src[i];
  }
  return out;
}

double NoiseGainForSnr(const Waveform &clean, const Waveform &noise,
                       double snr_db) {
  ValidateCombinable({&clean, &noise});
  const double e_clean = Energy(clean.samples);
  const double e_noise = Energy(noise.samples);
  PITLAB_CHECK_DEGENERATE(e_clean > 0.0, "zero-energy clean signal");
  PITLAB_CHECK_DEGENERATE(e_noise > 0.0, "zero-energy noise");
  return std::sqrt(e_clean / (e_noise * std::pow(10.0, snr_db / 10.0)));
}

Waveform AddNoiseAtSnr(const Waveform &clean, const Waveform &noise,
                       double snr_db) {
  const double g = NoiseGainForSnr(clean, noise, snr_db);
  Waveform out = clean;
  for (int i = 0; i < out.Size(); ++i) out.samples[i] += g * noise.samples[i];
  return out;
}

bool CheckMixtureSum(const MixtureExample &ex, double tol) {
  const int n = ex.mixture.Size();
  for (const Waveform &s : ex.sources)
    if (s.Size() != n) return false;
  if (ex.noise && ex.noise->Size() != n) return false;
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (const Waveform &s : ex.sources) sum += s.samples[i];
    if (ex.noise) sum += ex.noise->samples[i];
    if (std::abs(sum - ex.mixture.samples[i]) > tol) return false;
  }
  return true;
}

}  // namespace pitlab
