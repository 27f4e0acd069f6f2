// pitlab/waveform.hpp

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

#ifndef PITLAB_WAVEFORM_HPP_
#define PITLAB_WAVEFORM_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pitlab {

constexpr int kSampleRate = 8000;  // fixed for the whole lab

// Mono sample sequence, nominal range [-1, 1].  The one signal carrier:
// mixtures, sources and model outputs are all Waveforms.
struct Waveform {
  std::vector<double> samples;
  int sample_rate = kSampleRate;

  Waveform() = default;
  explicit Waveform(std::vector<double> s, int rate = kSampleRate)
      : samples(std::move(s)), sample_rate(rate) {}

  int Size() const { return static_cast<int>(samples.size()); }
  double DurationSec() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// One training item: mixture plus its ground-truth sources.  A single
// source (with noise) is the self-supervised corpus case.
struct MixtureExample {
  std::string id;
  Waveform mixture;
  std::vector<Waveform> sources;
  std::optional<Waveform> noise;
};

// Checks finiteness, nonzero length and equal length/rate across waveforms.
void ValidateCombinable(const std::vector<const Waveform *> &waves);

// Elementwise sum of gain-scaled sources.  Lengths and rates must agree.
Waveform Mix(const std::vector<Waveform> &sources,
             const std::vector<double> &gains);

// clean + g*noise with g chosen so the realized SNR of the result against
// `clean` is exactly snr_db.  Both signals need nonzero energy.
Waveform AddNoiseAtSnr(const Waveform &clean, const Waveform &noise,
                       double snr_db);

// Scale factor used by AddNoiseAtSnr, exposed for reuse by task builders.
double NoiseGainForSnr(const Waveform &clean, const Waveform &noise,
                       double snr_db);

// True iff mixture == sum of sources (+ noise) within tol per sample.
bool CheckMixtureSum(const MixtureExample &ex, double tol = 1e-6);

}  // namespace pitlab

#endif  // PITLAB_WAVEFORM_HPP_
