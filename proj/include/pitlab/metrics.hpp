// pitlab/metrics.hpp

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

#ifndef PITLAB_METRICS_HPP_
#define PITLAB_METRICS_HPP_

#include <vector>

#include "pitlab/waveform.hpp"

namespace pitlab {

// All dB metrics are capped to [-60, +60] so perfect or degenerate
// estimates stay finite and epoch statistics remain comparable.
constexpr double kDbCap = 60.0;

// Scale-invariant SNR in dB: project est onto ref, compare projection
// energy against residual energy.  Both signals are mean-subtracted first.
// Zero-energy ref raises DegenerateInputError; an estimate orthogonal to
// ref hits the -60 dB cap rather than erroring.
double SiSnr(const Waveform &est, const Waveform &ref);

// Projection SI-SNR without the mean subtraction step; the core SiSnr is
// built on.  Exposed separately so tests can pin the projection arithmetic
// on signals with nonzero mean.
double SiSnrNoMeanRemoval(const Waveform &est, const Waveform &ref);

// SiSnr(est, ref) - SiSnr(mixture, ref).
double SiSnrImprovement(const Waveform &est, const Waveform &ref,
                        const Waveform &mixture);

// Plain (scale-sensitive) SNR in dB with the same cap.  Stands in for
// BSS-eval SDR; no distortion filter.
double Snr(const Waveform &est, const Waveform &ref);

// Snr(est, ref) - Snr(mixture, ref).
double SdrImprovement(const Waveform &est, const Waveform &ref,
                      const Waveform &mixture);

// Training loss: -SiSnr(est, ref), with d(loss)/d(est) written into `grad`
// (resized to est length).  The gradient is exactly zero where the dB cap
// is active.  Returns the loss value.
double NegSiSnrLossGrad(const std::vector<double> &est,
                        const std::vector<double> &ref,
                        std::vector<double> *grad);

}  // namespace pitlab

#endif  // PITLAB_METRICS_HPP_
