// pitlab/separator.hpp

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

#ifndef PITLAB_SEPARATOR_HPP_
#define PITLAB_SEPARATOR_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pitlab/waveform.hpp"

namespace pitlab {

// Miniature encoder-masker-decoder time-domain separator.
//
//   encoder   conv1d 1 -> n_filters, window `kernel`, stride kernel/2
//   masker    pointwise n_filters -> hidden, tanh, then `masker_blocks`
//             residual blocks (depthwise dilated conv k=3 + pointwise + tanh)
//   heads     one pointwise hidden -> n_filters projection per output
//             channel; sigmoid of the logits is the mask
//   decoder   shared transposed conv n_filters -> 1, overlap-add
//
// All arithmetic is in 64-bit floats and every op has a hand-derived
// backward, so gradients are exact and runs are bitwise reproducible.
struct SeparatorConfig {
  int n_filters = 64;
  int kernel = 16;  // even; stride is kernel/2 (50% overlap)
  int hidden = 128;
  int masker_blocks = 2;
  int dilation_growth = 8;  // block b uses dilation growth^b
  int n_outputs = 2;        // 1 for SSL pre-training, 2 for separation

  int Stride() const { return kernel / 2; }
  void Validate() const;
  bool BodyCompatible(const SeparatorConfig &other) const;
  bool operator==(const SeparatorConfig &) const = default;
};

struct BlockParams {
  std::vector<double> dw_w;  // hidden x 3
  std::vector<double> dw_b;  // hidden
  std::vector<double> pw_w;  // hidden x hidden
  std::vector<double> pw_b;  // hidden
};

struct HeadParams {
  std::vector<double> w;  // n_filters x hidden
  std::vector<double> b;  // n_filters
};

// Trainable tensors, partitioned into body (shared trunk + decoder) and
// per-output-channel heads.  The same layout doubles as the gradient
// container.
struct SeparatorParams {
  std::vector<double> enc_w;  // n_filters x kernel
  std::vector<double> enc_b;  // n_filters
  std::vector<double> proj_w;  // hidden x n_filters
  std::vector<double> proj_b;  // hidden
  std::vector<BlockParams> blocks;
  std::vector<double> dec_w;  // n_filters x kernel
  std::vector<HeadParams> heads;

  int64_t CountParams() const;
};

using GradientSet = SeparatorParams;  // same names and shapes, holds dL/dp

// Metadata for one tensor, used by init, Adam, checkpointing and the
// finite-difference tests.
struct TensorRef {
  std::string name;
  std::vector<double> *data;
  int fan_in;        // 0 for biases (zero-initialized)
  int head_channel;  // -1 for body tensors
};
std::vector<TensorRef> Tensors(SeparatorParams &p, const SeparatorConfig &cfg);

// Weights uniform in (-a, a) with a = sqrt(1/fan_in), biases zero.  Each
// tensor draws from its own (seed, name)-derived stream, so values do not
// depend on how many other tensors exist.
SeparatorParams InitParams(const SeparatorConfig &cfg, uint64_t seed);

// Zero-filled gradient container congruent with cfg.
GradientSet ZeroGradients(const SeparatorConfig &cfg);

bool CongruentWith(const SeparatorParams &p, const SeparatorConfig &cfg);

// Activation record from Forward, consumed by Backward.
struct SeparatorCache {
  int input_len = 0;   // L
  int padded_len = 0;  // (T-1)*stride + kernel
  int n_frames = 0;    // T
  SeparatorConfig cfg;
  std::vector<int> channels;  // which output channels were computed

  std::vector<double> x_pad;                // padded_len
  std::vector<double> enc;                  // T x n_filters
  std::vector<double> proj;                 // T x hidden, post-tanh
  std::vector<std::vector<double>> blk_u;   // per block, T x hidden (pre-pw)
  std::vector<std::vector<double>> blk_v;   // per block, T x hidden (post-tanh)
  std::vector<std::vector<double>> trunk;   // per block, running residual sum
  std::vector<std::vector<double>> logits;  // per computed channel, T x n_filters
  std::vector<std::vector<double>> mask;    // per computed channel, sigmoid(logits)
  std::vector<std::vector<double>> masked;  // per computed channel, mask * enc

  const std::vector<double> &TrunkOut() const {
    return trunk.empty() ? proj : trunk.back();
  }
};

// Runs the model on one mixture.  Every output waveform has exactly the
// input's length.  `channels` selects which output heads to evaluate
// (empty = all); outputs[i] corresponds to channels[i].
std::vector<Waveform> Forward(const SeparatorParams &params,
                              const SeparatorConfig &cfg, const Waveform &mix,
                              SeparatorCache *cache,
                              const std::vector<int> &channels = {});

// Upstream gradients for Backward.  Any component may be left empty.
//  d_outputs[i]     dL/d(output waveform of cache.channels[i]), length L
//  d_mask_logits[i] dL/d(pre-sigmoid head logits), T x n_filters
//  d_encoder        dL/d(encoder features), T x n_filters
struct UpstreamGrads {
  std::vector<std::vector<double>> d_outputs;
  std::vector<std::vector<double>> d_mask_logits;
  std::vector<double> d_encoder;
};

// Exact gradients of the scalar loss that produced the upstream grads.
// Accumulates into *grads (callers zero it or chain several losses).
void Backward(const SeparatorParams &params, const SeparatorConfig &cfg,
              const SeparatorCache &cache, const UpstreamGrads &up,
              GradientSet *grads);

// Encoder-only forward; used by the contrastive task's target branch.
struct FrameFeatures {
  int n_frames = 0;
  int padded_len = 0;
  std::vector<double> x_pad;
  std::vector<double> enc;  // T x n_filters
};
FrameFeatures EncodeFrames(const SeparatorParams &params,
                           const SeparatorConfig &cfg, const Waveform &wave);

// Encoder weight gradients for an EncodeFrames pass.
void EncoderBackward(const SeparatorConfig &cfg, const FrameFeatures &feat,
                     const std::vector<double> &d_enc, GradientSet *grads);

// Frame count the encoder produces for a given input length.
int NumFrames(const SeparatorConfig &cfg, int input_len);

// Body tensors copied bitwise from `pretrained`; every head tensor of the
// target config freshly initialized from `seed`, including channels that
// could have been copied.  Configs must agree except in n_outputs.
SeparatorParams TransferParams(const SeparatorParams &pretrained,
                               const SeparatorConfig &pre_cfg,
                               const SeparatorConfig &target_cfg,
                               uint64_t seed);

}  // namespace pitlab

#endif  // PITLAB_SEPARATOR_HPP_
