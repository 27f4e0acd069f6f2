// separator.cpp

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

#include "pitlab/separator.hpp"

#include <cmath>
#include <cstring>
#include <numeric>

#include "pitlab/common.hpp"
#include "pitlab/rng.hpp"

namespace pitlab {

namespace {

// ---- dense kernels ------------------------------------------------------
// Inner loops run over contiguous rows so the compiler can use FMA vectors.

// out[t*B + b] = dot(in[t*A..], W[b*A..]) + bias[b]
void GemmDotBias(const double *in, int T, int A, const double *W,
                 const double *bias, int B, double *out) {
  for (int t = 0; t < T; ++t) {
    const double *x = in + static_cast<size_t>(t) * A;
    double *o = out + static_cast<size_t>(t) * B;
    for (int b = 0; b < B; ++b) {
      const double *w = W + static_cast<size_t>(b) * A;
      double acc = bias ? bias[b] : 0.0;
#pragma omp simd reduction(+ : acc)
      for (int a = 0; a < A; ++a) acc += x[a] * w[a];
      o[b] = acc;
    }
  }
}

// dIn[t*A + a] += sum_b dOut[t*B + b] * W[b*A + a]
void GemmBackData(const double *d_out, int T, int B, const double *W, int A,
                  double *d_in) {
  for (int t = 0; t < T; ++t) {
    const double *g = d_out + static_cast<size_t>(t) * B;
    double *di = d_in + static_cast<size_t>(t) * A;
    for (int b = 0; b < B; ++b) {
      const double c = g[b];
      if (c == 0.0) continue;
      const double *w = W + static_cast<size_t>(b) * A;
#pragma omp simd
      for (int a = 0; a < A; ++a) di[a] += c * w[a];
    }
  }
}

// dW[b*A + a] += sum_t dOut[t*B + b] * in[t*A + a];  dBias[b] += sum_t dOut
void GemmBackWeight(const double *d_out, int T, int B, const double *in, int A,
                    double *d_w, double *d_bias) {
  for (int t = 0; t < T; ++t) {
    const double *g = d_out + static_cast<size_t>(t) * B;
    const double *x = in + static_cast<size_t>(t) * A;
    for (int b = 0; b < B; ++b) {
      const double c = g[b];
      if (d_bias) d_bias[b] += c;
      if (c == 0.0) continue;
      double *w = d_w + static_cast<size_t>(b) * A;
#pragma omp simd
      for (int a = 0; a < A; ++a) w[a] += c * x[a];
    }
  }
}

void TanhInPlace(std::vector<double> &v) {
  for (double &x : v) x = std::tanh(x);
}

double StableSigmoid(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// U[t,h] = sum_j Pin[t + (j-1)*d, h] * w[h*3 + j] + b[h], zero padded.
void DepthwiseForward(const double *in, int T, int H, int d, const double *w,
                      const double *b, double *out) {
  for (int t = 0; t < T; ++t) {
    const double *rm = (t - d >= 0) ? in + static_cast<size_t>(t - d) * H : nullptr;
    const double *r0 = in + static_cast<size_t>(t) * H;
    const double *rp = (t + d < T) ? in + static_cast<size_t>(t + d) * H : nullptr;
    double *o = out + static_cast<size_t>(t) * H;
    if (rm && rp) {
#pragma omp simd
      for (int h = 0; h < H; ++h)
        o[h] = rm[h] * w[h * 3] + r0[h] * w[h * 3 + 1] + rp[h] * w[h * 3 + 2] + b[h];
    } else {
      for (int h = 0; h < H; ++h) {
        double acc = r0[h] * w[h * 3 + 1] + b[h];
        if (rm) acc += rm[h] * w[h * 3];
        if (rp) acc += rp[h] * w[h * 3 + 2];
        o[h] = acc;
      }
    }
  }
}

// dPin[t + (j-1)*d, h] += dU[t,h] * w[h*3 + j]
void DepthwiseBackData(const double *d_u, int T, int H, int d, const double *w,
                       double *d_in) {
  for (int t = 0; t < T; ++t) {
    const double *g = d_u + static_cast<size_t>(t) * H;
    for (int j = 0; j < 3; ++j) {
      const int s = t + (j - 1) * d;
      if (s < 0 || s >= T) continue;
      double *di = d_in + static_cast<size_t>(s) * H;
#pragma omp simd
      for (int h = 0; h < H; ++h) di[h] += g[h] * w[h * 3 + j];
    }
  }
}

// dw[h*3 + j] += sum_t dU[t,h] * Pin[t + (j-1)*d, h];  db[h] += sum_t dU[t,h]
void DepthwiseBackWeight(const double *d_u, const double *in, int T, int H,
                         int d, double *d_w, double *d_b) {
  std::vector<double> acc(static_cast<size_t>(H) * 3, 0.0);
  for (int t = 0; t < T; ++t) {
    const double *g = d_u + static_cast<size_t>(t) * H;
#pragma omp simd
    for (int h = 0; h < H; ++h) d_b[h] += g[h];
    for (int j = 0; j < 3; ++j) {
      const int s = t + (j - 1) * d;
      if (s < 0 || s >= T) continue;
      const double *row = in + static_cast<size_t>(s) * H;
      double *a = acc.data() + static_cast<size_t>(j) * H;
#pragma omp simd
      for (int h = 0; h < H; ++h) a[h] += g[h] * row[h];
    }
  }
  for (int h = 0; h < H; ++h)
    for (int j = 0; j < 3; ++j) d_w[h * 3 + j] += acc[static_cast<size_t>(j) * H + h];
}

int DilationOf(const SeparatorConfig &cfg, int block) {
  int d = 1;
  for (int i = 0; i < block; ++i) d *= cfg.dilation_growth;
  return d;
}

}  // namespace

void SeparatorConfig::Validate() const {
  PITLAB_CHECK_STRUCTURAL(n_filters > 0, "n_filters must be positive");
  PITLAB_CHECK_STRUCTURAL(kernel > 0 && kernel % 2 == 0, "kernel must be positive and even");
  PITLAB_CHECK_STRUCTURAL(hidden > 0, "hidden must be positive");
  PITLAB_CHECK_STRUCTURAL(masker_blocks > 0, "masker_blocks must be positive");
  PITLAB_CHECK_STRUCTURAL(dilation_growth >= 1, "dilation_growth must be >= 1");
  PITLAB_CHECK_STRUCTURAL(n_outputs >= 1, "n_outputs must be >= 1");
}

bool SeparatorConfig::BodyCompatible(const SeparatorConfig &o) const {
  return n_filters == o.n_filters && kernel == o.kernel && hidden == o.hidden &&
         masker_blocks == o.masker_blocks && dilation_growth == o.dilation_growth;
}

int64_t SeparatorParams::CountParams() const {
  int64_t n = enc_w.size() + enc_b.size() + proj_w.size() + proj_b.size() +
              dec_w.size();
  for (const BlockParams &b : blocks)
    n += b.dw_w.size() + b.dw_b.size() + b.pw_w.size() + b.pw_b.size();
  for (const HeadParams &h : heads) n += h.w.size() + h.b.size();
  return n;
}

std::vector<TensorRef> Tensors(SeparatorParams &p, const SeparatorConfig &cfg) {
  std::vector<TensorRef> out;
  out.push_back({"enc.W", &p.enc_w, cfg.kernel, -1});
  out.push_back({"enc.b", &p.enc_b, 0, -1});
  out.push_back({"proj.W", &p.proj_w, cfg.n_filters, -1});
  out.push_back({"proj.b", &p.proj_b, 0, -1});
  for (size_t b = 0; b < p.blocks.size(); ++b) {
    const std::string base = "block" + std::to_string(b);
    out.push_back({base + ".dw.W", &p.blocks[b].dw_w, 3, -1});
    out.push_back({base + ".dw.b", &p.blocks[b].dw_b, 0, -1});
    out.push_back({base + ".pw.W", &p.blocks[b].pw_w, cfg.hidden, -1});
    out.push_back({base + ".pw.b", &p.blocks[b].pw_b, 0, -1});
  }
  out.push_back({"dec.W", &p.dec_w, cfg.n_filters, -1});
  for (size_t c = 0; c < p.heads.size(); ++c) {
    const std::string base = "head" + std::to_string(c);
    out.push_back({base + ".W", &p.heads[c].w, cfg.hidden, static_cast<int>(c)});
    out.push_back({base + ".b", &p.heads[c].b, 0, static_cast<int>(c)});
  }
  return out;
}

static SeparatorParams AllocParams(const SeparatorConfig &cfg) {
  SeparatorParams p;
  p.enc_w.assign(static_cast<size_t>(cfg.n_filters) * cfg.kernel, 0.0);
  p.enc_b.assign(cfg.n_filters, 0.0);
  p.proj_w.assign(static_cast<size_t>(cfg.hidden) * cfg.n_filters, 0.0);
  p.proj_b.assign(cfg.hidden, 0.0);
  p.blocks.resize(cfg.masker_blocks);
  for (BlockParams &b : p.blocks) {
    b.dw_w.assign(static_cast<size_t>(cfg.hidden) * 3, 0.0);
    b.dw_b.assign(cfg.hidden, 0.0);
    b.pw_w.assign(static_cast<size_t>(cfg.hidden) * cfg.hidden, 0.0);
    b.pw_b.assign(cfg.hidden, 0.0);
  }
  p.dec_w.assign(static_cast<size_t>(cfg.n_filters) * cfg.kernel, 0.0);
  p.heads.resize(cfg.n_outputs);
  for (HeadParams &h : p.heads) {
    h.w.assign(static_cast<size_t>(cfg.n_filters) * cfg.hidden, 0.0);
    h.b.assign(cfg.n_filters, 0.0);
  }
  return p;
}

SeparatorParams InitParams(const SeparatorConfig &cfg, uint64_t seed) {
  cfg.Validate();
  SeparatorParams p = AllocParams(cfg);
  for (const TensorRef &t : Tensors(p, cfg)) {
    if (t.fan_in == 0) continue;  // biases stay zero
    Rng rng(DeriveSeed(seed, t.name));
    const double a = std::sqrt(1.0 / t.fan_in);
    for (double &x : *t.data) x = rng.Uniform(-a, a);
  }
  return p;
}

GradientSet ZeroGradients(const SeparatorConfig &cfg) { return AllocParams(cfg); }

bool CongruentWith(const SeparatorParams &p, const SeparatorConfig &cfg) {
  if (p.enc_w.size() != static_cast<size_t>(cfg.n_filters) * cfg.kernel) return false;
  if (p.enc_b.size() != static_cast<size_t>(cfg.n_filters)) return false;
  if (p.proj_w.size() != static_cast<size_t>(cfg.hidden) * cfg.n_filters) return false;
  if (p.proj_b.size() != static_cast<size_t>(cfg.hidden)) return false;
  if (p.blocks.size() != static_cast<size_t>(cfg.masker_blocks)) return false;
  for (const BlockParams &b : p.blocks) {
    if (b.dw_w.size() != static_cast<size_t>(cfg.hidden) * 3) return false;
    if (b.dw_b.size() != static_cast<size_t>(cfg.hidden)) return false;
    if (b.pw_w.size() != static_cast<size_t>(cfg.hidden) * cfg.hidden) return false;
    if (b.pw_b.size() != static_cast<size_t>(cfg.hidden)) return false;
  }
  if (p.dec_w.size() != static_cast<size_t>(cfg.n_filters) * cfg.kernel) return false;
  if (p.heads.size() != static_cast<size_t>(cfg.n_outputs)) return false;
  for (const HeadParams &h : p.heads) {
    if (h.w.size() != static_cast<size_t>(cfg.n_filters) * cfg.hidden) return false;
    if (h.b.size() != static_cast<size_t>(cfg.n_filters)) return false;
  }
  return true;
}

int NumFrames(const SeparatorConfig &cfg, int input_len) {
  PITLAB_CHECK_STRUCTURAL(input_len >= cfg.kernel,
                          "input shorter than encoder kernel");
  const int stride = cfg.Stride();
  return (input_len - cfg.kernel + stride - 1) / stride + 1;
}

static void EncoderForward(const SeparatorConfig &cfg,
                           const SeparatorParams &params,
                           const std::vector<double> &x_pad, int T,
                           std::vector<double> *enc) {
  const int F = cfg.n_filters, K = cfg.kernel, S = cfg.Stride();
  enc->assign(static_cast<size_t>(T) * F, 0.0);
  for (int t = 0; t < T; ++t) {
    const double *x = x_pad.data() + static_cast<size_t>(t) * S;
    double *e = enc->data() + static_cast<size_t>(t) * F;
    for (int f = 0; f < F; ++f) {
      const double *w = params.enc_w.data() + static_cast<size_t>(f) * K;
      double acc = params.enc_b[f];
#pragma omp simd reduction(+ : acc)
      for (int k = 0; k < K; ++k) acc += x[k] * w[k];
      e[f] = acc;
    }
  }
}

FrameFeatures EncodeFrames(const SeparatorParams &params,
                           const SeparatorConfig &cfg, const Waveform &wave) {
  cfg.Validate();
  PITLAB_CHECK_STRUCTURAL(CongruentWith(params, cfg), "params/config mismatch");
  const int L = wave.Size();
  const int T = NumFrames(cfg, L);
  FrameFeatures feat;
  feat.n_frames = T;
  feat.padded_len = (T - 1) * cfg.Stride() + cfg.kernel;
  feat.x_pad.assign(feat.padded_len, 0.0);
  std::memcpy(feat.x_pad.data(), wave.samples.data(), sizeof(double) * L);
  EncoderForward(cfg, params, feat.x_pad, T, &feat.enc);
  return feat;
}

void EncoderBackward(const SeparatorConfig &cfg, const FrameFeatures &feat,
                     const std::vector<double> &d_enc, GradientSet *grads) {
  const int F = cfg.n_filters, K = cfg.kernel, S = cfg.Stride();
  const int T = feat.n_frames;
  PITLAB_CHECK_STRUCTURAL(d_enc.size() == static_cast<size_t>(T) * F,
                          "encoder grad shape mismatch");
  for (int t = 0; t < T; ++t) {
    const double *x = feat.x_pad.data() + static_cast<size_t>(t) * S;
    const double *g = d_enc.data() + static_cast<size_t>(t) * F;
    for (int f = 0; f < F; ++f) {
      const double c = g[f];
      grads->enc_b[f] += c;
      if (c == 0.0) continue;
      double *w = grads->enc_w.data() + static_cast<size_t>(f) * K;
#pragma omp simd
      for (int k = 0; k < K; ++k) w[k] += c * x[k];
    }
  }
}

std::vector<Waveform> Forward(const SeparatorParams &params,
                              const SeparatorConfig &cfg, const Waveform &mix,
                              SeparatorCache *cache,
                              const std::vector<int> &channels) {
  cfg.Validate();
  PITLAB_CHECK_STRUCTURAL(CongruentWith(params, cfg), "params/config mismatch");
  const int L = mix.Size();
  const int F = cfg.n_filters, K = cfg.kernel, S = cfg.Stride(), H = cfg.hidden;
  const int T = NumFrames(cfg, L);

  std::vector<int> chans = channels;
  if (chans.empty()) {
    chans.resize(cfg.n_outputs);
    std::iota(chans.begin(), chans.end(), 0);
  }
  for (int c : chans)
    PITLAB_CHECK_STRUCTURAL(c >= 0 && c < cfg.n_outputs, "channel out of range");

  cache->input_len = L;
  cache->n_frames = T;
  cache->padded_len = (T - 1) * S + K;
  cache->cfg = cfg;
  cache->channels = chans;

  cache->x_pad.assign(cache->padded_len, 0.0);
  std::memcpy(cache->x_pad.data(), mix.samples.data(), sizeof(double) * L);

  EncoderForward(cfg, params, cache->x_pad, T, &cache->enc);

  // masker trunk
  cache->proj.assign(static_cast<size_t>(T) * H, 0.0);
  GemmDotBias(cache->enc.data(), T, F, params.proj_w.data(),
              params.proj_b.data(), H, cache->proj.data());
  TanhInPlace(cache->proj);

  cache->blk_u.assign(cfg.masker_blocks, {});
  cache->blk_v.assign(cfg.masker_blocks, {});
  cache->trunk.assign(cfg.masker_blocks, {});
  const std::vector<double> *prev = &cache->proj;
  for (int b = 0; b < cfg.masker_blocks; ++b) {
    const BlockParams &bp = params.blocks[b];
    const int d = DilationOf(cfg, b);
    std::vector<double> &u = cache->blk_u[b];
    std::vector<double> &v = cache->blk_v[b];
    u.assign(static_cast<size_t>(T) * H, 0.0);
    v.assign(static_cast<size_t>(T) * H, 0.0);
    DepthwiseForward(prev->data(), T, H, d, bp.dw_w.data(), bp.dw_b.data(),
                     u.data());
    GemmDotBias(u.data(), T, H, bp.pw_w.data(), bp.pw_b.data(), H, v.data());
    TanhInPlace(v);
    std::vector<double> &out = cache->trunk[b];
    out.resize(static_cast<size_t>(T) * H);
    const double *pv = prev->data();
#pragma omp simd
    for (size_t i = 0; i < out.size(); ++i) out[i] = pv[i] + v[i];
    prev = &out;
  }
  const std::vector<double> &trunk_out = cache->TrunkOut();

  // heads + masks + decode
  const size_t n_ch = chans.size();
  cache->logits.assign(n_ch, {});
  cache->mask.assign(n_ch, {});
  cache->masked.assign(n_ch, {});
  std::vector<Waveform> outputs(n_ch);
  for (size_t ci = 0; ci < n_ch; ++ci) {
    const HeadParams &head = params.heads[chans[ci]];
    std::vector<double> &logit = cache->logits[ci];
    logit.assign(static_cast<size_t>(T) * F, 0.0);
    GemmDotBias(trunk_out.data(), T, H, head.w.data(), head.b.data(), F,
                logit.data());
    std::vector<double> &mask = cache->mask[ci];
    mask.resize(logit.size());
    for (size_t i = 0; i < logit.size(); ++i) mask[i] = StableSigmoid(logit[i]);
    std::vector<double> &masked = cache->masked[ci];
    masked.resize(logit.size());
    const double *e = cache->enc.data();
#pragma omp simd
    for (size_t i = 0; i < masked.size(); ++i) masked[i] = mask[i] * e[i];

    // overlap-add decode, then trim the framing pad
    std::vector<double> y(cache->padded_len, 0.0);
    for (int t = 0; t < T; ++t) {
      const double *s = masked.data() + static_cast<size_t>(t) * F;
      double *yo = y.data() + static_cast<size_t>(t) * S;
      for (int f = 0; f < F; ++f) {
        const double sv = s[f];
        const double *w = params.dec_w.data() + static_cast<size_t>(f) * K;
#pragma omp simd
        for (int k = 0; k < K; ++k) yo[k] += sv * w[k];
      }
    }
    y.resize(L);
    outputs[ci] = Waveform(std::move(y), mix.sample_rate);
  }
  return outputs;
}

void Backward(const SeparatorParams &params, const SeparatorConfig &cfg,
              const SeparatorCache &cache, const UpstreamGrads &up,
              GradientSet *grads) {
  PITLAB_CHECK_STRUCTURAL(cache.cfg == cfg, "cache built for another config");
  PITLAB_CHECK_STRUCTURAL(CongruentWith(params, cfg), "params/config mismatch");
  PITLAB_CHECK_STRUCTURAL(CongruentWith(*grads, cfg), "grad/config mismatch");
  const int L = cache.input_len, T = cache.n_frames;
  const int F = cfg.n_filters, K = cfg.kernel, S = cfg.Stride(), H = cfg.hidden;
  const size_t n_ch = cache.channels.size();
  PITLAB_CHECK_STRUCTURAL(
      up.d_outputs.empty() || up.d_outputs.size() == n_ch,
      "output grad count mismatch");
  PITLAB_CHECK_STRUCTURAL(
      up.d_mask_logits.empty() || up.d_mask_logits.size() == n_ch,
      "logit grad count mismatch");

  std::vector<double> d_enc(static_cast<size_t>(T) * F, 0.0);
  if (!up.d_encoder.empty()) {
    PITLAB_CHECK_STRUCTURAL(up.d_encoder.size() == d_enc.size(),
                            "encoder grad shape mismatch");
    d_enc = up.d_encoder;
  }
  std::vector<double> d_trunk(static_cast<size_t>(T) * H, 0.0);

  std::vector<double> d_masked(static_cast<size_t>(T) * F);
  std::vector<double> d_logit(static_cast<size_t>(T) * F);
  std::vector<double> d_ypad(cache.padded_len);
  for (size_t ci = 0; ci < n_ch; ++ci) {
    const int c = cache.channels[ci];
    const bool have_dy = !up.d_outputs.empty() && !up.d_outputs[ci].empty();
    const bool have_dlogit =
        !up.d_mask_logits.empty() && !up.d_mask_logits[ci].empty();
    if (!have_dy && !have_dlogit) continue;

    std::fill(d_masked.begin(), d_masked.end(), 0.0);
    if (have_dy) {
      const std::vector<double> &dy = up.d_outputs[ci];
      PITLAB_CHECK_STRUCTURAL(dy.size() == static_cast<size_t>(L),
                              "output grad length mismatch");
      std::fill(d_ypad.begin(), d_ypad.end(), 0.0);
      std::memcpy(d_ypad.data(), dy.data(), sizeof(double) * L);
      const std::vector<double> &masked = cache.masked[ci];
      for (int t = 0; t < T; ++t) {
        const double *gy = d_ypad.data() + static_cast<size_t>(t) * S;
        double *dm = d_masked.data() + static_cast<size_t>(t) * F;
        const double *sv = masked.data() + static_cast<size_t>(t) * F;
        for (int f = 0; f < F; ++f) {
          const double *w = params.dec_w.data() + static_cast<size_t>(f) * K;
          double *dw = grads->dec_w.data() + static_cast<size_t>(f) * K;
          double acc = 0.0;
          const double s_tf = sv[f];
#pragma omp simd reduction(+ : acc)
          for (int k = 0; k < K; ++k) {
            acc += gy[k] * w[k];
            dw[k] += s_tf * gy[k];
          }
          dm[f] = acc;
        }
      }
    }

    // through mask * enc and the sigmoid
    const std::vector<double> &mask = cache.mask[ci];
    const std::vector<double> &enc = cache.enc;
    if (have_dlogit) {
      const std::vector<double> &dl = up.d_mask_logits[ci];
      PITLAB_CHECK_STRUCTURAL(dl.size() == static_cast<size_t>(T) * F,
                              "logit grad shape mismatch");
#pragma omp simd
      for (size_t i = 0; i < d_logit.size(); ++i) {
        const double dm = d_masked[i];
        d_enc[i] += dm * mask[i];
        d_logit[i] = dm * enc[i] * mask[i] * (1.0 - mask[i]) + dl[i];
      }
    } else {
#pragma omp simd
      for (size_t i = 0; i < d_logit.size(); ++i) {
        const double dm = d_masked[i];
        d_enc[i] += dm * mask[i];
        d_logit[i] = dm * enc[i] * mask[i] * (1.0 - mask[i]);
      }
    }

    const std::vector<double> &trunk_out = cache.TrunkOut();
    HeadParams &gh = grads->heads[c];
    GemmBackWeight(d_logit.data(), T, F, trunk_out.data(), H, gh.w.data(),
                   gh.b.data());
    GemmBackData(d_logit.data(), T, F, params.heads[c].w.data(), H,
                 d_trunk.data());
  }

  // masker blocks in reverse; d_trunk carries the residual-stream gradient
  std::vector<double> d_apw(static_cast<size_t>(T) * H);
  std::vector<double> d_u(static_cast<size_t>(T) * H);
  for (int b = cfg.masker_blocks - 1; b >= 0; --b) {
    const BlockParams &bp = params.blocks[b];
    BlockParams &gb = grads->blocks[b];
    const int d = DilationOf(cfg, b);
    const std::vector<double> &v = cache.blk_v[b];
    const std::vector<double> &u = cache.blk_u[b];
    const std::vector<double> &pin = (b == 0) ? cache.proj : cache.trunk[b - 1];

#pragma omp simd
    for (size_t i = 0; i < d_apw.size(); ++i)
      d_apw[i] = d_trunk[i] * (1.0 - v[i] * v[i]);
    GemmBackWeight(d_apw.data(), T, H, u.data(), H, gb.pw_w.data(),
                   gb.pw_b.data());
    std::fill(d_u.begin(), d_u.end(), 0.0);
    GemmBackData(d_apw.data(), T, H, bp.pw_w.data(), H, d_u.data());
    DepthwiseBackWeight(d_u.data(), pin.data(), T, H, d, gb.dw_w.data(),
                        gb.dw_b.data());
    // residual: d_trunk already holds the identity branch
    DepthwiseBackData(d_u.data(), T, H, d, bp.dw_w.data(), d_trunk.data());
  }

  // in-projection
  const std::vector<double> &p0 = cache.proj;
#pragma omp simd
  for (size_t i = 0; i < d_apw.size(); ++i)
    d_apw[i] = d_trunk[i] * (1.0 - p0[i] * p0[i]);
  GemmBackWeight(d_apw.data(), T, H, cache.enc.data(), F, grads->proj_w.data(),
                 grads->proj_b.data());
  GemmBackData(d_apw.data(), T, H, params.proj_w.data(), F, d_enc.data());

  // encoder
  for (int t = 0; t < T; ++t) {
    const double *x = cache.x_pad.data() + static_cast<size_t>(t) * S;
    const double *g = d_enc.data() + static_cast<size_t>(t) * F;
    for (int f = 0; f < F; ++f) {
      const double c = g[f];
      grads->enc_b[f] += c;
      if (c == 0.0) continue;
      double *w = grads->enc_w.data() + static_cast<size_t>(f) * K;
#pragma omp simd
      for (int k = 0; k < K; ++k) w[k] += c * x[k];
    }
  }
}

SeparatorParams TransferParams(const SeparatorParams &pretrained,
                               const SeparatorConfig &pre_cfg,
                               const SeparatorConfig &target_cfg,
                               uint64_t seed) {
  pre_cfg.Validate();
  target_cfg.Validate();
  PITLAB_CHECK_STRUCTURAL(pre_cfg.BodyCompatible(target_cfg),
                          "configs differ beyond n_outputs");
  PITLAB_CHECK_STRUCTURAL(CongruentWith(pretrained, pre_cfg),
                          "pretrained params do not match their config");

  SeparatorParams fresh = InitParams(target_cfg, seed);
  SeparatorParams out = fresh;
  out.enc_w = pretrained.enc_w;
  out.enc_b = pretrained.enc_b;
  out.proj_w = pretrained.proj_w;
  out.proj_b = pretrained.proj_b;
  out.blocks = pretrained.blocks;
  out.dec_w = pretrained.dec_w;
  // heads stay freshly initialized, including any channel that could have
  // been copied
  return out;
}

}  // namespace pitlab
