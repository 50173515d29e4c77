// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_DENOISER_DENOISER_H_
#define N2N_DENOISER_DENOISER_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "n2n/common/config.h"
#include "n2n/nn/checkpoint.h"
#include "n2n/nn/graph.h"
#include "n2n/signal/signal_config.h"
#include "n2n/signal/waveform.h"

namespace n2n::denoiser {

struct DenoiserConfig {
  // Complex conv encoder widths; the decoder mirrors them.
  std::vector<int> encoder_channels = {16, 32, 32, 64};
  int kernel_freq = 5;
  int kernel_time = 2;
  int stride_freq = 2;
  int rnn_width = 64;
  double leaky_slope = 0.2;
  // Mask-head initialization relative to the default fan-in scale.
  double head_init_scale = 1.0;
  // Real part of the mask-head bias. Positive values keep the untrained mask
  // in phase with the input.
  double head_bias_init = 0.2;
  // All-zero head: the untrained model outputs silence.
  bool zero_mask_head = false;
  uint64_t seed = 1;

  void Validate() const;
  void Save(const std::string &prefix, KeyValueConfig *kv) const;
  void Load(const std::string &prefix, const KeyValueConfig &kv);
  friend bool operator==(const DenoiserConfig &, const DenoiserConfig &) = default;
};

// Noisy input, denoised estimate and separated noise with n = y - d.
struct SeparationResult {
  signal::Waveform y;
  signal::Waveform d;
  signal::Waveform n;
};
// Builds the triple from y and d; throws on length or rate mismatch.
SeparationResult Separate(const signal::Waveform &y, const signal::Waveform &d);

// Reduced DCCRN-style network: STFT, complex conv encoder, complex GRU over
// time, complex transposed-conv decoder with skips, bounded complex ratio
// mask, iSTFT.
class DenoiserModel {
 public:
  DenoiserModel(DenoiserConfig config, signal::SignalConfig signal_config);

  // Differentiable estimate (1 x T) for `y`.
  nn::Var Forward(nn::Binder &bind, std::span<const double> y) const;

  // Deterministic inference; output length equals input length.
  signal::Waveform Denoise(const signal::Waveform &y) const;
  SeparationResult Separate(const signal::Waveform &y) const;

  nn::ParameterStore &params() { return params_; }
  const nn::ParameterStore &params() const { return params_; }
  const DenoiserConfig &config() const { return config_; }
  const signal::SignalConfig &signal_config() const { return signal_; }

  // Config text (signal + denoiser keys) stored in checkpoints.
  KeyValueConfig ConfigSnapshot() const;
  nn::Checkpoint ToCheckpoint() const;
  static DenoiserModel FromCheckpoint(const nn::Checkpoint &ck);
  void Save(const std::filesystem::path &path) const;
  static DenoiserModel Load(const std::filesystem::path &path);

  long trained_steps() const { return trained_steps_; }
  void set_trained_steps(long steps) { trained_steps_ = steps; }

  // Minimum accepted input length in samples.
  size_t min_length() const { return static_cast<size_t>(signal_.frame_length); }

 private:
  void Init();

  DenoiserConfig config_;
  signal::SignalConfig signal_;
  nn::ParameterStore params_;
  long trained_steps_ = 0;
};

}  // namespace n2n::denoiser

#endif  // N2N_DENOISER_DENOISER_H_
