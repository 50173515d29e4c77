// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_SIGNAL_SIGNAL_CONFIG_H_
#define N2N_SIGNAL_SIGNAL_CONFIG_H_

#include <string>

#include "n2n/common/config.h"

namespace n2n::signal {

// Analysis parameters shared by every module, tuned for 8 kHz audio.
struct SignalConfig {
  int sample_rate = 8000;
  int frame_length = 256;
  int hop_length = 64;
  int fft_size = 256;
  int mel_bands = 40;
  int cepstral_order = 24;
  double mel_floor = 1e-10;
  double fmin = 0.0;
  double fmax = 4000.0;

  int num_bins() const { return fft_size / 2 + 1; }
  void Validate() const;

  void Save(const std::string &prefix, KeyValueConfig *kv) const;
  void Load(const std::string &prefix, const KeyValueConfig &kv);

  friend bool operator==(const SignalConfig &, const SignalConfig &) = default;
};

}  // namespace n2n::signal

#endif  // N2N_SIGNAL_SIGNAL_CONFIG_H_
