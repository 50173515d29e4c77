// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_SIGNAL_MIXING_H_
#define N2N_SIGNAL_MIXING_H_

#include <cstddef>

#include "n2n/signal/waveform.h"

namespace n2n::signal {

// 10 ms at 8 kHz.
inline constexpr size_t kLoopCrossfade = 80;

// Loops (with a linear crossfade at each seam) or crops `noise` to `length`.
// Cropping starts at `offset` modulo the usable range.
Waveform FitToLength(const Waveform &noise, size_t length, size_t offset = 0,
                     size_t crossfade = kLoopCrossfade);

struct MixResult {
  Waveform noisy;
  Waveform scaled_noise;
  double gain = 0.0;
  // Samples of `noisy` outside [-1, 1]; they are kept, not renormalized.
  size_t clipped_samples = 0;
};

// noisy = speech + g * noise with g set so the full-clip power ratio equals
// snr_db. Noise of a different length is fitted with FitToLength first.
MixResult MixAtSnr(const Waveform &speech, const Waveform &noise,
                   double snr_db);

// 10 log10(P_speech / P_noise) over equal-length clips.
double MeasureSnr(const Waveform &speech, const Waveform &noise);

}  // namespace n2n::signal

#endif  // N2N_SIGNAL_MIXING_H_
