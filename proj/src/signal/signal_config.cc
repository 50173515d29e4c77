// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "n2n/signal/signal_config.h"

#include "n2n/common/error.h"

namespace n2n::signal {

void SignalConfig::Validate() const {
  if (sample_rate <= 0) throw UsageError("sample_rate must be positive");
  if (frame_length <= 0 || hop_length <= 0) {
    throw UsageError("frame_length and hop_length must be positive");
  }
  if (frame_length % hop_length != 0) {
    throw UsageError("frame_length must be a multiple of hop_length");
  }
  if (fft_size < frame_length) throw UsageError("fft_size must be >= frame_length");
  if (mel_bands < 1) throw UsageError("mel_bands must be >= 1");
  if (cepstral_order < 1 || cepstral_order >= mel_bands) {
    throw UsageError("cepstral_order must be in [1, mel_bands)");
  }
  if (!(mel_floor > 0.0)) throw UsageError("mel_floor must be positive");
  if (!(fmin >= 0.0 && fmax > fmin && fmax <= sample_rate / 2.0)) {
    throw UsageError("need 0 <= fmin < fmax <= sample_rate / 2");
  }
}

void SignalConfig::Save(const std::string &p, KeyValueConfig *kv) const {
  kv->Set(p + "sample_rate", sample_rate);
  kv->Set(p + "frame_length", frame_length);
  kv->Set(p + "hop_length", hop_length);
  kv->Set(p + "fft_size", fft_size);
  kv->Set(p + "mel_bands", mel_bands);
  kv->Set(p + "cepstral_order", cepstral_order);
  kv->Set(p + "mel_floor", mel_floor);
  kv->Set(p + "fmin", fmin);
  kv->Set(p + "fmax", fmax);
}

void SignalConfig::Load(const std::string &p, const KeyValueConfig &kv) {
  kv.Get(p + "sample_rate", &sample_rate);
  kv.Get(p + "frame_length", &frame_length);
  kv.Get(p + "hop_length", &hop_length);
  kv.Get(p + "fft_size", &fft_size);
  kv.Get(p + "mel_bands", &mel_bands);
  kv.Get(p + "cepstral_order", &cepstral_order);
  kv.Get(p + "mel_floor", &mel_floor);
  kv.Get(p + "fmin", &fmin);
  kv.Get(p + "fmax", &fmax);
  Validate();
}

}  // namespace n2n::signal
