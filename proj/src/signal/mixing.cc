// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "n2n/signal/mixing.h"

#include <cmath>

#include "n2n/common/error.h"

namespace n2n::signal {

Waveform FitToLength(const Waveform &noise, size_t length, size_t offset,
                     size_t crossfade) {
  if (length == 0) throw DataError("cannot fit noise to zero length");
  const size_t n = noise.size();
  std::span<const double> src = noise.samples();
  if (n == length) return noise;
  if (n > length) {
    const size_t start = offset % (n - length + 1);
    return Waveform(std::vector<double>(src.begin() + start,
                                        src.begin() + start + length),
                    noise.sample_rate());
  }
  if (n <= 2 * crossfade) crossfade = 0;
  std::vector<double> out(src.begin(), src.end());
  out.reserve(length + n);
  while (out.size() < length) {
    const size_t seam = out.size() - crossfade;
    for (size_t i = 0; i < crossfade; ++i) {
      const double a = static_cast<double>(i + 1) / (crossfade + 1);
      out[seam + i] = (1.0 - a) * out[seam + i] + a * src[i];
    }
    out.insert(out.end(), src.begin() + crossfade, src.end());
  }
  out.resize(length);
  return Waveform(std::move(out), noise.sample_rate());
}

MixResult MixAtSnr(const Waveform &speech, const Waveform &noise,
                   double snr_db) {
  CheckSameRate(speech, noise, "mix_at_snr");
  if (!std::isfinite(snr_db)) throw DataError("mix_at_snr: snr_db must be finite");
  Waveform fitted = FitToLength(noise, speech.size());
  const double noise_power = MeanPower(fitted.samples());
  if (noise_power <= 0.0) throw DataError("degenerate noise");
  const double speech_power = MeanPower(speech.samples());
  if (speech_power <= 0.0) throw DataError("degenerate speech");

  const double gain =
      std::sqrt(speech_power / (noise_power * std::pow(10.0, snr_db / 10.0)));
  std::vector<double> scaled(fitted.samples().begin(), fitted.samples().end());
  std::vector<double> noisy(speech.size());
  size_t clipped = 0;
  for (size_t i = 0; i < scaled.size(); ++i) {
    scaled[i] *= gain;
    noisy[i] = speech[i] + scaled[i];
    if (noisy[i] > 1.0 || noisy[i] < -1.0) ++clipped;
  }
  return MixResult{Waveform(std::move(noisy), speech.sample_rate()),
                   Waveform(std::move(scaled), speech.sample_rate()), gain,
                   clipped};
}

double MeasureSnr(const Waveform &speech, const Waveform &noise) {
  CheckSameLength(speech, noise, "measure_snr");
  const double ps = MeanPower(speech.samples());
  const double pn = MeanPower(noise.samples());
  if (ps <= 0.0) throw DataError("measure_snr: speech has zero power");
  if (pn <= 0.0) throw DataError("measure_snr: noise has zero power");
  return 10.0 * std::log10(ps / pn);
}

}  // namespace n2n::signal
