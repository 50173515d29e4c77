// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "n2n/vc/convert.h"

#include "n2n/common/error.h"
#include "n2n/signal/mulaw.h"

namespace n2n::vc {
namespace {

void RequireVariant(const VQVAEModel &vc, Variant expected, const char *mode) {
  if (vc.variant() != expected) {
    throw UsageError(std::string(mode) + " conversion needs a " + VariantName(expected) +
                     " model, got " + VariantName(vc.variant()));
  }
}

void RequireTrained(const VQVAEModel &vc) {
  if (vc.trained_steps() <= 0) throw UsageError("vc model is untrained");
}

void RequireTrained(const denoiser::DenoiserModel &den) {
  if (den.trained_steps() <= 0) throw UsageError("denoiser model is untrained");
}

void CheckInput(const VQVAEModel &vc, const denoiser::SeparationResult &sep) {
  const int rate = vc.signal_config().sample_rate;
  if (sep.y.sample_rate() != rate) {
    throw DataError("conversion expects " + std::to_string(rate) + " Hz input, got " +
                    std::to_string(sep.y.sample_rate()) + " Hz");
  }
  signal::CheckSameLength(sep.y, sep.d, "separation");
  signal::CheckSameLength(sep.y, sep.n, "separation");
}

signal::Waveform Synthesize(const VQVAEModel &vc, const signal::Waveform &speech,
                            const NoiseCondition *noise, const std::string &target,
                            uint64_t seed) {
  const Conditioning cond = vc.Prepare(speech, vc.SpeakerIndex(target), noise);
  const std::vector<int> codes = vc.Generate(cond, speech.size(), seed);
  return signal::Waveform(signal::MuLawDecode(codes), speech.sample_rate());
}

}  // namespace

ConvertMode ParseConvertMode(const std::string &name) {
  if (name == "direct") return ConvertMode::kDirect;
  if (name == "clean") return ConvertMode::kClean;
  if (name == "indirect") return ConvertMode::kIndirect;
  if (name == "baseline") return ConvertMode::kBaseline;
  throw UsageError("unknown conversion mode \"" + name +
                   "\" (expected direct, clean, indirect or baseline)");
}

std::string ConvertModeName(ConvertMode mode) {
  switch (mode) {
    case ConvertMode::kDirect:
      return "direct";
    case ConvertMode::kClean:
      return "clean";
    case ConvertMode::kIndirect:
      return "indirect";
    case ConvertMode::kBaseline:
      return "baseline";
  }
  return "unknown";
}

signal::Waveform ConvertDirect(const VQVAEModel &vc, const denoiser::SeparationResult &sep,
                               const std::string &target_speaker, uint64_t seed) {
  RequireVariant(vc, Variant::kNoiseConditioned, "direct");
  RequireTrained(vc);
  CheckInput(vc, sep);
  const NoiseCondition noise = MakeNoiseCondition(sep.n, vc.signal_config());
  return Synthesize(vc, sep.d, &noise, target_speaker, seed);
}

signal::Waveform ConvertDirect(const denoiser::DenoiserModel &den, const VQVAEModel &vc,
                               const signal::Waveform &y, const std::string &target_speaker,
                               uint64_t seed) {
  RequireTrained(den);
  vc.SpeakerIndex(target_speaker);
  return ConvertDirect(vc, den.Separate(y), target_speaker, seed);
}

signal::Waveform ConvertClean(const VQVAEModel &vc, const denoiser::SeparationResult &sep,
                              const std::string &target_speaker, uint64_t seed) {
  RequireVariant(vc, Variant::kNoiseConditioned, "clean");
  RequireTrained(vc);
  CheckInput(vc, sep);
  const NoiseCondition noise = ZeroNoiseCondition(sep.y.size(), vc.signal_config());
  return Synthesize(vc, sep.d, &noise, target_speaker, seed);
}

signal::Waveform ConvertClean(const denoiser::DenoiserModel &den, const VQVAEModel &vc,
                              const signal::Waveform &y, const std::string &target_speaker,
                              uint64_t seed) {
  RequireTrained(den);
  vc.SpeakerIndex(target_speaker);
  return ConvertClean(vc, den.Separate(y), target_speaker, seed);
}

signal::Waveform ConvertIndirect(const VQVAEModel &vc, const denoiser::SeparationResult &sep,
                                 const std::string &target_speaker, uint64_t seed) {
  return ConvertClean(vc, sep, target_speaker, seed) + sep.n;
}

signal::Waveform ConvertIndirect(const denoiser::DenoiserModel &den, const VQVAEModel &vc,
                                 const signal::Waveform &y, const std::string &target_speaker,
                                 uint64_t seed) {
  RequireTrained(den);
  vc.SpeakerIndex(target_speaker);
  return ConvertIndirect(vc, den.Separate(y), target_speaker, seed);
}

signal::Waveform ConvertBaseline(const VQVAEModel &vc, const denoiser::SeparationResult &sep,
                                 const std::string &target_speaker, bool superimpose,
                                 uint64_t seed) {
  RequireVariant(vc, Variant::kBaseline, "baseline");
  RequireTrained(vc);
  CheckInput(vc, sep);
  signal::Waveform out = Synthesize(vc, sep.d, nullptr, target_speaker, seed);
  return superimpose ? out + sep.n : out;
}

signal::Waveform ConvertBaseline(const denoiser::DenoiserModel &den, const VQVAEModel &vc,
                                 const signal::Waveform &y, const std::string &target_speaker,
                                 bool superimpose, uint64_t seed) {
  RequireTrained(den);
  vc.SpeakerIndex(target_speaker);
  return ConvertBaseline(vc, den.Separate(y), target_speaker, superimpose, seed);
}

signal::Waveform Convert(ConvertMode mode, const denoiser::DenoiserModel &den,
                         const VQVAEModel &vc, const signal::Waveform &y,
                         const std::string &target_speaker, bool superimpose, uint64_t seed) {
  switch (mode) {
    case ConvertMode::kDirect:
      return ConvertDirect(den, vc, y, target_speaker, seed);
    case ConvertMode::kClean:
      return ConvertClean(den, vc, y, target_speaker, seed);
    case ConvertMode::kIndirect:
      return ConvertIndirect(den, vc, y, target_speaker, seed);
    case ConvertMode::kBaseline:
      return ConvertBaseline(den, vc, y, target_speaker, superimpose, seed);
  }
  throw UsageError("unknown conversion mode");
}

}  // namespace n2n::vc
