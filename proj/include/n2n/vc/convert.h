// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_VC_CONVERT_H_
#define N2N_VC_CONVERT_H_

#include <cstdint>
#include <string>

#include "n2n/denoiser/denoiser.h"
#include "n2n/signal/waveform.h"
#include "n2n/vc/vqvae.h"

// Conversion modes. Every mode returns exactly |y| samples and samples the
// decoder with `seed`. The overloads taking a SeparationResult skip the
// denoiser, so a caller can supply (y, d, n) directly, e.g. n = 0 for clean
// input.
namespace n2n::vc {

enum class ConvertMode { kDirect, kClean, kIndirect, kBaseline };

ConvertMode ParseConvertMode(const std::string &name);
std::string ConvertModeName(ConvertMode mode);

// Noisy output in one pass: the decoder is conditioned on the noise of y.
signal::Waveform ConvertDirect(const VQVAEModel &vc, const denoiser::SeparationResult &sep,
                               const std::string &target_speaker, uint64_t seed);
signal::Waveform ConvertDirect(const denoiser::DenoiserModel &den, const VQVAEModel &vc,
                               const signal::Waveform &y, const std::string &target_speaker,
                               uint64_t seed);

// As ConvertDirect with the zero-sequence noise condition.
signal::Waveform ConvertClean(const VQVAEModel &vc, const denoiser::SeparationResult &sep,
                              const std::string &target_speaker, uint64_t seed);
signal::Waveform ConvertClean(const denoiser::DenoiserModel &den, const VQVAEModel &vc,
                              const signal::Waveform &y, const std::string &target_speaker,
                              uint64_t seed);

// ConvertClean output plus n, without renormalization.
signal::Waveform ConvertIndirect(const VQVAEModel &vc, const denoiser::SeparationResult &sep,
                                 const std::string &target_speaker, uint64_t seed);
signal::Waveform ConvertIndirect(const denoiser::DenoiserModel &den, const VQVAEModel &vc,
                                 const signal::Waveform &y, const std::string &target_speaker,
                                 uint64_t seed);

// Baseline model: converts d, optionally adding n afterwards.
signal::Waveform ConvertBaseline(const VQVAEModel &vc, const denoiser::SeparationResult &sep,
                                 const std::string &target_speaker, bool superimpose,
                                 uint64_t seed);
signal::Waveform ConvertBaseline(const denoiser::DenoiserModel &den, const VQVAEModel &vc,
                                 const signal::Waveform &y, const std::string &target_speaker,
                                 bool superimpose, uint64_t seed);

// Dispatch on `mode`; `superimpose` only applies to kBaseline.
signal::Waveform Convert(ConvertMode mode, const denoiser::DenoiserModel &den,
                         const VQVAEModel &vc, const signal::Waveform &y,
                         const std::string &target_speaker, bool superimpose, uint64_t seed);

}  // namespace n2n::vc

#endif  // N2N_VC_CONVERT_H_
