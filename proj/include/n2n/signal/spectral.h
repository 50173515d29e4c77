// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_SIGNAL_SPECTRAL_H_
#define N2N_SIGNAL_SPECTRAL_H_

#include <Eigen/Dense>
#include <span>
#include <string>

#include "n2n/signal/signal_config.h"
#include "n2n/signal/waveform.h"

namespace n2n::signal {

// Real-input DFT as dense matrices: for a frame x (fft_size), the spectrum is
// re = forward_re * x, im = forward_im * x. The inverse maps K bins back to a
// fft_size frame. Bases are cached and immutable once built.
struct DftBasis {
  int fft_size = 0;
  Eigen::MatrixXd forward_re;  // K x N
  Eigen::MatrixXd forward_im;  // K x N
  Eigen::MatrixXd inverse_re;  // N x K
  Eigen::MatrixXd inverse_im;  // N x K
};
const DftBasis &GetDftBasis(int fft_size);

// Periodic Hann window.
const Eigen::VectorXd &HannWindow(int length);

enum class StftPadding {
  // Frames start at sample 0, F = floor((T - N) / hop) + 1.
  kNone,
  // N - hop zeros on both sides (plus tail rounding) so every sample lies
  // under N / hop frames; Istft trims back to the original length.
  kFull,
};

struct ComplexSpectrogram {
  Eigen::MatrixXd re;  // F x K
  Eigen::MatrixXd im;  // F x K
  int frame_length = 0;
  int hop_length = 0;
  int fft_size = 0;
  std::string window = "hann";
  StftPadding padding = StftPadding::kNone;
  size_t signal_length = 0;

  Eigen::Index num_frames() const { return re.rows(); }
};

// Number of frames Stft produces for a length-T input.
Eigen::Index NumFrames(size_t length, const SignalConfig &config,
                       StftPadding padding);
// Left padding applied by Stft in samples.
int LeftPadding(const SignalConfig &config, StftPadding padding);

ComplexSpectrogram Stft(std::span<const double> x, const SignalConfig &config,
                        StftPadding padding);
// Weighted overlap-add with sum-of-squared-window normalization.
std::vector<double> Istft(const ComplexSpectrogram &spec);

// Triangular HTK-mel filterbank, mel_bands x num_bins.
const Eigen::MatrixXd &MelFilterbank(const SignalConfig &config);
double HzToMel(double hz);
double MelToHz(double mel);
// Center frequency (Hz) of mel band `band`.
double MelBandCenterHz(const SignalConfig &config, int band);

struct MelSpectrogram {
  Eigen::MatrixXd frames;  // F x M, natural-log magnitudes
  int mel_bands = 0;
  int hop_length = 0;
};

// Throws DataError for inputs shorter than one frame.
MelSpectrogram LogMel(std::span<const double> x, const SignalConfig &config);
inline MelSpectrogram LogMel(const Waveform &x, const SignalConfig &config) {
  return LogMel(x.samples(), config);
}

struct CepstralSequence {
  Eigen::MatrixXd frames;  // F x D
  bool includes_c0 = false;

  Eigen::Index num_frames() const { return frames.rows(); }
  Eigen::Index order() const { return frames.cols(); }
};

// Orthonormal DCT-II of each log-mel frame, keeping c1..cD.
CepstralSequence MelCepstra(const MelSpectrogram &mel, int order);
CepstralSequence MelCepstra(const Waveform &x, const SignalConfig &config);

// Orthonormal DCT-II matrix, n x n (row k is basis vector k).
const Eigen::MatrixXd &DctMatrix(int n);

}  // namespace n2n::signal

#endif  // N2N_SIGNAL_SPECTRAL_H_
