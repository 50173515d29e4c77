// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_SIGNAL_METRICS_H_
#define N2N_SIGNAL_METRICS_H_

#include <span>
#include <vector>

#include "n2n/signal/spectral.h"

namespace n2n::signal {

inline constexpr double kMetricCapDb = 60.0;
inline constexpr double kMetricEpsilon = 1e-8;

// Both measures mean-remove their inputs and use alpha = <e, r> / |r|^2.
// SI-SNR compares alpha*r against alpha*r - e; SD-SDR compares it against the
// unscaled error e - r, so a correctly shaped but mis-scaled estimate is
// penalized. Results are clamped to [-60, 60] dB.
double SiSnr(std::span<const double> estimate, std::span<const double> reference);
double SdSdr(std::span<const double> estimate, std::span<const double> reference);

struct LossWithGradient {
  double loss = 0.0;
  std::vector<double> gradient;  // d loss / d estimate
};

// loss = max(-SD-SDR, -60) with the lower side of SD-SDR left uncapped. The
// gradient is zero on the floor.
LossWithGradient SdSdrLoss(std::span<const double> estimate,
                           std::span<const double> reference);
// Same construction for SI-SNR.
LossWithGradient SiSnrLoss(std::span<const double> estimate,
                           std::span<const double> reference);

// Mel cepstral distortion in dB after DTW alignment (Euclidean local cost).
// Both sequences must exclude c0 and share the cepstral order.
double Mcd(const CepstralSequence &reference, const CepstralSequence &estimate);

// Per-frame distortion (10 / ln 10) * sqrt(2 * sum_d (a_d - b_d)^2).
double FrameMcd(const Eigen::Ref<const Eigen::RowVectorXd> &a,
                const Eigen::Ref<const Eigen::RowVectorXd> &b);

// DTW path as (reference frame, estimate frame) pairs, start to end.
std::vector<std::pair<Eigen::Index, Eigen::Index>> DtwPath(
    const Eigen::MatrixXd &a, const Eigen::MatrixXd &b);

}  // namespace n2n::signal

#endif  // N2N_SIGNAL_METRICS_H_
