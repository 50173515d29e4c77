// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "n2n/signal/spectral.h"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

#include "n2n/common/error.h"

namespace n2n::signal {
namespace {

template <typename Key, typename Value, typename Make>
const Value &Cached(const Key &key, Make make) {
  static std::mutex mu;
  static std::map<Key, std::unique_ptr<Value>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<Value>(make())).first;
  }
  return *it->second;
}

}  // namespace

const DftBasis &GetDftBasis(int n) {
  return Cached<int, DftBasis>(n, [n] {
    if (n < 2 || n % 2 != 0) throw UsageError("fft_size must be even and >= 2");
    const int k_bins = n / 2 + 1;
    DftBasis b;
    b.fft_size = n;
    b.forward_re.resize(k_bins, n);
    b.forward_im.resize(k_bins, n);
    b.inverse_re.resize(n, k_bins);
    b.inverse_im.resize(n, k_bins);
    for (int k = 0; k < k_bins; ++k) {
      const double weight = (k == 0 || k == n / 2) ? 1.0 : 2.0;
      for (int t = 0; t < n; ++t) {
        // Reduce the phase index first so large k*t stays exact.
        const double phase =
            2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / n;
        const double c = std::cos(phase), s = std::sin(phase);
        b.forward_re(k, t) = c;
        b.forward_im(k, t) = -s;
        b.inverse_re(t, k) = weight * c / n;
        b.inverse_im(t, k) = -weight * s / n;
      }
    }
    return b;
  });
}

const Eigen::VectorXd &HannWindow(int length) {
  return Cached<int, Eigen::VectorXd>(length, [length] {
    Eigen::VectorXd w(length);
    for (int i = 0; i < length; ++i) {
      w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / length);
    }
    return w;
  });
}

int LeftPadding(const SignalConfig &config, StftPadding padding) {
  return padding == StftPadding::kFull ? config.frame_length - config.hop_length
                                       : 0;
}

Eigen::Index NumFrames(size_t length, const SignalConfig &config,
                       StftPadding padding) {
  const long n = config.frame_length, hop = config.hop_length;
  const long t = static_cast<long>(length);
  if (padding == StftPadding::kNone) {
    if (t < n) return 0;
    return (t - n) / hop + 1;
  }
  const long pad = n - hop;
  const long padded = t + 2 * pad;
  return (padded - n + hop - 1) / hop + 1;
}

ComplexSpectrogram Stft(std::span<const double> x, const SignalConfig &config,
                        StftPadding padding) {
  const int n = config.frame_length, hop = config.hop_length;
  const Eigen::Index frames = NumFrames(x.size(), config, padding);
  if (frames < 1) {
    throw DataError("input of " + std::to_string(x.size()) +
                    " samples is shorter than one frame (" + std::to_string(n) +
                    ")");
  }
  const int left = LeftPadding(config, padding);
  const Eigen::VectorXd &window = HannWindow(n);
  Eigen::MatrixXd framed = Eigen::MatrixXd::Zero(config.fft_size, frames);
  for (Eigen::Index f = 0; f < frames; ++f) {
    const long start = f * hop - left;
    for (int i = 0; i < n; ++i) {
      const long idx = start + i;
      if (idx >= 0 && idx < static_cast<long>(x.size())) {
        framed(i, f) = x[idx] * window[i];
      }
    }
  }
  const DftBasis &basis = GetDftBasis(config.fft_size);
  ComplexSpectrogram spec;
  spec.re = (basis.forward_re * framed).transpose();
  spec.im = (basis.forward_im * framed).transpose();
  spec.frame_length = n;
  spec.hop_length = hop;
  spec.fft_size = config.fft_size;
  spec.padding = padding;
  spec.signal_length = x.size();
  return spec;
}

std::vector<double> Istft(const ComplexSpectrogram &spec) {
  const int n = spec.frame_length, hop = spec.hop_length;
  const DftBasis &basis = GetDftBasis(spec.fft_size);
  const Eigen::MatrixXd frames =
      basis.inverse_re * spec.re.transpose() + basis.inverse_im * spec.im.transpose();
  const Eigen::VectorXd &window = HannWindow(n);
  const Eigen::Index num_frames = spec.num_frames();
  const long total = (num_frames - 1) * hop + n;
  std::vector<double> acc(total, 0.0), norm(total, 0.0);
  for (Eigen::Index f = 0; f < num_frames; ++f) {
    for (int i = 0; i < n; ++i) {
      acc[f * hop + i] += frames(i, f) * window[i];
      norm[f * hop + i] += window[i] * window[i];
    }
  }
  const int left = spec.padding == StftPadding::kFull ? n - hop : 0;
  std::vector<double> out(spec.signal_length, 0.0);
  for (size_t i = 0; i < out.size(); ++i) {
    const long idx = left + static_cast<long>(i);
    if (idx < total && norm[idx] > 1e-10) out[i] = acc[idx] / norm[idx];
  }
  return out;
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

double MelBandCenterHz(const SignalConfig &config, int band) {
  const double lo = HzToMel(config.fmin), hi = HzToMel(config.fmax);
  return MelToHz(lo + (hi - lo) * (band + 1) / (config.mel_bands + 1));
}

const Eigen::MatrixXd &MelFilterbank(const SignalConfig &config) {
  using Key = std::tuple<int, int, int, double, double>;
  Key key{config.mel_bands, config.fft_size, config.sample_rate, config.fmin,
          config.fmax};
  return Cached<Key, Eigen::MatrixXd>(key, [&config] {
    const int m = config.mel_bands, k_bins = config.num_bins();
    std::vector<double> edges(m + 2);
    for (int i = 0; i < m + 2; ++i) {
      const double lo = HzToMel(config.fmin), hi = HzToMel(config.fmax);
      edges[i] = MelToHz(lo + (hi - lo) * i / (m + 1));
    }
    Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(m, k_bins);
    for (int b = 0; b < m; ++b) {
      const double lo = edges[b], c = edges[b + 1], hi = edges[b + 2];
      for (int k = 0; k < k_bins; ++k) {
        const double f = static_cast<double>(k) * config.sample_rate / config.fft_size;
        const double w = std::min((f - lo) / (c - lo), (hi - f) / (hi - c));
        if (w > 0.0) fb(b, k) = w;
      }
    }
    return fb;
  });
}

MelSpectrogram LogMel(std::span<const double> x, const SignalConfig &config) {
  const ComplexSpectrogram spec = Stft(x, config, StftPadding::kNone);
  const Eigen::MatrixXd mag = (spec.re.array().square() + spec.im.array().square()).sqrt();
  MelSpectrogram mel;
  mel.frames = mag * MelFilterbank(config).transpose();
  mel.frames = mel.frames.array().max(config.mel_floor).log();
  mel.mel_bands = config.mel_bands;
  mel.hop_length = config.hop_length;
  return mel;
}

const Eigen::MatrixXd &DctMatrix(int n) {
  return Cached<int, Eigen::MatrixXd>(n, [n] {
    Eigen::MatrixXd c(n, n);
    for (int k = 0; k < n; ++k) {
      const double s = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      for (int i = 0; i < n; ++i) {
        c(k, i) = s * std::cos(std::numbers::pi * (i + 0.5) * k / n);
      }
    }
    return c;
  });
}

CepstralSequence MelCepstra(const MelSpectrogram &mel, int order) {
  const int m = static_cast<int>(mel.frames.cols());
  if (order < 1 || order >= m) {
    throw UsageError("cepstral order must be in [1, mel_bands)");
  }
  const Eigen::MatrixXd full = mel.frames * DctMatrix(m).transpose();
  CepstralSequence out;
  out.frames = full.middleCols(1, order);
  out.includes_c0 = false;
  return out;
}

CepstralSequence MelCepstra(const Waveform &x, const SignalConfig &config) {
  return MelCepstra(LogMel(x, config), config.cepstral_order);
}

}  // namespace n2n::signal
