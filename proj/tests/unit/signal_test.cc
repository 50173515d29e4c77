// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "n2n/common/error.h"
#include "n2n/signal/metrics.h"
#include "n2n/signal/mixing.h"
#include "n2n/signal/mulaw.h"
#include "n2n/signal/spectral.h"
#include "test_util.h"

namespace n2n::signal {
namespace {

using n2n::testing::RandomVector;
using n2n::testing::RandomWave;

// Fixed 16-sample pair used by the SI-SNR / SD-SDR oracles. Expected values
// were produced by an independent numpy evaluation of the definitions.
std::vector<double> OracleSignal() {
  std::vector<double> x(16);
  for (int i = 0; i < 16; ++i) x[i] = std::sin(0.7 * i + 0.3) + 0.2;
  return x;
}
std::vector<double> OraclePerturbation() {
  std::vector<double> w(16);
  for (int i = 0; i < 16; ++i) w[i] = 0.3 * std::cos(1.3 * i * i + 0.1);
  return w;
}

TEST(MixAtSnr, EqualPowerAtZeroDbHasUnitGain) {
  Waveform speech({1, -1, 1, -1});
  Waveform noise({1, 1, -1, -1});
  MixResult mix = MixAtSnr(speech, noise, 0.0);
  EXPECT_NEAR(mix.gain, 1.0, 1e-12);
  EXPECT_EQ(mix.noisy, speech + noise);
  EXPECT_EQ(mix.clipped_samples, 2u);  // 2 and -2 are kept, not renormalized
  EXPECT_DOUBLE_EQ(mix.noisy[0], 2.0);
}

TEST(MixAtSnr, GainFormulaQuarterPowerNoise) {
  Waveform speech({1, -1, 1, -1, 1, -1});
  Waveform noise({0.5, 0.5, -0.5, 0.5, -0.5, -0.5});
  // g = sqrt(1 / (0.25 * 10^0.60206)) = 1 to ~1e-6.
  MixResult mix = MixAtSnr(speech, noise, 6.0206);
  EXPECT_NEAR(mix.gain, 1.0, 1e-5);
}

TEST(MixAtSnr, DegenerateInputs) {
  std::mt19937_64 rng(3);
  Waveform speech = RandomWave(rng, 100);
  try {
    MixAtSnr(speech, Waveform::Zeros(100), 5.0);
    FAIL();
  } catch (const DataError &e) {
    EXPECT_STREQ(e.what(), "degenerate noise");
  }
  try {
    MixAtSnr(Waveform::Zeros(100), speech, 5.0);
    FAIL();
  } catch (const DataError &e) {
    EXPECT_STREQ(e.what(), "degenerate speech");
  }
  EXPECT_THROW(MixAtSnr(speech, Waveform(RandomVector(rng, 100), 16000), 5.0),
               DataError);
}

TEST(MixAtSnr, InverseHoldsForRandomTriples) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> snr(-5.0, 30.0);
  std::uniform_int_distribution<int> len(200, 3000);
  for (int trial = 0; trial < 200; ++trial) {
    Waveform s = RandomWave(rng, len(rng), 0.2);
    Waveform n = RandomWave(rng, len(rng), 0.05);
    const double r = snr(rng);
    MixResult mix = MixAtSnr(s, n, r);
    ASSERT_EQ(mix.noisy.size(), s.size());
    EXPECT_NEAR(MeasureSnr(s, mix.scaled_noise), r, 1e-6);
  }
}

TEST(FitToLength, LoopsWithCrossfadeAndCrops) {
  std::vector<double> ramp(200);
  for (int i = 0; i < 200; ++i) ramp[i] = i / 200.0;
  Waveform noise(ramp);
  Waveform looped = FitToLength(noise, 500);
  ASSERT_EQ(looped.size(), 500u);
  for (int i = 0; i < 120; ++i) EXPECT_EQ(looped[i], ramp[i]);
  // Inside the seam both copies contribute.
  EXPECT_GT(looped[125], ramp[125] * 0.0);
  Waveform cropped = FitToLength(noise, 50, 30);
  EXPECT_EQ(cropped[0], ramp[30]);
  EXPECT_EQ(cropped.size(), 50u);
}

TEST(MeasureSnr, Identities) {
  std::mt19937_64 rng(5);
  Waveform x = RandomWave(rng, 512);
  EXPECT_NEAR(MeasureSnr(x, x), 0.0, 1e-12);
  EXPECT_NEAR(MeasureSnr(x, 0.5 * x), 6.020599913279624, 1e-9);
  EXPECT_THROW(MeasureSnr(x, Waveform::Zeros(512)), DataError);
  EXPECT_THROW(MeasureSnr(x, Waveform::Zeros(10)), DataError);
}

TEST(SiSnr, CapsAndScaleInvariance) {
  std::mt19937_64 rng(7);
  std::vector<double> x = RandomVector(rng, 256);
  std::vector<double> x2 = x;
  for (double &v : x2) v *= 2.0;
  EXPECT_DOUBLE_EQ(SiSnr(x, x), 60.0);
  EXPECT_DOUBLE_EQ(SiSnr(x2, x), 60.0);
  std::vector<double> noisy = x;
  std::vector<double> w = RandomVector(rng, 256, 0.3);
  for (size_t i = 0; i < x.size(); ++i) noisy[i] += w[i];
  const double base = SiSnr(noisy, x);
  for (double alpha : {0.5, 2.0, 10.0}) {
    std::vector<double> scaled = noisy;
    for (double &v : scaled) v *= alpha;
    EXPECT_LT(std::abs(SiSnr(scaled, x) - base), 1e-4);
  }
  EXPECT_THROW(SiSnr(x, std::vector<double>(256, 0.0)), DataError);
  EXPECT_THROW(SiSnr(x, std::vector<double>(256, 3.0)), DataError);  // zero after mean removal
}

TEST(SiSnr, MatchesIndependentOracle) {
  std::vector<double> x = OracleSignal(), w = OraclePerturbation(), est = x;
  for (int i = 0; i < 16; ++i) est[i] += w[i];
  EXPECT_NEAR(SiSnr(est, x), 13.778260325924254, 1e-9);
  EXPECT_NEAR(SdSdr(est, x), 12.293520083362255, 1e-9);
}

TEST(SdSdr, ScaleDependence) {
  std::mt19937_64 rng(9);
  std::vector<double> x = RandomVector(rng, 300);
  std::vector<double> x2 = x;
  for (double &v : x2) v *= 2.0;
  EXPECT_DOUBLE_EQ(SdSdr(x, x), 60.0);
  EXPECT_NEAR(SdSdr(x2, x), 6.0206, 1e-3);
  EXPECT_NE(SdSdr(x2, x), SdSdr(x, x));
}

TEST(SdSdrLoss, FloorAndMonotonicity) {
  std::mt19937_64 rng(13);
  std::vector<double> x = RandomVector(rng, 128);
  LossWithGradient at_ref = SdSdrLoss(x, x);
  EXPECT_DOUBLE_EQ(at_ref.loss, -60.0);
  for (double g : at_ref.gradient) EXPECT_EQ(g, 0.0);

  std::vector<double> w = RandomVector(rng, 128);
  double previous = std::numeric_limits<double>::infinity();
  for (double t : {1.0, 0.5, 0.25, 0.1, 0.05, 0.01}) {
    std::vector<double> est = x;
    for (size_t i = 0; i < est.size(); ++i) est[i] += t * w[i];
    const double loss = SdSdrLoss(est, x).loss;
    EXPECT_LT(loss, previous);
    previous = loss;
  }
}

// Central finite differences are the oracle for the analytic gradient.
TEST(SdSdrLoss, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> ref = RandomVector(rng, 32);
    std::vector<double> est = ref;
    std::vector<double> w = RandomVector(rng, 32, 0.5);
    for (size_t i = 0; i < est.size(); ++i) est[i] = 0.8 * est[i] + w[i];
    LossWithGradient lg = SdSdrLoss(est, ref);
    ASSERT_GT(lg.loss, -60.0);
    double err = 0.0, norm = 0.0;
    const double h = 1e-6;
    for (size_t i = 0; i < est.size(); ++i) {
      std::vector<double> p = est, m = est;
      p[i] += h;
      m[i] -= h;
      const double fd = (SdSdrLoss(p, ref).loss - SdSdrLoss(m, ref).loss) / (2 * h);
      err += (fd - lg.gradient[i]) * (fd - lg.gradient[i]);
      norm += fd * fd;
    }
    EXPECT_LT(std::sqrt(err / norm), 1e-4) << "trial " << trial;
  }
}

TEST(SiSnrLoss, GradientOrthogonalToScale) {
  std::mt19937_64 rng(19);
  std::vector<double> ref = RandomVector(rng, 64), est = RandomVector(rng, 64);
  LossWithGradient lg = SiSnrLoss(est, ref);
  // d/d(beta) of loss(beta * est) at beta = 1 is <grad, est> = 0.
  // Exact up to the epsilon regularizers.
  double dot = 0.0, gnorm = 0.0, enorm = 0.0;
  double mean = 0.0;
  for (double v : est) mean += v / 64.0;
  for (size_t i = 0; i < est.size(); ++i) {
    dot += lg.gradient[i] * (est[i] - mean);
    gnorm += lg.gradient[i] * lg.gradient[i];
    enorm += (est[i] - mean) * (est[i] - mean);
  }
  EXPECT_LT(std::abs(dot) / std::sqrt(gnorm * enorm), 1e-7);
}

TEST(Stft, RoundTrip) {
  SignalConfig config;
  std::mt19937_64 rng(23);
  for (size_t len : {256u, 512u, 1024u, 8000u, 1000u, 333u}) {
    std::vector<double> x = RandomVector(rng, len, 0.3);
    ComplexSpectrogram spec = Stft(x, config, StftPadding::kFull);
    std::vector<double> y = Istft(spec);
    ASSERT_EQ(y.size(), x.size());
    double err = 0.0;
    for (size_t i = 0; i < len; ++i) err = std::max(err, std::abs(x[i] - y[i]));
    EXPECT_LT(err, 1e-6) << len;
  }
}

TEST(Stft, FrameCount) {
  SignalConfig config;
  std::vector<double> x(1000, 0.1);
  ComplexSpectrogram spec = Stft(x, config, StftPadding::kNone);
  EXPECT_EQ(spec.num_frames(), (1000 - 256) / 64 + 1);
  EXPECT_EQ(spec.re.cols(), 129);
  EXPECT_THROW(Stft(std::vector<double>(100, 0.0), config, StftPadding::kNone),
               DataError);
}

TEST(LogMel, ZerosSitAtFloor) {
  SignalConfig config;
  MelSpectrogram mel = LogMel(Waveform::Zeros(2000), config);
  EXPECT_EQ(mel.frames.rows(), (2000 - 256) / 64 + 1);
  EXPECT_EQ(mel.frames.cols(), 40);
  EXPECT_TRUE((mel.frames.array() == std::log(1e-10)).all());
  EXPECT_THROW(LogMel(Waveform::Zeros(255), config), DataError);
}

TEST(LogMel, EveryFilterIsNonEmpty) {
  SignalConfig config;
  const Eigen::MatrixXd &fb = MelFilterbank(config);
  for (int b = 0; b < config.mel_bands; ++b) EXPECT_GT(fb.row(b).sum(), 0.0) << b;
}

TEST(LogMel, SineAtBandCenterPeaksInThatBand) {
  SignalConfig config;
  for (int band : {10, 18, 25, 31, 36}) {
    const double hz = MelBandCenterHz(config, band);
    std::vector<double> x(4000);
    for (size_t i = 0; i < x.size(); ++i) {
      x[i] = 0.5 * std::sin(2.0 * std::numbers::pi * hz * i / 8000.0);
    }
    MelSpectrogram mel = LogMel(Waveform(x), config);
    for (Eigen::Index f = 0; f < mel.frames.rows(); ++f) {
      Eigen::Index arg;
      mel.frames.row(f).maxCoeff(&arg);
      EXPECT_EQ(arg, band) << "frame " << f;
    }
  }
}

TEST(LogMel, DoublingAmplitudeAddsLogTwo) {
  SignalConfig config;
  std::mt19937_64 rng(29);
  std::vector<double> x = RandomVector(rng, 3000, 0.1), x2 = x;
  for (double &v : x2) v *= 2.0;
  MelSpectrogram a = LogMel(Waveform(x), config), b = LogMel(Waveform(x2), config);
  const double floor = std::log(config.mel_floor);
  for (Eigen::Index i = 0; i < a.frames.size(); ++i) {
    if (a.frames(i) > floor) {
      EXPECT_NEAR(b.frames(i) - a.frames(i), std::log(2.0), 1e-9);
    }
  }
}

TEST(MuLaw, Endpoints) {
  EXPECT_EQ(MuLawEncode(0.0), 128);
  EXPECT_EQ(MuLawDecode(128), 0.0);
  EXPECT_EQ(MuLawEncode(1.0), 255);
  EXPECT_EQ(MuLawEncode(-1.0), 0);
  EXPECT_EQ(MuLawEncode(7.0), 255);
  EXPECT_EQ(MuLawEncode(-7.0), 0);
}

// Oracle: cell c covers the compressed interval [(c-128-0.5)/128,
// (c-128+0.5)/128] clipped to [-1, 1]; the top cell also absorbs the clamped
// range up to 1. Widths in the signal domain follow from the closed-form
// expansion.
TEST(MuLaw, RoundTripWithinWidestCell) {
  auto expand = [](double y) {
    return std::copysign((std::pow(256.0, std::abs(y)) - 1.0) / 255.0, y);
  };
  double widest = 0.0;
  for (int c = 0; c < 256; ++c) {
    const double lo = std::max(-1.0, (c - 128 - 0.5) / 128.0);
    const double hi = c == 255 ? 1.0 : (c - 128 + 0.5) / 128.0;
    widest = std::max(widest, expand(hi) - expand(lo));
  }
  double worst = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double x = -1.0 + 2.0 * i / 10000.0;
    worst = std::max(worst, std::abs(MuLawDecode(MuLawEncode(x)) - x));
  }
  EXPECT_LE(worst, widest);
  EXPECT_GT(worst, 0.0);
}

TEST(Mcd, Oracles) {
  CepstralSequence a, b;
  a.frames = Eigen::MatrixXd::Zero(1, 24);
  b.frames = a.frames;
  b.frames(0, 5) = 1.0;
  EXPECT_NEAR(Mcd(a, b), 6.141851463713754, 1e-10);
  EXPECT_EQ(Mcd(a, a), 0.0);

  std::mt19937_64 rng(31);
  CepstralSequence r;
  r.frames = Eigen::MatrixXd::NullaryExpr(10, 24, [&] {
    return std::normal_distribution<double>(0.0, 1.0)(rng);
  });
  CepstralSequence dup;
  dup.frames.resize(11, 24);
  dup.frames.topRows(4) = r.frames.topRows(4);
  dup.frames.row(4) = r.frames.row(3);
  dup.frames.bottomRows(6) = r.frames.bottomRows(6);
  EXPECT_EQ(Mcd(r, dup), 0.0);
  EXPECT_EQ(Mcd(dup, r), 0.0);
}

TEST(Mcd, SymmetricOnDiagonalPath) {
  std::mt19937_64 rng(37);
  std::normal_distribution<double> n(0.0, 0.1);
  CepstralSequence a, b;
  a.frames = Eigen::MatrixXd::NullaryExpr(12, 24, [&] { return n(rng); });
  b.frames = a.frames.array() + 0.05;
  EXPECT_NEAR(Mcd(a, b), Mcd(b, a), 1e-12);
}

TEST(Mcd, Errors) {
  CepstralSequence a, b, empty, c0;
  a.frames = Eigen::MatrixXd::Zero(3, 24);
  b.frames = Eigen::MatrixXd::Zero(3, 12);
  empty.frames.resize(0, 24);
  c0.frames = a.frames;
  c0.includes_c0 = true;
  EXPECT_THROW(Mcd(a, b), DataError);
  EXPECT_THROW(Mcd(a, empty), DataError);
  EXPECT_THROW(Mcd(a, c0), DataError);
}

TEST(MelCepstra, ZerosAndConstantShift) {
  SignalConfig config;
  CepstralSequence z = MelCepstra(Waveform::Zeros(2000), config);
  EXPECT_EQ(z.order(), 24);
  EXPECT_LT(z.frames.cwiseAbs().maxCoeff(), 1e-9);

  std::mt19937_64 rng(41);
  MelSpectrogram mel = LogMel(RandomWave(rng, 2000), config);
  MelSpectrogram shifted = mel;
  shifted.frames.array() += 1.7;  // exp-scaling the mel magnitudes
  CepstralSequence a = MelCepstra(mel, 24), b = MelCepstra(shifted, 24);
  EXPECT_LT((a.frames - b.frames).cwiseAbs().maxCoeff(), 1e-9);

  // Direct DCT-II on one frame as the oracle.
  const Eigen::RowVectorXd frame = mel.frames.row(3);
  for (int k = 1; k <= 24; ++k) {
    double acc = 0.0;
    for (int i = 0; i < 40; ++i) {
      acc += frame[i] * std::cos(std::numbers::pi * (i + 0.5) * k / 40.0);
    }
    EXPECT_NEAR(a.frames(3, k - 1), std::sqrt(2.0 / 40.0) * acc, 1e-9);
  }
  CepstralSequence x = MelCepstra(RandomWave(rng, 3000), config);
  EXPECT_EQ(Mcd(x, x), 0.0);
}

TEST(Wav, RoundTripAndRejection) {
  auto dir = n2n::testing::ScratchDir("wav");
  std::mt19937_64 rng(43);
  Waveform x = RandomWave(rng, 1234, 0.2);
  const std::string path = (dir / "x.wav").string();
  WriteWav(path, x);
  Waveform y = ReadWav(path);
  ASSERT_EQ(y.size(), x.size());
  for (size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(x[i], y[i], 1.0 / 32767.0);

  const std::string path44 = (dir / "y.wav").string();
  WriteWav(path44, Waveform(std::vector<double>(100, 0.1), 44100));
  try {
    ReadWav(path44);
    FAIL();
  } catch (const DataError &e) {
    EXPECT_NE(std::string(e.what()).find("44100"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("8000 Hz"), std::string::npos);
  }
  std::string bytes = EncodeWav(x);
  bytes[22] = 2;  // stereo
  EXPECT_THROW(DecodeWav(bytes, 8000, "stereo"), DataError);
  EXPECT_THROW(DecodeWav("garbage", 8000, "junk"), DataError);
}

TEST(Waveform, Invariants) {
  EXPECT_THROW(Waveform(std::vector<double>{}), DataError);
  EXPECT_THROW(Waveform(std::vector<double>{0.0, std::nan("")}), DataError);
  EXPECT_THROW(Waveform({1.0}) + Waveform({1.0}, 16000), DataError);
}

TEST(Separation, ClosureIsExactForRandomPairs) {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 50; ++t) {
    Waveform y = RandomWave(rng, 700), d = RandomWave(rng, 700);
    Waveform back = (y - d) + d;
    for (size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(back[i], y[i], 1e-7);
  }
}

}  // namespace
}  // namespace n2n::signal
