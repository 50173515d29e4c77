// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "n2n/common/error.h"
#include "n2n/denoiser/denoiser.h"
#include "n2n/denoiser/trainer.h"
#include "n2n/nn/ops.h"
#include "n2n/signal/metrics.h"
#include "test_util.h"

namespace n2n::denoiser {
namespace {

using signal::Waveform;
using testing::RandomWave;

DenoiserConfig TinyConfig() {
  DenoiserConfig c;
  c.encoder_channels = {2, 3};
  c.rnn_width = 4;
  c.seed = 7;
  return c;
}

DenoiserModel TinyModel() { return DenoiserModel(TinyConfig(), signal::SignalConfig{}); }

std::vector<TrainingPair> TinyPairs(size_t count, size_t length, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<TrainingPair> out;
  for (size_t i = 0; i < count; ++i) {
    std::vector<double> clean(length), noisy(length);
    std::normal_distribution<double> dist(0.0, 0.05);
    const double f = 0.02 + 0.01 * static_cast<double>(i);
    for (size_t t = 0; t < length; ++t) {
      clean[t] = 0.3 * std::sin(2.0 * M_PI * f * static_cast<double>(t));
      noisy[t] = clean[t] + dist(rng);
    }
    out.push_back({"p" + std::to_string(i), Waveform(noisy), Waveform(clean)});
  }
  return out;
}

bool SameParameters(const nn::ParameterStore &a, const nn::ParameterStore &b) {
  if (a.all().size() != b.all().size()) return false;
  for (const auto &[name, p] : a.all()) {
    if (!b.Has(name) || p.value != b.Get(name).value) return false;
  }
  return true;
}

TEST(Denoiser, PreservesLengthAndIsDeterministic) {
  const DenoiserModel model = TinyModel();
  std::mt19937_64 rng(1);
  for (size_t n : {256u, 257u, 319u, 1000u, 4001u}) {
    const Waveform y = RandomWave(rng, n);
    const Waveform d = model.Denoise(y);
    EXPECT_EQ(d.size(), n);
    EXPECT_EQ(d, model.Denoise(y));
  }
  EXPECT_EQ(TinyModel().params().all().begin()->second.value,
            model.params().all().begin()->second.value);
}

TEST(Denoiser, RejectsShortOrMismatchedInput) {
  const DenoiserModel model = TinyModel();
  std::mt19937_64 rng(2);
  EXPECT_THROW(model.Denoise(RandomWave(rng, 255)), DataError);
  EXPECT_THROW(model.Denoise(Waveform(std::vector<double>(1000, 0.1), 16000)), DataError);
}

TEST(Denoiser, ZeroHeadOutputsSilenceAndNoiseIsInput) {
  DenoiserConfig c = TinyConfig();
  c.zero_mask_head = true;
  const DenoiserModel model(c, signal::SignalConfig{});
  std::mt19937_64 rng(3);
  const Waveform y = RandomWave(rng, 1200);
  const SeparationResult r = model.Separate(y);
  for (size_t i = 0; i < y.size(); ++i) {
    EXPECT_EQ(r.d[i], 0.0);
    EXPECT_EQ(r.n[i], y[i]);
  }
}

TEST(Denoiser, SeparationClosureHoldsForModelOutputs) {
  const DenoiserModel model = TinyModel();
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t n = 256 + rng() % 600;
    const SeparationResult r = model.Separate(RandomWave(rng, n));
    ASSERT_EQ(r.n.size(), n);
    for (size_t i = 0; i < n; ++i) ASSERT_NEAR(r.d[i] + r.n[i], r.y[i], 1e-12);
  }
}

TEST(Separate, ArithmeticExample) {
  const SeparationResult r = Separate(Waveform({0.5, -0.25, 0.0}), Waveform({0.4, -0.2, 0.0}));
  EXPECT_NEAR(r.n[0], 0.1, 1e-15);
  EXPECT_NEAR(r.n[1], -0.05, 1e-15);
  EXPECT_EQ(r.n[2], 0.0);
  EXPECT_THROW(Separate(Waveform({0.1, 0.2}), Waveform({0.1})), DataError);
}

TEST(Denoiser, StartsNearPassThrough) {
  const DenoiserModel model(DenoiserConfig{}, signal::SignalConfig{});
  std::mt19937_64 rng(5);
  const Waveform y = RandomWave(rng, 2000);
  const Waveform d = model.Denoise(y);
  EXPECT_GT(signal::SiSnr(d.samples(), y.samples()), 10.0);
}

TEST(Denoiser, WholeModelGradientMatchesFiniteDifferences) {
  DenoiserModel model = TinyModel();
  std::mt19937_64 rng(6);
  const Waveform y = RandomWave(rng, 256 + 64 * 3);
  const Waveform s = RandomWave(rng, y.size());
  nn::ParameterStore &store = model.params();
  store.ZeroGrad();
  {
    nn::Graph g;
    nn::Binder bind(&g, &store);
    nn::Var loss = nn::SdSdrLoss(model.Forward(bind, y.samples()), s.samples());
    g.Backward(loss);
  }
  auto eval = [&]() {
    nn::Graph g;
    nn::Binder bind(&g, static_cast<const nn::ParameterStore *>(&store));
    return nn::SdSdrLoss(model.Forward(bind, y.samples()), s.samples()).scalar();
  };
  const double h = 1e-6;
  int checked = 0;
  for (auto &[name, p] : store.all()) {
    const Eigen::Index stride = std::max<Eigen::Index>(1, p.value.size() / 6);
    for (Eigen::Index i = 0; i < p.value.size(); i += stride) {
      const double orig = p.value(i);
      p.value(i) = orig + h;
      const double up = eval();
      p.value(i) = orig - h;
      const double down = eval();
      p.value(i) = orig;
      const double numeric = (up - down) / (2.0 * h);
      EXPECT_NEAR(p.grad(i), numeric, 1e-5 * std::max(1.0, std::abs(numeric)))
          << name << "[" << i << "]";
      ++checked;
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(Denoiser, CheckpointRoundTripReproducesOutputs) {
  const DenoiserModel model = TinyModel();
  const auto dir = testing::ScratchDir("denoiser_ckpt");
  model.Save(dir / "m.ckpt");
  const DenoiserModel back = DenoiserModel::Load(dir / "m.ckpt");
  EXPECT_EQ(back.config(), model.config());
  EXPECT_TRUE(SameParameters(back.params(), model.params()));
  std::mt19937_64 rng(8);
  const Waveform y = RandomWave(rng, 900);
  EXPECT_EQ(back.Denoise(y), model.Denoise(y));
}

TEST(DenoiserTraining, ZeroLearningRateChangesNothing) {
  DenoiserModel model = TinyModel();
  const DenoiserModel before = model;
  const auto pairs = TinyPairs(3, 800, 9);
  DenoiserTrainConfig cfg;
  cfg.steps = 5;
  cfg.batch_size = 3;
  cfg.crop_seconds = 800.0 / 8000.0;
  cfg.learning_rate = 0.0;
  const DenoiserTrainResult r = TrainDenoiser(&model, pairs, {}, cfg);
  EXPECT_TRUE(SameParameters(model.params(), before.params()));
  ASSERT_EQ(r.curve.size(), 5u);
  for (const auto &p : r.curve) EXPECT_EQ(p.train_loss, r.curve.front().train_loss);
}

TEST(DenoiserTraining, ReducesLossOnTinyProblem) {
  DenoiserModel model = TinyModel();
  const auto pairs = TinyPairs(4, 800, 10);
  const double before = EvaluateLoss(model, pairs);
  DenoiserTrainConfig cfg;
  cfg.steps = 30;
  cfg.crop_seconds = 0.05;
  cfg.learning_rate = 3e-3;
  TrainDenoiser(&model, pairs, {}, cfg);
  EXPECT_LT(EvaluateLoss(model, pairs), before);
}

TEST(DenoiserTraining, SameSeedSameRun) {
  const auto pairs = TinyPairs(4, 700, 11);
  DenoiserTrainConfig cfg;
  cfg.steps = 4;
  cfg.crop_seconds = 0.05;
  DenoiserModel a = TinyModel(), b = TinyModel();
  const auto ra = TrainDenoiser(&a, pairs, {}, cfg);
  const auto rb = TrainDenoiser(&b, pairs, {}, cfg);
  ASSERT_EQ(ra.curve.size(), rb.curve.size());
  for (size_t i = 0; i < ra.curve.size(); ++i) {
    EXPECT_EQ(ra.curve[i].train_loss, rb.curve[i].train_loss);
  }
  EXPECT_TRUE(SameParameters(a.params(), b.params()));
}

TEST(DenoiserTraining, ResumeMatchesUninterruptedRun) {
  const auto pairs = TinyPairs(4, 700, 12);
  const auto valid = TinyPairs(2, 700, 13);
  DenoiserTrainConfig cfg;
  cfg.crop_seconds = 0.05;
  cfg.valid_every = 3;
  cfg.steps = 6;
  DenoiserModel straight = TinyModel();
  const auto full = TrainDenoiser(&straight, pairs, valid, cfg, testing::ScratchDir("den_a"));

  const auto dir = testing::ScratchDir("den_b");
  DenoiserModel first = TinyModel();
  DenoiserTrainConfig half = cfg;
  half.steps = 3;
  TrainDenoiser(&first, pairs, valid, half, dir);
  DenoiserModel resumed = TinyModel();
  const auto rest = TrainDenoiser(&resumed, pairs, valid, cfg, dir, /*resume=*/true);

  ASSERT_EQ(rest.curve.size(), full.curve.size());
  for (size_t i = 0; i < full.curve.size(); ++i) {
    EXPECT_EQ(rest.curve[i].train_loss, full.curve[i].train_loss) << i;
  }
  EXPECT_EQ(rest.best_step, full.best_step);
  EXPECT_TRUE(SameParameters(resumed.params(), straight.params()));
  EXPECT_EQ(nn::ReadCurve(dir / kDenoiserCurve).size(), 6u);
  EXPECT_TRUE(std::filesystem::exists(dir / kDenoiserCheckpoint));
}

TEST(DenoiserTraining, RejectsBadConfig) {
  DenoiserModel model = TinyModel();
  const auto pairs = TinyPairs(1, 700, 14);
  DenoiserTrainConfig cfg;
  cfg.batch_size = 0;
  EXPECT_THROW(TrainDenoiser(&model, pairs, {}, cfg), UsageError);
  DenoiserConfig bad = TinyConfig();
  bad.encoder_channels.clear();
  EXPECT_THROW(DenoiserModel(bad, signal::SignalConfig{}), UsageError);
}

}  // namespace
}  // namespace n2n::denoiser
