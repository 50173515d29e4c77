// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <gtest/gtest.h>

#include <cmath>

#include "n2n/data/corpus_builder.h"
#include "n2n/data/manifest.h"
#include "n2n/data/pool.h"
#include "n2n/denoiser/trainer.h"
#include "n2n/eval/harness.h"
#include "n2n/vc/convert.h"
#include "n2n/vc/trainer.h"
#include "test_util.h"

namespace n2n {
namespace {

namespace fs = std::filesystem;

// Library-level pass: pools, corpus, both trainers, evaluation and a reload
// of every artifact from disk.
TEST(ToyPipeline, RunsAndReloads) {
  const fs::path root = testing::ScratchDir("toy_pipeline");
  data::ToyCorpusConfig tc;
  tc.n_utterances = 8;
  tc.n_noise_clips = 8;
  tc.min_seconds = 0.5;
  tc.max_seconds = 0.6;
  data::ToyCorpus toy = data::GenerateToyCorpus(tc);
  data::WritePools(root / "pools", &toy.speech, &toy.noise);
  data::CorpusSpec spec;
  const auto all = data::BuildNoisyCorpus(toy.speech, toy.noise, spec, root / "corpus");
  EXPECT_EQ(data::ReadManifest(root / "corpus" / "manifest.jsonl"), all);
  const auto train = data::Filter(all, data::Split::kTrain);
  const auto levels =
      data::BuildParallelEvalSets(toy.speech, toy.noise, spec, {0.0, 15.0}, root / "eval");
  ASSERT_EQ(levels.size(), 2u);
  eval::CheckParallelSets(levels);

  denoiser::DenoiserConfig dc;
  dc.encoder_channels = {4, 4};
  dc.rnn_width = 8;
  denoiser::DenoiserModel den(dc, signal::SignalConfig{});
  denoiser::DenoiserTrainConfig dt;
  dt.steps = 6;
  dt.batch_size = 2;
  dt.crop_seconds = 0.25;
  dt.valid_every = 3;
  const auto dres = denoiser::TrainDenoiser(&den, denoiser::LoadPairs(train),
                                            denoiser::LoadPairs(levels[0]), dt, root / "den");
  EXPECT_EQ(dres.curve.size(), 6u);
  const auto den2 = denoiser::DenoiserModel::Load(root / "den" / denoiser::kDenoiserCheckpoint);

  const auto corpus = vc::BuildVcCorpus(train, &den2, vc::NoiseSource::kSeparated);
  vc::VcConfig c;
  c.rnn_width = 16;
  c.fc_width = 16;
  vc::VQVAEModel proposed(c, signal::SignalConfig{}, vc::CorpusSpeakers(corpus));
  c.variant = vc::Variant::kBaseline;
  vc::VQVAEModel baseline(c, signal::SignalConfig{}, vc::CorpusSpeakers(corpus));
  vc::VcTrainConfig vt;
  vt.steps = 4;
  vt.batch_size = 2;
  vt.segment_samples = 128;
  vc::TrainVc(&proposed, corpus, vt, root / "vcp");
  vc::TrainVc(&baseline, corpus, vt, root / "vcb");
  const auto p2 = vc::VQVAEModel::Load(root / "vcp" / vc::kVcCheckpoint);
  const auto b2 = vc::VQVAEModel::Load(root / "vcb" / vc::kVcCheckpoint);

  const std::vector<eval::Method> methods = {{"clean_vc", eval::MethodKind::kCleanVc, &b2},
                                             {"baseline", eval::MethodKind::kBaseline, &b2},
                                             {"proposed", eval::MethodKind::kProposed, &p2}};
  const auto report = eval::EvalMcdVsSnr(den2, methods, levels, toy.speech, {});
  EXPECT_EQ(report.cells.size(), 6u);
  for (const auto &cell : report.cells) {
    EXPECT_GT(cell.count, 0);
    EXPECT_TRUE(std::isfinite(cell.mean_db));
    EXPECT_GT(cell.mean_db, 0.0);
  }
  eval::EmitReport(report, root / "report");
  EXPECT_EQ(eval::ReadReport(root / "report"), report);

  // Models reloaded from disk convert exactly like the in-memory ones.
  const auto y = signal::ReadWav(levels[1][0].mixture_path);
  EXPECT_EQ(vc::ConvertDirect(den, proposed, y, "spk01", 9),
            vc::ConvertDirect(den2, p2, y, "spk01", 9));
}

}  // namespace
}  // namespace n2n
