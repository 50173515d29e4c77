// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_DENOISER_TRAINER_H_
#define N2N_DENOISER_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "n2n/common/config.h"
#include "n2n/data/manifest.h"
#include "n2n/denoiser/denoiser.h"
#include "n2n/nn/curve.h"

namespace n2n::denoiser {

struct TrainingPair {
  std::string id;
  signal::Waveform noisy;
  signal::Waveform clean;
};

// Reads each entry's rendered mixture and clean speech.
std::vector<TrainingPair> LoadPairs(const data::MixManifest &manifest);

struct DenoiserTrainConfig {
  long steps = 500;
  int batch_size = 4;
  double crop_seconds = 0.5;
  double learning_rate = 3e-3;
  double clip_norm = 5.0;
  uint64_t seed = 1;
  long valid_every = 50;
  int max_valid_clips = 8;

  void Validate() const;
  void Save(const std::string &prefix, KeyValueConfig *kv) const;
  void Load(const std::string &prefix, const KeyValueConfig &kv);
};

struct DenoiserTrainResult {
  std::vector<nn::CurvePoint> curve;
  long best_step = 0;
  double best_valid_loss = 0.0;
};

// File names inside a training output directory.
inline constexpr char kDenoiserCheckpoint[] = "denoiser.ckpt";
inline constexpr char kDenoiserLastCheckpoint[] = "denoiser.last.ckpt";
inline constexpr char kDenoiserCurve[] = "denoiser_curve.jsonl";

// Minimizes the SD-SDR loss of Forward(noisy) against clean on random
// crops. With validation data the model ends at the best-validation
// parameters, otherwise at the last step. When `out_dir` is non-empty the
// best and last checkpoints and the loss curve are written there; `resume`
// continues from the last checkpoint in `out_dir`. Throws NumericalError on
// a non-finite loss or gradient.
DenoiserTrainResult TrainDenoiser(DenoiserModel *model, const std::vector<TrainingPair> &train,
                                  const std::vector<TrainingPair> &valid,
                                  const DenoiserTrainConfig &config,
                                  const std::filesystem::path &out_dir = {},
                                  bool resume = false);

// Mean SD-SDR loss of the model over full clips.
double EvaluateLoss(const DenoiserModel &model, const std::vector<TrainingPair> &pairs);

}  // namespace n2n::denoiser

#endif  // N2N_DENOISER_TRAINER_H_
