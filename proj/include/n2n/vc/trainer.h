// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_VC_TRAINER_H_
#define N2N_VC_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "n2n/common/config.h"
#include "n2n/data/manifest.h"
#include "n2n/denoiser/denoiser.h"
#include "n2n/nn/curve.h"
#include "n2n/vc/vqvae.h"

namespace n2n::vc {

struct VcExample {
  std::string id;
  std::string speaker_id;
  denoiser::SeparationResult sep;
};

enum class NoiseSource {
  kSeparated,  // d and n from the denoiser
  kMixing,     // n is the scaled noise used at mixing time, d = y - n
};

NoiseSource ParseNoiseSource(const std::string &name);
std::string NoiseSourceName(NoiseSource source);

// Loads every rendered mixture in `manifest` and splits it into (y, d, n).
// `denoiser` may be null only for NoiseSource::kMixing.
std::vector<VcExample> BuildVcCorpus(const data::MixManifest &manifest,
                                     const denoiser::DenoiserModel *denoiser,
                                     NoiseSource source);

// Speaker ids of `corpus`, sorted and unique.
std::vector<std::string> CorpusSpeakers(const std::vector<VcExample> &corpus);

struct VcTrainConfig {
  long steps = 2000;
  int batch_size = 4;
  int segment_samples = 512;
  double learning_rate = 4e-3;
  // Cosine decay from learning_rate to learning_rate * final_lr_fraction
  // over lr_decay_steps; constant afterwards.
  double final_lr_fraction = 0.1;
  long lr_decay_steps = 2000;
  double clip_norm = 5.0;
  uint64_t seed = 1;
  long log_every = 100;
  long checkpoint_every = 500;
  // Smoothed EMA count below which a codebook entry is restarted.
  double dead_threshold = 0.03;

  void Validate() const;
  // Rate used for 1-based `step`.
  double LearningRateAt(long step) const;
  void Save(const std::string &prefix, KeyValueConfig *kv) const;
  void Load(const std::string &prefix, const KeyValueConfig &kv);
};

struct VcTrainResult {
  // train_loss is the mu-law cross-entropy; valid_loss is unset.
  std::vector<nn::CurvePoint> curve;
  // Codebook entries used when quantizing the whole corpus after training.
  int codebook_used = 0;
};

inline constexpr char kVcCheckpoint[] = "vc.ckpt";
inline constexpr char kVcCurve[] = "vc_curve.jsonl";

// Teacher-forced training on random segments: cross-entropy of the variant's
// target codes plus the commitment term; the codebook follows an EMA of its
// assigned latents. Fits the input normalization first when the model has
// none. With `out_dir` the checkpoint (including optimizer state) and curve
// are written there; `resume` continues from it and rejects a checkpoint of
// another variant.
VcTrainResult TrainVc(VQVAEModel *model, const std::vector<VcExample> &corpus,
                      const VcTrainConfig &config, const std::filesystem::path &out_dir = {},
                      bool resume = false);

}  // namespace n2n::vc

#endif  // N2N_VC_TRAINER_H_
