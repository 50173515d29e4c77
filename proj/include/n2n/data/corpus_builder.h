// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_DATA_CORPUS_BUILDER_H_
#define N2N_DATA_CORPUS_BUILDER_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "n2n/data/manifest.h"
#include "n2n/data/pool.h"
#include "n2n/signal/mixing.h"

namespace n2n::data {

struct CorpusSpec {
  std::vector<double> train_snr_grid = {6, 8, 10, 12, 14, 16, 18, 20};
  std::vector<double> eval_snr_grid = {-5, 0, 5, 10, 15, 20, 25, 30};
  // Fraction of content ids held out for evaluation (at least one each side
  // when both fractions are in (0, 1)). 0 puts everything in train.
  double eval_content_fraction = 0.5;
  // Fraction of noise categories reserved for evaluation.
  double eval_category_fraction = 0.25;
  bool disjoint_noise = true;
  // Restrict to these speakers; empty means every pool speaker.
  std::vector<std::string> speakers;
  uint64_t seed = 1;

  void Validate() const;
};

// Noise categories assigned to each split.
struct NoiseSplit {
  std::vector<std::string> train;
  std::vector<std::string> eval;
};
NoiseSplit PartitionNoise(const NoisePool &noise, const CorpusSpec &spec);

// Content ids held out for evaluation.
std::vector<std::string> EvalContents(const SpeechPool &speech, const CorpusSpec &spec);

// Chooses pairings and SNRs without rendering; paths for the rendered
// outputs point below `root`.
MixManifest PlanNoisyCorpus(const SpeechPool &speech, const NoisePool &noise,
                            const CorpusSpec &spec, const std::filesystem::path &root);

// Mixes one entry in memory.
signal::MixResult RenderEntry(const MixManifestEntry &entry, const SpeechPool &speech,
                              const NoisePool &noise);

// Plans, renders `{root}/{split}/{id}.wav` and `.noise.wav`, and writes
// `{root}/manifest.jsonl`. Returns the manifest with gain and clip counts.
MixManifest BuildNoisyCorpus(const SpeechPool &speech, const NoisePool &noise,
                             const CorpusSpec &spec, const std::filesystem::path &root);

// Eval entries rendered once per level under `{root}/snr_{level}/`, with
// identical pairings across levels.
std::vector<MixManifest> BuildParallelEvalSets(const SpeechPool &speech,
                                               const NoisePool &noise,
                                               const CorpusSpec &spec,
                                               const std::vector<double> &levels,
                                               const std::filesystem::path &root);

// Directory name for an SNR level, e.g. "snr_-5", "snr_12.5".
std::string LevelDirName(double level);

}  // namespace n2n::data

#endif  // N2N_DATA_CORPUS_BUILDER_H_
