// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_DATA_MANIFEST_H_
#define N2N_DATA_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace n2n::data {

enum class Split { kTrain, kEval };
std::string SplitName(Split split);
Split ParseSplit(const std::string &name);

struct MixManifestEntry {
  std::string utterance_id;
  std::string speaker_id;
  std::string content_id;
  std::string speech_path;
  std::string noise_id;
  std::string noise_path;
  std::string noise_category;
  double snr_db = 0.0;
  Split split = Split::kTrain;
  uint64_t clip_seed = 0;
  // Crop start into the noise clip (0 when the clip is looped).
  uint64_t noise_offset = 0;
  // Rendered outputs and their metadata.
  std::string mixture_path;
  std::string scaled_noise_path;
  double gain = 0.0;
  uint64_t clipped_samples = 0;

  friend bool operator==(const MixManifestEntry &, const MixManifestEntry &) = default;
};

using MixManifest = std::vector<MixManifestEntry>;

// One JSON object per line, entries sorted by utterance_id then split.
std::string SerializeManifest(const MixManifest &manifest);
MixManifest ParseManifest(const std::string &text, const std::string &origin);
void WriteManifest(const std::filesystem::path &path, const MixManifest &manifest);
MixManifest ReadManifest(const std::filesystem::path &path);

// Entries of one split, in manifest order.
MixManifest Filter(const MixManifest &manifest, Split split);

}  // namespace n2n::data

#endif  // N2N_DATA_MANIFEST_H_
