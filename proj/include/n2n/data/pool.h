// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_DATA_POOL_H_
#define N2N_DATA_POOL_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "n2n/signal/waveform.h"

namespace n2n::data {

struct SpeechClip {
  std::string utterance_id;
  std::string speaker_id;
  // Utterances sharing a content id are parallel across speakers.
  std::string content_id;
  std::string path;
  signal::Waveform wave{std::vector<double>{0.0}};
};

struct NoiseClip {
  std::string noise_id;
  std::string category;
  std::string path;
  signal::Waveform wave{std::vector<double>{0.0}};
};

struct SpeechPool {
  std::vector<SpeechClip> clips;  // sorted by utterance_id
  const SpeechClip &Find(const std::string &utterance_id) const;
  std::vector<std::string> Speakers() const;  // sorted, unique
};

struct NoisePool {
  std::vector<NoiseClip> clips;  // sorted by noise_id
  const NoiseClip &Find(const std::string &noise_id) const;
  std::vector<std::string> Categories() const;  // sorted, unique
};

struct ToyCorpusConfig {
  uint64_t seed = 1;
  int n_speakers = 2;
  int n_utterances = 16;
  int n_noise_clips = 16;
  double min_seconds = 1.0;
  double max_seconds = 2.0;
  int sample_rate = signal::kDefaultSampleRate;
};

// Fundamental frequency base of toy speaker `index` in Hz.
double ToySpeakerF0(int index);
// Noise categories produced by the toy generator, in assignment order.
const std::vector<std::string> &ToyNoiseCategories();

// Synthetic pools: utterance i is spoken by speaker i % n_speakers with
// content i / n_speakers. Samples sit on the 16-bit PCM grid so that a WAV
// round trip is lossless. Paths are left empty.
struct ToyCorpus {
  SpeechPool speech;
  NoisePool noise;
};
ToyCorpus GenerateToyCorpus(const ToyCorpusConfig &config);

// Writes `{dir}/speech/{id}.wav`, `{dir}/noise/{id}.wav` and the index files
// speech.jsonl / noise.jsonl, filling in the clip paths.
void WritePools(const std::filesystem::path &dir, SpeechPool *speech,
                NoisePool *noise);
// Reads pools written by WritePools.
SpeechPool ReadSpeechPool(const std::filesystem::path &dir);
NoisePool ReadNoisePool(const std::filesystem::path &dir);

// External audio: `{dir}/{speaker}/{name}.wav`; content id is the stem, so
// identically named files of different speakers are treated as parallel.
SpeechPool ScanSpeechDirectory(const std::filesystem::path &dir);
// External noise: `{dir}/{category}/{name}.wav`.
NoisePool ScanNoiseDirectory(const std::filesystem::path &dir);

// Rounds to the 16-bit PCM grid used by WriteWav.
signal::Waveform QuantizeToPcm16(const signal::Waveform &wave);

}  // namespace n2n::data

#endif  // N2N_DATA_POOL_H_
