// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "n2n/data/corpus_builder.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "n2n/common/config.h"
#include "n2n/common/error.h"
#include "n2n/common/random.h"

namespace n2n::data {
namespace {

size_t HeldOutCount(size_t n, double fraction) {
  if (fraction <= 0.0 || n == 0) return 0;
  if (fraction >= 1.0) return n;
  if (n == 1) return 0;
  const auto k = static_cast<size_t>(std::llround(fraction * static_cast<double>(n)));
  return std::clamp<size_t>(k, 1, n - 1);
}

template <typename T>
std::vector<T> SeededPick(std::vector<T> items, size_t k, uint64_t seed) {
  std::mt19937_64 rng(seed);
  // Fisher-Yates with an explicit draw so the order is library independent.
  for (size_t i = items.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
  items.resize(k);
  std::sort(items.begin(), items.end());
  return items;
}

size_t Draw(std::mt19937_64 &rng, size_t n) { return static_cast<size_t>(rng() % n); }

std::vector<const SpeechClip *> SelectSpeech(const SpeechPool &speech,
                                             const CorpusSpec &spec) {
  if (speech.clips.empty()) throw DataError("speech pool is empty");
  std::set<std::string> wanted(spec.speakers.begin(), spec.speakers.end());
  const auto available = speech.Speakers();
  for (const auto &s : wanted) {
    if (!std::binary_search(available.begin(), available.end(), s)) {
      throw DataError("speaker " + s + " not in speech pool");
    }
  }
  std::vector<const SpeechClip *> out;
  for (const auto &c : speech.clips) {
    if (wanted.empty() || wanted.count(c.speaker_id)) out.push_back(&c);
  }
  return out;
}

}  // namespace

void CorpusSpec::Validate() const {
  if (train_snr_grid.empty()) throw UsageError("train SNR grid is empty");
  if (eval_snr_grid.empty()) throw UsageError("eval SNR grid is empty");
  for (double v : train_snr_grid) {
    if (!std::isfinite(v)) throw UsageError("train SNR grid has a non-finite value");
  }
  for (double v : eval_snr_grid) {
    if (!std::isfinite(v)) throw UsageError("eval SNR grid has a non-finite value");
  }
  if (!(eval_content_fraction >= 0.0 && eval_content_fraction <= 1.0)) {
    throw UsageError("eval content fraction must lie in [0, 1]");
  }
  if (!(eval_category_fraction > 0.0 && eval_category_fraction < 1.0)) {
    throw UsageError("eval category fraction must lie in (0, 1)");
  }
}

NoiseSplit PartitionNoise(const NoisePool &noise, const CorpusSpec &spec) {
  if (noise.clips.empty()) throw DataError("noise pool is empty");
  const auto categories = noise.Categories();
  NoiseSplit split;
  if (!spec.disjoint_noise) {
    split.train = split.eval = categories;
    return split;
  }
  if (categories.size() < 2) {
    throw DataError("noise categories insufficient for disjoint split: need at least 2, pool has " +
                    std::to_string(categories.size()));
  }
  const size_t k = HeldOutCount(categories.size(), spec.eval_category_fraction);
  split.eval = SeededPick(categories, k, DeriveSeed(spec.seed, "noise_split"));
  for (const auto &c : categories) {
    if (!std::binary_search(split.eval.begin(), split.eval.end(), c)) split.train.push_back(c);
  }
  return split;
}

std::vector<std::string> EvalContents(const SpeechPool &speech, const CorpusSpec &spec) {
  std::set<std::string> ids;
  for (const SpeechClip *c : SelectSpeech(speech, spec)) ids.insert(c->content_id);
  const std::vector<std::string> all(ids.begin(), ids.end());
  return SeededPick(all, HeldOutCount(all.size(), spec.eval_content_fraction),
                    DeriveSeed(spec.seed, "content_split"));
}

MixManifest PlanNoisyCorpus(const SpeechPool &speech, const NoisePool &noise,
                            const CorpusSpec &spec, const std::filesystem::path &root) {
  spec.Validate();
  const auto clips = SelectSpeech(speech, spec);
  const NoiseSplit noise_split = PartitionNoise(noise, spec);
  const auto eval_contents = EvalContents(speech, spec);
  std::map<std::string, std::vector<const NoiseClip *>> by_category;
  for (const auto &n : noise.clips) by_category[n.category].push_back(&n);

  MixManifest out;
  for (const SpeechClip *clip : clips) {
    MixManifestEntry e;
    e.utterance_id = clip->utterance_id;
    e.speaker_id = clip->speaker_id;
    e.content_id = clip->content_id;
    e.speech_path = clip->path;
    e.split = std::binary_search(eval_contents.begin(), eval_contents.end(), clip->content_id)
                  ? Split::kEval
                  : Split::kTrain;
    e.clip_seed = DeriveSeed(spec.seed, "clip/" + clip->utterance_id);
    std::mt19937_64 rng(e.clip_seed);
    const auto &categories = e.split == Split::kEval ? noise_split.eval : noise_split.train;
    if (e.split == Split::kEval) {
      // Parallel utterances share a category across speakers.
      std::mt19937_64 crng(DeriveSeed(spec.seed, "eval_category/" + clip->content_id));
      e.noise_category = categories[Draw(crng, categories.size())];
    } else {
      e.noise_category = categories[Draw(rng, categories.size())];
    }
    const auto &candidates = by_category.at(e.noise_category);
    const NoiseClip *n = candidates[Draw(rng, candidates.size())];
    e.noise_id = n->noise_id;
    e.noise_path = n->path;
    const size_t length = clip->wave.size();
    e.noise_offset = n->wave.size() > length ? Draw(rng, n->wave.size() - length + 1) : 0;
    const auto &grid = e.split == Split::kEval ? spec.eval_snr_grid : spec.train_snr_grid;
    e.snr_db = grid[Draw(rng, grid.size())];
    const auto dir = root / SplitName(e.split);
    e.mixture_path = (dir / (e.utterance_id + ".wav")).string();
    e.scaled_noise_path = (dir / (e.utterance_id + ".noise.wav")).string();
    out.push_back(std::move(e));
  }
  return out;
}

signal::MixResult RenderEntry(const MixManifestEntry &entry, const SpeechPool &speech,
                              const NoisePool &noise) {
  const signal::Waveform &s = speech.Find(entry.utterance_id).wave;
  const signal::Waveform fitted =
      signal::FitToLength(noise.Find(entry.noise_id).wave, s.size(), entry.noise_offset);
  return signal::MixAtSnr(s, fitted, entry.snr_db);
}

namespace {

void RenderAll(MixManifest *manifest, const SpeechPool &speech, const NoisePool &noise) {
  for (auto &e : *manifest) {
    const signal::MixResult mix = RenderEntry(e, speech, noise);
    e.gain = mix.gain;
    e.clipped_samples = mix.clipped_samples;
    std::filesystem::create_directories(std::filesystem::path(e.mixture_path).parent_path());
    signal::WriteWav(e.mixture_path, mix.noisy);
    signal::WriteWav(e.scaled_noise_path, mix.scaled_noise);
  }
}

}  // namespace

MixManifest BuildNoisyCorpus(const SpeechPool &speech, const NoisePool &noise,
                             const CorpusSpec &spec, const std::filesystem::path &root) {
  MixManifest manifest = PlanNoisyCorpus(speech, noise, spec, root);
  RenderAll(&manifest, speech, noise);
  WriteManifest(root / "manifest.jsonl", manifest);
  return manifest;
}

std::string LevelDirName(double level) { return "snr_" + FormatExact(level); }

std::vector<MixManifest> BuildParallelEvalSets(const SpeechPool &speech,
                                               const NoisePool &noise,
                                               const CorpusSpec &spec,
                                               const std::vector<double> &levels,
                                               const std::filesystem::path &root) {
  if (levels.empty()) throw UsageError("no SNR levels for parallel eval sets");
  const MixManifest eval = Filter(PlanNoisyCorpus(speech, noise, spec, root), Split::kEval);
  if (eval.empty()) throw DataError("no eval utterances to build parallel sets from");
  std::vector<MixManifest> out;
  for (double level : levels) {
    if (!std::isfinite(level)) throw UsageError("SNR level must be finite");
    const auto dir = root / LevelDirName(level);
    MixManifest m = eval;
    for (auto &e : m) {
      e.snr_db = level;
      e.mixture_path = (dir / "eval" / (e.utterance_id + ".wav")).string();
      e.scaled_noise_path = (dir / "eval" / (e.utterance_id + ".noise.wav")).string();
    }
    RenderAll(&m, speech, noise);
    WriteManifest(dir / "manifest.jsonl", m);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace n2n::data
