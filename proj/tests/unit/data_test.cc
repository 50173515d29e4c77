// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "n2n/common/error.h"
#include "n2n/data/corpus_builder.h"
#include "n2n/data/manifest.h"
#include "n2n/data/pool.h"
#include "n2n/signal/mixing.h"
#include "test_util.h"

namespace n2n::data {
namespace {

std::string Slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ToyCorpus SmallToy(uint64_t seed = 1) {
  ToyCorpusConfig c;
  c.seed = seed;
  c.n_speakers = 2;
  c.n_utterances = 8;
  c.n_noise_clips = 4;
  return GenerateToyCorpus(c);
}

// Normalized cross-correlation pitch of one window, or 0 when unvoiced.
// The shortest lag within 10% of the best one avoids sub-harmonic picks.
double WindowF0(const signal::Waveform &w, size_t start, size_t win) {
  const int rate = w.sample_rate();
  const int lo = rate / 500, hi = rate / 60;
  std::vector<double> nccf(hi + 1, 0.0);
  double peak = 0.0;
  for (int lag = lo; lag <= hi; ++lag) {
    double r = 0.0, e0 = 0.0, e1 = 0.0;
    for (size_t i = 0; i + lag < win; ++i) {
      r += w[start + i] * w[start + i + lag];
      e0 += w[start + i] * w[start + i];
      e1 += w[start + i + lag] * w[start + i + lag];
    }
    nccf[lag] = r / std::sqrt(e0 * e1 + 1e-20);
    peak = std::max(peak, nccf[lag]);
  }
  if (peak < 0.8) return 0.0;
  for (int lag = lo + 1; lag < hi; ++lag) {
    if (nccf[lag] >= 0.9 * peak && nccf[lag] >= nccf[lag - 1] && nccf[lag] >= nccf[lag + 1]) {
      return static_cast<double>(rate) / lag;
    }
  }
  return 0.0;
}

// Median pitch over voiced 64 ms windows.
double EstimateF0(const signal::Waveform &w) {
  const size_t win = 512;
  std::vector<double> f0;
  for (size_t s = 0; s + win <= w.size(); s += 256) {
    const double f = WindowF0(w, s, win);
    if (f > 0.0) f0.push_back(f);
  }
  if (f0.empty()) return 0.0;
  std::sort(f0.begin(), f0.end());
  return f0[f0.size() / 2];
}

TEST(ToyCorpus, CountsAndDeterminism) {
  const ToyCorpus a = SmallToy(), b = SmallToy();
  ASSERT_EQ(a.speech.clips.size(), 8u);
  ASSERT_EQ(a.noise.clips.size(), 4u);
  for (size_t i = 0; i < 8; ++i) EXPECT_EQ(a.speech.clips[i].wave, b.speech.clips[i].wave);
  for (size_t i = 0; i < 4; ++i) EXPECT_EQ(a.noise.clips[i].wave, b.noise.clips[i].wave);
  const ToyCorpus c = SmallToy(2);
  EXPECT_NE(a.speech.clips[0].wave, c.speech.clips[0].wave);
}

TEST(ToyCorpus, ClipsAreValidAudio) {
  const ToyCorpus t = SmallToy();
  for (const auto &c : t.speech.clips) {
    EXPECT_EQ(c.wave.sample_rate(), 8000);
    EXPECT_GE(c.wave.size(), 8000u);
    EXPECT_LE(c.wave.size(), 24000u);
    for (double v : c.wave.samples()) ASSERT_LE(std::abs(v), 1.0);
    EXPECT_GT(signal::MeanPower(c.wave.samples()), 1e-4);
  }
  for (const auto &n : t.noise.clips) {
    EXPECT_GE(n.wave.size(), 8000u);
    EXPECT_NEAR(std::sqrt(signal::MeanPower(n.wave.samples())), 0.1, 0.02);
  }
}

TEST(ToyCorpus, ParallelContentSharesDurationAcrossSpeakers) {
  const ToyCorpus t = SmallToy();
  std::map<std::string, std::set<size_t>> lengths;
  for (const auto &c : t.speech.clips) lengths[c.content_id].insert(c.wave.size());
  EXPECT_EQ(lengths.size(), 4u);
  for (const auto &[content, l] : lengths) EXPECT_EQ(l.size(), 1u) << content;
}

TEST(ToyCorpus, SpeakersHaveDistinctF0) {
  ToyCorpusConfig cfg;
  cfg.n_speakers = 4;
  cfg.n_utterances = 12;
  const ToyCorpus t = GenerateToyCorpus(cfg);
  std::map<std::string, std::vector<double>> f0;
  for (const auto &c : t.speech.clips) f0[c.speaker_id].push_back(EstimateF0(c.wave));
  std::vector<double> medians;
  int spk = 0;
  for (auto &[id, v] : f0) {
    std::sort(v.begin(), v.end());
    const double m = v[v.size() / 2];
    EXPECT_NEAR(m, ToySpeakerF0(spk), 0.15 * ToySpeakerF0(spk)) << id;
    medians.push_back(m);
    ++spk;
  }
  for (size_t i = 0; i < medians.size(); ++i) {
    for (size_t j = i + 1; j < medians.size(); ++j) {
      EXPECT_GE(std::abs(medians[i] - medians[j]), 20.0);
    }
  }
}

TEST(ToyCorpus, PoolRoundTripIsLosslessAndByteIdentical) {
  ToyCorpus a = SmallToy(), b = SmallToy();
  const auto d1 = testing::ScratchDir("pool1"), d2 = testing::ScratchDir("pool2");
  WritePools(d1, &a.speech, &a.noise);
  WritePools(d2, &b.speech, &b.noise);
  const SpeechPool s = ReadSpeechPool(d1);
  const NoisePool n = ReadNoisePool(d1);
  ASSERT_EQ(s.clips.size(), a.speech.clips.size());
  for (size_t i = 0; i < s.clips.size(); ++i) {
    EXPECT_EQ(s.clips[i].wave, a.speech.clips[i].wave);
    EXPECT_EQ(s.clips[i].content_id, a.speech.clips[i].content_id);
    EXPECT_EQ(Slurp(s.clips[i].path), Slurp(b.speech.clips[i].path));
  }
  for (size_t i = 0; i < n.clips.size(); ++i) EXPECT_EQ(n.clips[i].wave, a.noise.clips[i].wave);
  EXPECT_EQ(Slurp(d1 / "speech.jsonl"), Slurp(d2 / "speech.jsonl"));
  EXPECT_EQ(Slurp(d1 / "noise.jsonl"), Slurp(d2 / "noise.jsonl"));
}

// Tiny in-memory pool for structural tests.
ToyCorpus TinyPools(int speakers, int contents, int noise_per_category,
                    const std::vector<std::string> &categories) {
  ToyCorpus t;
  std::mt19937_64 rng(5);
  for (int s = 0; s < speakers; ++s) {
    for (int c = 0; c < contents; ++c) {
      SpeechClip clip;
      clip.speaker_id = "s" + std::to_string(s);
      clip.content_id = "c" + std::to_string(1000 + c);
      clip.utterance_id = clip.speaker_id + "_" + clip.content_id;
      clip.wave = testing::RandomWave(rng, 400 + 10 * c, 0.2);
      t.speech.clips.push_back(std::move(clip));
    }
  }
  for (const auto &cat : categories) {
    for (int i = 0; i < noise_per_category; ++i) {
      NoiseClip n;
      n.category = cat;
      n.noise_id = cat + "_" + std::to_string(i);
      n.wave = testing::RandomWave(rng, 300 + 97 * i, 0.1);
      t.noise.clips.push_back(std::move(n));
    }
  }
  std::sort(t.speech.clips.begin(), t.speech.clips.end(),
            [](const auto &a, const auto &b) { return a.utterance_id < b.utterance_id; });
  std::sort(t.noise.clips.begin(), t.noise.clips.end(),
            [](const auto &a, const auto &b) { return a.noise_id < b.noise_id; });
  return t;
}

TEST(BuildNoisyCorpus, NineHundredSeventyTwoUtterances) {
  // 12 speakers x 81 utterances, all in training.
  const ToyCorpus t = TinyPools(12, 81, 2, {"a", "b", "c", "d"});
  CorpusSpec spec;
  spec.eval_content_fraction = 0.0;
  const auto root = testing::ScratchDir("corpus972");
  const MixManifest m = BuildNoisyCorpus(t.speech, t.noise, spec, root);
  EXPECT_EQ(m.size(), 972u);
  const MixManifest back = ReadManifest(root / "manifest.jsonl");
  EXPECT_EQ(back.size(), 972u);
  std::set<double> grid(spec.train_snr_grid.begin(), spec.train_snr_grid.end());
  for (const auto &e : back) {
    EXPECT_EQ(e.split, Split::kTrain);
    EXPECT_TRUE(grid.count(e.snr_db));
    EXPECT_TRUE(std::filesystem::exists(e.mixture_path));
    EXPECT_TRUE(std::filesystem::exists(e.scaled_noise_path));
  }
  EXPECT_TRUE(std::is_sorted(back.begin(), back.end(), [](const auto &a, const auto &b) {
    return a.utterance_id < b.utterance_id;
  }));
}

TEST(BuildNoisyCorpus, ByteIdenticalAcrossRuns) {
  ToyCorpus a = SmallToy(), b = SmallToy();
  const auto r1 = testing::ScratchDir("det1"), r2 = testing::ScratchDir("det2");
  WritePools(r1 / "pool", &a.speech, &a.noise);
  WritePools(r2 / "pool", &b.speech, &b.noise);
  CorpusSpec spec;
  const MixManifest m1 = BuildNoisyCorpus(a.speech, a.noise, spec, r1);
  const MixManifest m2 = BuildNoisyCorpus(b.speech, b.noise, spec, r2);
  EXPECT_EQ(Slurp(r1 / "manifest.jsonl"), Slurp(r2 / "manifest.jsonl"));
  ASSERT_EQ(m1.size(), m2.size());
  for (size_t i = 0; i < m1.size(); ++i) {
    EXPECT_EQ(Slurp(m1[i].mixture_path), Slurp(m2[i].mixture_path));
    EXPECT_EQ(Slurp(m1[i].scaled_noise_path), Slurp(m2[i].scaled_noise_path));
  }
}

TEST(BuildNoisyCorpus, MixturesHitRequestedSnr) {
  const ToyCorpus t = SmallToy();
  CorpusSpec spec;
  const MixManifest m = PlanNoisyCorpus(t.speech, t.noise, spec, "unused");
  for (const auto &e : m) {
    const signal::MixResult mix = RenderEntry(e, t.speech, t.noise);
    EXPECT_NEAR(signal::MeasureSnr(t.speech.Find(e.utterance_id).wave, mix.scaled_noise),
                e.snr_db, 1e-6);
  }
}

TEST(BuildNoisyCorpus, EvalNoiseCategoriesDisjointFromTrain) {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    const ToyCorpus t = TinyPools(3, 10, 2, {"a", "b", "c", "d", "e", "f"});
    CorpusSpec spec;
    spec.seed = seed;
    const MixManifest m = PlanNoisyCorpus(t.speech, t.noise, spec, "x");
    std::set<std::string> train, eval;
    for (const auto &e : m) (e.split == Split::kTrain ? train : eval).insert(e.noise_category);
    EXPECT_FALSE(train.empty());
    EXPECT_FALSE(eval.empty());
    for (const auto &c : eval) EXPECT_EQ(train.count(c), 0u) << c;
  }
}

TEST(BuildNoisyCorpus, ParallelUtterancesShareCategory) {
  const ToyCorpus t = TinyPools(4, 10, 3, {"a", "b", "c", "d", "e", "f", "g", "h"});
  CorpusSpec spec;
  spec.eval_category_fraction = 0.5;
  const MixManifest m = Filter(PlanNoisyCorpus(t.speech, t.noise, spec, "x"), Split::kEval);
  ASSERT_FALSE(m.empty());
  std::map<std::string, std::set<std::string>> cats;
  for (const auto &e : m) cats[e.content_id].insert(e.noise_category);
  for (const auto &[content, c] : cats) EXPECT_EQ(c.size(), 1u) << content;
}

TEST(BuildNoisyCorpus, ErrorCases) {
  const ToyCorpus t = TinyPools(2, 4, 2, {"only"});
  CorpusSpec spec;
  EXPECT_THROW(PlanNoisyCorpus(t.speech, t.noise, spec, "x"), DataError);
  spec.disjoint_noise = false;
  EXPECT_NO_THROW(PlanNoisyCorpus(t.speech, t.noise, spec, "x"));
  EXPECT_THROW(PlanNoisyCorpus(SpeechPool{}, t.noise, spec, "x"), DataError);
  EXPECT_THROW(PlanNoisyCorpus(t.speech, NoisePool{}, spec, "x"), DataError);
  spec.train_snr_grid.clear();
  EXPECT_THROW(PlanNoisyCorpus(t.speech, t.noise, spec, "x"), UsageError);
  CorpusSpec unknown;
  unknown.disjoint_noise = false;
  unknown.speakers = {"nobody"};
  EXPECT_THROW(PlanNoisyCorpus(t.speech, t.noise, unknown, "x"), DataError);
}

TEST(BuildParallelEvalSets, PairingsIdenticalAcrossLevels) {
  const ToyCorpus t = SmallToy();
  CorpusSpec spec;
  const std::vector<double> levels = {-5, 0, 5, 10, 15, 20, 25, 30};
  const auto root = testing::ScratchDir("parallel");
  const auto sets = BuildParallelEvalSets(t.speech, t.noise, spec, levels, root);
  ASSERT_EQ(sets.size(), 8u);
  for (size_t l = 0; l < sets.size(); ++l) {
    const MixManifest back = ReadManifest(root / LevelDirName(levels[l]) / "manifest.jsonl");
    ASSERT_EQ(back.size(), sets[0].size());
    for (size_t i = 0; i < back.size(); ++i) {
      MixManifestEntry a = back[i], b = sets[0][i];
      EXPECT_EQ(a.snr_db, levels[l]);
      a.snr_db = b.snr_db;
      a.mixture_path = b.mixture_path;
      a.scaled_noise_path = b.scaled_noise_path;
      a.gain = b.gain;
      a.clipped_samples = b.clipped_samples;
      EXPECT_EQ(a, b);
    }
  }
}

TEST(BuildParallelEvalSets, TenDecibelsIsTenfoldNoisePower) {
  const ToyCorpus t = SmallToy();
  CorpusSpec spec;
  const auto root = testing::ScratchDir("parallel_ratio");
  const auto sets = BuildParallelEvalSets(t.speech, t.noise, spec, {0, 10}, root);
  for (size_t i = 0; i < sets[0].size(); ++i) {
    const auto n0 = RenderEntry(sets[0][i], t.speech, t.noise).scaled_noise;
    const auto n10 = RenderEntry(sets[1][i], t.speech, t.noise).scaled_noise;
    EXPECT_NEAR(signal::MeanPower(n0.samples()) / signal::MeanPower(n10.samples()), 10.0, 1e-6);
    EXPECT_NEAR(signal::MeasureSnr(n0, n10), 10.0, 1e-6);
  }
}

TEST(BuildParallelEvalSets, SingleLevelMatchesCorpusEvalSplit) {
  const ToyCorpus t = SmallToy();
  CorpusSpec spec;
  spec.eval_snr_grid = {5.0};
  const auto root = testing::ScratchDir("parallel_single");
  const auto sets = BuildParallelEvalSets(t.speech, t.noise, spec, {5.0}, root / "parallel");
  ASSERT_EQ(sets.size(), 1u);
  const MixManifest eval = Filter(BuildNoisyCorpus(t.speech, t.noise, spec, root), Split::kEval);
  ASSERT_EQ(eval.size(), sets[0].size());
  for (size_t i = 0; i < eval.size(); ++i) {
    MixManifestEntry a = sets[0][i];
    a.mixture_path = eval[i].mixture_path;
    a.scaled_noise_path = eval[i].scaled_noise_path;
    EXPECT_EQ(a, eval[i]);
    EXPECT_EQ(Slurp(sets[0][i].mixture_path), Slurp(eval[i].mixture_path));
  }
}

TEST(Manifest, RoundTripAndStableFormat) {
  const ToyCorpus t = SmallToy();
  const MixManifest m = PlanNoisyCorpus(t.speech, t.noise, CorpusSpec{}, "/tmp/r");
  const std::string text = SerializeManifest(m);
  EXPECT_EQ(ParseManifest(text, "mem"), m);
  EXPECT_EQ(SerializeManifest(ParseManifest(text, "mem")), text);
  EXPECT_NE(text.find("\"snr_db\""), std::string::npos);
  MixManifest dup = m;
  dup.push_back(m[0]);
  EXPECT_THROW(SerializeManifest(dup), DataError);
  EXPECT_THROW(ParseManifest("{\"utterance_id\": 3}\n", "mem"), DataError);
  EXPECT_THROW(ParseSplit("valid"), DataError);
}

TEST(Manifest, PathsStoredRelativeToManifest) {
  ToyCorpus t = SmallToy();
  const auto root = testing::ScratchDir("relative");
  WritePools(root / "pool", &t.speech, &t.noise);
  BuildNoisyCorpus(t.speech, t.noise, CorpusSpec{}, root / "corpus");
  const std::string text = Slurp(root / "corpus" / "manifest.jsonl");
  EXPECT_EQ(text.find(root.string()), std::string::npos);
  EXPECT_NE(text.find("../pool/speech/"), std::string::npos);
}

TEST(ScanDirectories, ReadsExternalLayout) {
  const auto root = testing::ScratchDir("external");
  std::mt19937_64 rng(3);
  for (const char *spk : {"alice", "bob"}) {
    std::filesystem::create_directories(root / "speech" / spk);
    for (const char *utt : {"30001", "30002"}) {
      signal::WriteWav((root / "speech" / spk / (std::string(utt) + ".wav")).string(),
                       testing::RandomWave(rng, 500));
    }
  }
  std::filesystem::create_directories(root / "noise" / "babble");
  signal::WriteWav((root / "noise" / "babble" / "x.wav").string(), testing::RandomWave(rng, 500));
  const SpeechPool s = ScanSpeechDirectory(root / "speech");
  ASSERT_EQ(s.clips.size(), 4u);
  EXPECT_EQ(s.clips[0].utterance_id, "alice_30001");
  EXPECT_EQ(s.clips[2].content_id, "30001");
  EXPECT_EQ(s.Speakers(), (std::vector<std::string>{"alice", "bob"}));
  const NoisePool n = ScanNoiseDirectory(root / "noise");
  ASSERT_EQ(n.clips.size(), 1u);
  EXPECT_EQ(n.clips[0].category, "babble");
  EXPECT_THROW(ScanSpeechDirectory(root / "missing"), DataError);
}

}  // namespace
}  // namespace n2n::data
