// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "n2n/data/pool.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

#include <json.hpp>

#include "n2n/common/error.h"
#include "n2n/common/random.h"

namespace n2n::data {
namespace {

using signal::Waveform;
constexpr double kPi = std::numbers::pi;

struct Vowel {
  double f1, f2, f3;
};
constexpr Vowel kVowels[] = {{730, 1090, 2440}, {270, 2290, 3010}, {300, 870, 2240},
                             {530, 1840, 2480}, {570, 840, 2410},  {660, 1720, 2410}};

enum class Segment { kSilence, kVowel, kFricative };

struct Phone {
  Segment kind;
  size_t length;
  int vowel = 0;
};

// Two-pole resonator with unity gain at its centre frequency.
class Resonator {
 public:
  double Step(double x, double freq, double bandwidth, int rate) {
    const double r = std::exp(-kPi * bandwidth / rate);
    const double theta = 2.0 * kPi * freq / rate;
    const double a1 = 2.0 * r * std::cos(theta), a2 = -r * r;
    const double gain = (1.0 - r) * std::sqrt(1.0 - 2.0 * r * std::cos(2.0 * theta) + r * r);
    const double y = gain * x + a1 * y1_ + a2 * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double y1_ = 0.0, y2_ = 0.0;
};

std::vector<Phone> PlanContent(std::mt19937_64 &rng, size_t total, int rate) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto ms = [rate](double v) { return static_cast<size_t>(v * rate / 1000.0); };
  std::vector<Phone> phones;
  const size_t lead = ms(150), tail = ms(150);
  phones.push_back({Segment::kSilence, lead});
  size_t used = lead;
  while (used + tail < total) {
    const double p = phones.size() == 1 ? 0.0 : u(rng);
    Phone ph;
    if (p < 0.6) {
      ph = {Segment::kVowel, ms(80 + 140 * u(rng)), static_cast<int>(u(rng) * 6) % 6};
    } else if (p < 0.8) {
      ph = {Segment::kFricative, ms(40 + 60 * u(rng))};
    } else {
      ph = {Segment::kSilence, ms(60 + 100 * u(rng))};
    }
    ph.length = std::min(ph.length, total - tail - used);
    if (ph.length == 0) break;
    phones.push_back(ph);
    used += ph.length;
  }
  phones.push_back({Segment::kSilence, total - used});
  return phones;
}

Waveform Normalize(std::vector<double> x, double target, bool peak, int rate) {
  double scale = 0.0;
  if (peak) {
    for (double v : x) scale = std::max(scale, std::abs(v));
  } else {
    scale = std::sqrt(signal::MeanPower(x));
  }
  if (scale > 0.0) {
    for (double &v : x) v = std::clamp(v * target / scale, -0.99, 0.99);
  }
  return QuantizeToPcm16(Waveform(std::move(x), rate));
}

Waveform SynthesizeSpeech(const std::vector<Phone> &phones, double contour_phase,
                          int speaker, std::mt19937_64 &rng, int rate) {
  size_t total = 0;
  for (const Phone &p : phones) total += p.length;
  const double f0_base = ToySpeakerF0(speaker);
  const double formant_scale = 1.0 + 0.07 * (speaker % 4);
  std::normal_distribution<double> white(0.0, 1.0);

  // Per-sample targets, smoothed below.
  std::vector<double> f1(total), f2(total), f3(total), voice(total), fric(total);
  size_t at = 0;
  Vowel prev = kVowels[0];
  for (const Phone &p : phones) {
    const Vowel v = p.kind == Segment::kVowel ? kVowels[p.vowel] : prev;
    for (size_t i = 0; i < p.length; ++i, ++at) {
      f1[at] = v.f1 * formant_scale;
      f2[at] = v.f2 * formant_scale;
      f3[at] = std::min(v.f3 * formant_scale, 3700.0);
      voice[at] = p.kind == Segment::kVowel ? 1.0 : 0.0;
      fric[at] = p.kind == Segment::kFricative ? 1.0 : 0.0;
    }
    prev = v;
  }
  const double a_formant = std::exp(-1.0 / (0.015 * rate));
  const double a_env = std::exp(-1.0 / (0.006 * rate));
  double sf1 = f1[0], sf2 = f2[0], sf3 = f3[0], sv = 0.0, sn = 0.0, phase = 0.0;
  Resonator r1, r2, r3, rn;
  std::vector<double> out(total);
  const double seconds = static_cast<double>(total) / rate;
  for (size_t t = 0; t < total; ++t) {
    sf1 = a_formant * sf1 + (1 - a_formant) * f1[t];
    sf2 = a_formant * sf2 + (1 - a_formant) * f2[t];
    sf3 = a_formant * sf3 + (1 - a_formant) * f3[t];
    sv = a_env * sv + (1 - a_env) * voice[t];
    sn = a_env * sn + (1 - a_env) * fric[t];
    const double time = static_cast<double>(t) / rate;
    const double f0 = f0_base * (1.0 + 0.06 * std::sin(2.0 * kPi * 0.9 * time + contour_phase)) *
                      (1.0 - 0.08 * time / seconds);
    phase += 2.0 * kPi * f0 / rate;
    if (phase > 2.0 * kPi) phase -= 2.0 * kPi;
    double source = 0.0;
    const int harmonics = static_cast<int>(3800.0 / f0);
    for (int k = 1; k <= harmonics; ++k) source += std::sin(k * phase) / k;
    double y = r1.Step(sv * source, sf1, 90.0, rate);
    y = r2.Step(y, sf2, 110.0, rate) + 0.3 * y;
    y = r3.Step(y, sf3, 160.0, rate) + 0.5 * y;
    const double hiss = rn.Step(white(rng), 2600.0 * formant_scale, 900.0, rate);
    out[t] = y + 0.12 * sn * hiss;
  }
  return Normalize(std::move(out), 0.6, true, rate);
}

Waveform SynthesizeNoise(const std::string &category, size_t n, std::mt19937_64 &rng,
                         int rate) {
  std::normal_distribution<double> white(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(n, 0.0);
  if (category == "white") {
    for (double &v : x) v = white(rng);
  } else if (category == "pink") {
    double b0 = 0, b1 = 0, b2 = 0;
    for (double &v : x) {
      const double w = white(rng);
      b0 = 0.99765 * b0 + w * 0.0990460;
      b1 = 0.96300 * b1 + w * 0.2965164;
      b2 = 0.57000 * b2 + w * 1.0526913;
      v = b0 + b1 + b2 + w * 0.1848;
    }
  } else if (category == "brown") {
    double acc = 0.0;
    for (double &v : x) v = acc = 0.995 * acc + white(rng);
  } else if (category == "hum") {
    const double f = 50.0 + 10.0 * std::floor(u(rng) * 3);
    for (size_t t = 0; t < n; ++t) {
      double s = 0.0;
      for (int k = 1; k <= 6; ++k) s += std::sin(2.0 * kPi * k * f * t / rate) / k;
      x[t] = s + 0.05 * white(rng);
    }
  } else if (category == "am_tone") {
    const double f = 300.0 + 1200.0 * u(rng), fm = 2.0 + 4.0 * u(rng);
    for (size_t t = 0; t < n; ++t) {
      const double time = static_cast<double>(t) / rate;
      x[t] = (1.0 + 0.8 * std::sin(2.0 * kPi * fm * time)) * std::sin(2.0 * kPi * f * time);
    }
  } else if (category == "chirp") {
    const double period = 0.5 + 0.5 * u(rng);
    double phase = 0.0;
    for (size_t t = 0; t < n; ++t) {
      const double frac = std::fmod(static_cast<double>(t) / rate, period) / period;
      phase += 2.0 * kPi * (200.0 + 2800.0 * frac) / rate;
      x[t] = std::sin(phase);
    }
  } else if (category == "bandpass") {
    const double fc = 500.0 + 2500.0 * u(rng);
    Resonator r;
    for (double &v : x) v = r.Step(white(rng), fc, 300.0, rate);
  } else if (category == "crackle") {
    double env = 0.0;
    const double rate_per_sample = 30.0 / rate;
    for (double &v : x) {
      if (u(rng) < rate_per_sample) env += 0.5 + u(rng);
      env *= 0.995;
      v = env * white(rng) + 0.02 * white(rng);
    }
  } else {
    throw UsageError("unknown toy noise category: " + category);
  }
  return Normalize(std::move(x), 0.1, false, rate);
}

std::string PoolIndexLine(const std::filesystem::path &dir, const std::string &path) {
  return std::filesystem::path(path).lexically_relative(dir).generic_string();
}

std::vector<nlohmann::json> ReadJsonLines(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<nlohmann::json> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception &e) {
      throw DataError(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

std::vector<std::filesystem::path> SortedEntries(const std::filesystem::path &dir,
                                                 bool directories) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError("not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> out;
  for (const auto &e : std::filesystem::directory_iterator(dir)) {
    if (directories ? e.is_directory()
                    : (e.is_regular_file() && e.path().extension() == ".wav")) {
      out.push_back(e.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

const SpeechClip &SpeechPool::Find(const std::string &utterance_id) const {
  auto it = std::lower_bound(clips.begin(), clips.end(), utterance_id,
                             [](const SpeechClip &c, const std::string &id) {
                               return c.utterance_id < id;
                             });
  if (it == clips.end() || it->utterance_id != utterance_id) {
    throw DataError("unknown utterance: " + utterance_id);
  }
  return *it;
}

std::vector<std::string> SpeechPool::Speakers() const {
  std::set<std::string> s;
  for (const auto &c : clips) s.insert(c.speaker_id);
  return {s.begin(), s.end()};
}

const NoiseClip &NoisePool::Find(const std::string &noise_id) const {
  auto it = std::lower_bound(
      clips.begin(), clips.end(), noise_id,
      [](const NoiseClip &c, const std::string &id) { return c.noise_id < id; });
  if (it == clips.end() || it->noise_id != noise_id) {
    throw DataError("unknown noise clip: " + noise_id);
  }
  return *it;
}

std::vector<std::string> NoisePool::Categories() const {
  std::set<std::string> s;
  for (const auto &c : clips) s.insert(c.category);
  return {s.begin(), s.end()};
}

double ToySpeakerF0(int index) { return 90.0 + 40.0 * (index % 8) + 5.0 * (index / 8); }

const std::vector<std::string> &ToyNoiseCategories() {
  static const std::vector<std::string> kCategories = {
      "white", "pink", "brown", "hum", "am_tone", "chirp", "bandpass", "crackle"};
  return kCategories;
}

signal::Waveform QuantizeToPcm16(const signal::Waveform &wave) {
  std::vector<double> q(wave.size());
  for (size_t i = 0; i < q.size(); ++i) {
    q[i] = static_cast<double>(std::lround(std::clamp(wave[i], -1.0, 1.0) * 32767.0)) / 32767.0;
  }
  return Waveform(std::move(q), wave.sample_rate());
}

ToyCorpus GenerateToyCorpus(const ToyCorpusConfig &config) {
  if (config.n_speakers < 1 || config.n_utterances < 1 || config.n_noise_clips < 1) {
    throw UsageError("toy corpus counts must be >= 1");
  }
  if (!(config.min_seconds > 0.3) || config.max_seconds < config.min_seconds) {
    throw UsageError("toy corpus durations must satisfy 0.3 < min <= max");
  }
  const int rate = config.sample_rate;
  auto draw_length = [&](std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(config.min_seconds, config.max_seconds);
    return static_cast<size_t>(u(rng) * rate);
  };
  ToyCorpus out;
  const int n_contents = (config.n_utterances + config.n_speakers - 1) / config.n_speakers;
  std::vector<std::vector<Phone>> contents(n_contents);
  std::vector<double> phases(n_contents);
  for (int c = 0; c < n_contents; ++c) {
    std::mt19937_64 rng(DeriveSeed(config.seed, "toy/content/" + std::to_string(c)));
    const size_t length = draw_length(rng);
    phases[c] = std::uniform_real_distribution<double>(0.0, 2.0 * kPi)(rng);
    contents[c] = PlanContent(rng, length, rate);
  }
  char buf[64];
  for (int i = 0; i < config.n_utterances; ++i) {
    const int spk = i % config.n_speakers, content = i / config.n_speakers;
    SpeechClip clip;
    std::snprintf(buf, sizeof(buf), "spk%02d", spk);
    clip.speaker_id = buf;
    std::snprintf(buf, sizeof(buf), "c%03d", content);
    clip.content_id = buf;
    clip.utterance_id = clip.speaker_id + "_" + clip.content_id;
    std::mt19937_64 rng(DeriveSeed(config.seed, "toy/utterance/" + clip.utterance_id));
    clip.wave = SynthesizeSpeech(contents[content], phases[content], spk, rng, rate);
    out.speech.clips.push_back(std::move(clip));
  }
  const auto &categories = ToyNoiseCategories();
  for (int i = 0; i < config.n_noise_clips; ++i) {
    NoiseClip clip;
    clip.category = categories[i % categories.size()];
    std::snprintf(buf, sizeof(buf), "noise%03d", i);
    clip.noise_id = std::string(buf) + "_" + clip.category;
    std::mt19937_64 rng(DeriveSeed(config.seed, "toy/noise/" + clip.noise_id));
    clip.wave = SynthesizeNoise(clip.category, draw_length(rng), rng, rate);
    out.noise.clips.push_back(std::move(clip));
  }
  auto by_speech = [](const SpeechClip &a, const SpeechClip &b) {
    return a.utterance_id < b.utterance_id;
  };
  auto by_noise = [](const NoiseClip &a, const NoiseClip &b) { return a.noise_id < b.noise_id; };
  std::sort(out.speech.clips.begin(), out.speech.clips.end(), by_speech);
  std::sort(out.noise.clips.begin(), out.noise.clips.end(), by_noise);
  return out;
}

void WritePools(const std::filesystem::path &dir, SpeechPool *speech, NoisePool *noise) {
  std::filesystem::create_directories(dir / "speech");
  std::filesystem::create_directories(dir / "noise");
  std::string index;
  for (SpeechClip &c : speech->clips) {
    c.path = (dir / "speech" / (c.utterance_id + ".wav")).string();
    signal::WriteWav(c.path, c.wave);
    nlohmann::json j = {{"utterance_id", c.utterance_id},
                        {"speaker_id", c.speaker_id},
                        {"content_id", c.content_id},
                        {"path", PoolIndexLine(dir, c.path)}};
    index += j.dump() + "\n";
  }
  std::ofstream(dir / "speech.jsonl", std::ios::binary | std::ios::trunc) << index;
  index.clear();
  for (NoiseClip &c : noise->clips) {
    c.path = (dir / "noise" / (c.noise_id + ".wav")).string();
    signal::WriteWav(c.path, c.wave);
    nlohmann::json j = {{"noise_id", c.noise_id},
                        {"category", c.category},
                        {"path", PoolIndexLine(dir, c.path)}};
    index += j.dump() + "\n";
  }
  std::ofstream(dir / "noise.jsonl", std::ios::binary | std::ios::trunc) << index;
}

SpeechPool ReadSpeechPool(const std::filesystem::path &dir) {
  SpeechPool pool;
  for (const auto &j : ReadJsonLines(dir / "speech.jsonl")) {
    SpeechClip c;
    try {
      c.utterance_id = j.at("utterance_id").get<std::string>();
      c.speaker_id = j.at("speaker_id").get<std::string>();
      c.content_id = j.at("content_id").get<std::string>();
      c.path = (dir / j.at("path").get<std::string>()).lexically_normal().string();
    } catch (const nlohmann::json::exception &e) {
      throw DataError((dir / "speech.jsonl").string() + ": " + e.what());
    }
    c.wave = signal::ReadWav(c.path);
    pool.clips.push_back(std::move(c));
  }
  if (pool.clips.empty()) throw DataError("empty speech pool in " + dir.string());
  std::sort(pool.clips.begin(), pool.clips.end(),
            [](const auto &a, const auto &b) { return a.utterance_id < b.utterance_id; });
  return pool;
}

NoisePool ReadNoisePool(const std::filesystem::path &dir) {
  NoisePool pool;
  for (const auto &j : ReadJsonLines(dir / "noise.jsonl")) {
    NoiseClip c;
    try {
      c.noise_id = j.at("noise_id").get<std::string>();
      c.category = j.at("category").get<std::string>();
      c.path = (dir / j.at("path").get<std::string>()).lexically_normal().string();
    } catch (const nlohmann::json::exception &e) {
      throw DataError((dir / "noise.jsonl").string() + ": " + e.what());
    }
    c.wave = signal::ReadWav(c.path);
    pool.clips.push_back(std::move(c));
  }
  if (pool.clips.empty()) throw DataError("empty noise pool in " + dir.string());
  std::sort(pool.clips.begin(), pool.clips.end(),
            [](const auto &a, const auto &b) { return a.noise_id < b.noise_id; });
  return pool;
}

SpeechPool ScanSpeechDirectory(const std::filesystem::path &dir) {
  SpeechPool pool;
  for (const auto &spk : SortedEntries(dir, true)) {
    for (const auto &file : SortedEntries(spk, false)) {
      SpeechClip c;
      c.speaker_id = spk.filename().string();
      c.content_id = file.stem().string();
      c.utterance_id = c.speaker_id + "_" + c.content_id;
      c.path = file.string();
      c.wave = signal::ReadWav(c.path);
      pool.clips.push_back(std::move(c));
    }
  }
  if (pool.clips.empty()) throw DataError("no speech WAVs under " + dir.string());
  std::sort(pool.clips.begin(), pool.clips.end(),
            [](const auto &a, const auto &b) { return a.utterance_id < b.utterance_id; });
  return pool;
}

NoisePool ScanNoiseDirectory(const std::filesystem::path &dir) {
  NoisePool pool;
  for (const auto &cat : SortedEntries(dir, true)) {
    for (const auto &file : SortedEntries(cat, false)) {
      NoiseClip c;
      c.category = cat.filename().string();
      c.noise_id = c.category + "_" + file.stem().string();
      c.path = file.string();
      c.wave = signal::ReadWav(c.path);
      pool.clips.push_back(std::move(c));
    }
  }
  if (pool.clips.empty()) throw DataError("no noise WAVs under " + dir.string());
  std::sort(pool.clips.begin(), pool.clips.end(),
            [](const auto &a, const auto &b) { return a.noise_id < b.noise_id; });
  return pool;
}

}  // namespace n2n::data
