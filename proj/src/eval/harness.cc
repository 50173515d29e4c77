// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "n2n/eval/harness.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "n2n/common/config.h"
#include "n2n/common/error.h"
#include "n2n/common/log.h"
#include "n2n/common/random.h"
#include "n2n/signal/metrics.h"
#include "n2n/signal/spectral.h"
#include "n2n/vc/convert.h"

namespace n2n::eval {
namespace {

using json = nlohmann::json;

std::string Fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Pad(const std::string &s, size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string PadRight(const std::string &s, size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

struct Target {
  std::string speaker;
  const data::SpeechClip *reference;
};

std::vector<Target> TargetsFor(const data::MixManifestEntry &e, const data::SpeechPool &speech) {
  std::vector<Target> out;
  for (const auto &clip : speech.clips) {
    if (clip.content_id == e.content_id && clip.speaker_id != e.speaker_id) {
      out.push_back({clip.speaker_id, &clip});
    }
  }
  return out;
}

void CheckSpeakers(const Method &m, const std::vector<data::MixManifest> &levels,
                   const data::SpeechPool &speech) {
  const auto &known = m.model->speakers();
  auto check = [&](const std::string &id) {
    if (std::find(known.begin(), known.end(), id) == known.end()) {
      throw DataError("speaker " + id + " of the eval set is unknown to the " + m.label +
                      " model");
    }
  };
  for (const auto &e : levels.front()) {
    for (const auto &t : TargetsFor(e, speech)) check(t.speaker);
  }
}

double ScoreMcd(const signal::Waveform &converted, const signal::CepstralSequence &reference,
                const signal::SignalConfig &config) {
  return signal::Mcd(reference, signal::MelCepstra(converted, config));
}

std::string ConfigHash(const denoiser::DenoiserModel &den, const std::vector<Method> &methods,
                       const EvalConfig &config) {
  std::string text = "eval.seed=" + std::to_string(config.seed) + "\n";
  text += den.ConfigSnapshot().Serialize();
  for (const auto &m : methods) {
    text += "method." + m.label + "=" + MethodKindName(m.kind) + "\n";
    text += m.model->ConfigSnapshot().Serialize();
  }
  return HashHex(Fnv1a64(text));
}

}  // namespace

MethodKind ParseMethodKind(const std::string &name) {
  if (name == "clean_vc") return MethodKind::kCleanVc;
  if (name == "baseline") return MethodKind::kBaseline;
  if (name == "proposed") return MethodKind::kProposed;
  throw UsageError("unknown method \"" + name + "\" (expected clean_vc, baseline or proposed)");
}

std::string MethodKindName(MethodKind kind) {
  switch (kind) {
    case MethodKind::kCleanVc:
      return "clean_vc";
    case MethodKind::kBaseline:
      return "baseline";
    case MethodKind::kProposed:
      return "proposed";
  }
  return "unknown";
}

const McdCell &EvalReport::Cell(const std::string &method, double snr_db) const {
  for (const auto &c : cells) {
    if (c.method == method && c.snr_db == snr_db) return c;
  }
  throw UsageError("no report cell for " + method + " at " + FormatExact(snr_db) + " dB");
}

std::vector<double> EvalReport::Levels() const {
  std::set<double> s;
  for (const auto &c : cells) s.insert(c.snr_db);
  return {s.begin(), s.end()};
}

std::vector<std::string> EvalReport::Methods() const {
  std::vector<std::string> out;
  for (const auto &c : cells) {
    if (std::find(out.begin(), out.end(), c.method) == out.end()) out.push_back(c.method);
  }
  return out;
}

std::pair<double, double> MeanStd(const std::vector<double> &values) {
  if (values.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(values.size()))};
}

void CheckParallelSets(const std::vector<data::MixManifest> &levels) {
  if (levels.empty()) throw UsageError("no SNR levels to evaluate");
  const auto &first = levels.front();
  if (first.empty()) throw DataError("empty eval set");
  std::set<double> seen;
  for (const auto &m : levels) {
    if (m.size() != first.size()) throw DataError("parallel eval sets differ in size");
    for (size_t i = 0; i < m.size(); ++i) {
      if (m[i].utterance_id != first[i].utterance_id ||
          m[i].noise_category != first[i].noise_category ||
          m[i].noise_id != first[i].noise_id) {
        throw DataError("parallel eval sets differ at " + m[i].utterance_id);
      }
      if (m[i].snr_db != m.front().snr_db) {
        throw DataError("eval set mixes SNR levels at " + m[i].utterance_id);
      }
    }
    if (!seen.insert(m.front().snr_db).second) {
      throw DataError("duplicate SNR level " + FormatExact(m.front().snr_db));
    }
  }
}

std::string CorpusHash(const std::vector<data::MixManifest> &levels) {
  std::string text;
  for (const auto &m : levels) {
    for (const auto &e : m) {
      text += e.utterance_id + "|" + e.speaker_id + "|" + e.content_id + "|" + e.noise_id + "|" +
              FormatExact(e.snr_db) + "|" + FormatExact(e.gain) + "|" +
              HashFileHex(e.mixture_path) + "|" + HashFileHex(e.speech_path) + "\n";
    }
  }
  return HashHex(Fnv1a64(text));
}

EvalReport EvalMcdVsSnr(const denoiser::DenoiserModel &denoiser,
                        const std::vector<Method> &methods,
                        const std::vector<data::MixManifest> &levels,
                        const data::SpeechPool &speech, const EvalConfig &config) {
  if (methods.empty()) throw UsageError("no methods to evaluate");
  CheckParallelSets(levels);
  std::set<std::string> labels;
  for (const auto &m : methods) {
    if (m.model == nullptr) throw UsageError("method " + m.label + " has no model");
    if (!labels.insert(m.label).second) throw UsageError("duplicate method label " + m.label);
    const vc::Variant want =
        m.kind == MethodKind::kProposed ? vc::Variant::kNoiseConditioned : vc::Variant::kBaseline;
    if (m.model->variant() != want) {
      throw UsageError("method " + m.label + " needs a " + vc::VariantName(want) + " model");
    }
    CheckSpeakers(m, levels, speech);
  }
  const signal::SignalConfig &sig = methods.front().model->signal_config();

  EvalReport report;
  report.config_hash = ConfigHash(denoiser, methods, config);
  report.corpus_hash = CorpusHash(levels);
  report.metadata["reference"] = "clean utterance of the target speaker with the same content";
  report.metadata["alignment"] = "dtw";
  report.metadata["cepstra"] = "c1..c" + std::to_string(sig.cepstral_order);
  report.metadata["seed"] = std::to_string(config.seed);

  // Separation per level, shared by every method.
  std::vector<std::vector<denoiser::SeparationResult>> separated(levels.size());
  for (size_t l = 0; l < levels.size(); ++l) {
    std::vector<DenoiserScore> scores;
    for (const auto &e : levels[l]) {
      const signal::Waveform y = signal::ReadWav(e.mixture_path, sig.sample_rate);
      separated[l].push_back(denoiser.Separate(y));
      const signal::Waveform &s = speech.Find(e.utterance_id).wave;
      signal::CheckSameLength(s, y, "eval mixture");
      const auto &d = separated[l].back().d;
      scores.push_back({e.utterance_id, e.snr_db, signal::SiSnr(y.samples(), s.samples()),
                        signal::SiSnr(d.samples(), s.samples()),
                        signal::SdSdr(y.samples(), s.samples()),
                        signal::SdSdr(d.samples(), s.samples())});
    }
    report.denoiser.push_back(SummarizeDenoiser(scores));
  }

  std::map<std::string, signal::CepstralSequence> reference_cepstra;
  for (const auto &m : methods) {
    // Clean-VC output does not depend on the level.
    std::map<std::string, double> clean_cache;
    for (size_t l = 0; l < levels.size(); ++l) {
      std::vector<double> values;
      for (size_t i = 0; i < levels[l].size(); ++i) {
        const auto &e = levels[l][i];
        for (const auto &t : TargetsFor(e, speech)) {
          const std::string key = e.utterance_id + "->" + t.speaker;
          const uint64_t seed = DeriveSeed(config.seed, "eval/" + key);
          auto ref = reference_cepstra.find(t.reference->utterance_id);
          if (ref == reference_cepstra.end()) {
            ref = reference_cepstra
                      .emplace(t.reference->utterance_id,
                               signal::MelCepstra(t.reference->wave, sig))
                      .first;
          }
          double mcd = 0.0;
          if (m.kind == MethodKind::kCleanVc) {
            auto hit = clean_cache.find(key);
            if (hit == clean_cache.end()) {
              const signal::Waveform &s = speech.Find(e.utterance_id).wave;
              const auto out =
                  vc::ConvertBaseline(*m.model, denoiser::Separate(s, s), t.speaker, false, seed);
              hit = clean_cache.emplace(key, ScoreMcd(out, ref->second, sig)).first;
            }
            mcd = hit->second;
          } else if (m.kind == MethodKind::kBaseline) {
            const auto out =
                vc::ConvertBaseline(*m.model, separated[l][i], t.speaker, false, seed);
            mcd = ScoreMcd(out, ref->second, sig);
          } else {
            const auto out = vc::ConvertClean(*m.model, separated[l][i], t.speaker, seed);
            mcd = ScoreMcd(out, ref->second, sig);
          }
          values.push_back(mcd);
          report.utterances.push_back({m.label, e.snr_db, e.utterance_id, t.speaker, mcd});
        }
      }
      if (values.empty()) {
        throw DataError("no target-speaker references for the eval set");
      }
      const auto [mean, sd] = MeanStd(values);
      report.cells.push_back(
          {m.label, levels[l].front().snr_db, static_cast<int>(values.size()), mean, sd});
      N2N_LOG_INFO << "eval " << m.label << " snr " << levels[l].front().snr_db << " mcd "
                   << mean;
    }
  }
  std::stable_sort(report.cells.begin(), report.cells.end(),
                   [&](const McdCell &a, const McdCell &b) {
                     if (a.method != b.method) {
                       auto pos = [&](const std::string &label) {
                         for (size_t k = 0; k < methods.size(); ++k) {
                           if (methods[k].label == label) return k;
                         }
                         return methods.size();
                       };
                       return pos(a.method) < pos(b.method);
                     }
                     return a.snr_db < b.snr_db;
                   });
  std::stable_sort(report.denoiser.begin(), report.denoiser.end(),
                   [](const DenoiserCell &a, const DenoiserCell &b) { return a.snr_db < b.snr_db; });
  return report;
}

std::vector<DenoiserScore> EvalDenoiser(const denoiser::DenoiserModel &model,
                                        const data::MixManifest &manifest) {
  if (manifest.empty()) throw DataError("empty eval manifest");
  const int rate = model.signal_config().sample_rate;
  std::vector<DenoiserScore> out;
  for (const auto &e : manifest) {
    if (e.speech_path.empty() || !std::filesystem::exists(e.speech_path)) {
      throw DataError("missing clean reference for " + e.utterance_id);
    }
    const signal::Waveform s = signal::ReadWav(e.speech_path, rate);
    const signal::Waveform y = signal::ReadWav(e.mixture_path, rate);
    signal::CheckSameLength(s, y, "eval mixture");
    const signal::Waveform d = model.Separate(y).d;
    out.push_back({e.utterance_id, e.snr_db, signal::SiSnr(y.samples(), s.samples()),
                   signal::SiSnr(d.samples(), s.samples()),
                   signal::SdSdr(y.samples(), s.samples()),
                   signal::SdSdr(d.samples(), s.samples())});
  }
  return out;
}

DenoiserCell SummarizeDenoiser(const std::vector<DenoiserScore> &scores) {
  DenoiserCell c;
  if (scores.empty()) return c;
  c.snr_db = scores.front().snr_db;
  c.count = static_cast<int>(scores.size());
  for (const auto &s : scores) {
    c.input_si_snr += s.input_si_snr;
    c.output_si_snr += s.output_si_snr;
    c.input_sd_sdr += s.input_sd_sdr;
    c.output_sd_sdr += s.output_sd_sdr;
  }
  const double n = static_cast<double>(scores.size());
  c.input_si_snr /= n;
  c.output_si_snr /= n;
  c.input_sd_sdr /= n;
  c.output_sd_sdr /= n;
  return c;
}

std::string FormatReportText(const EvalReport &report) {
  std::ostringstream os;
  os << "MCD vs input SNR\n";
  os << "config_hash " << report.config_hash << "\n";
  os << "corpus_hash " << report.corpus_hash << "\n";
  for (const auto &[k, v] : report.metadata) os << k << ": " << v << "\n";
  os << "\n"
     << PadRight("method", 16) << Pad("snr_db", 9) << Pad("count", 7) << Pad("mcd_db", 9)
     << Pad("std_db", 9) << "\n";
  for (const auto &c : report.cells) {
    os << PadRight(c.method, 16) << Pad(Fixed2(c.snr_db), 9) << Pad(std::to_string(c.count), 7)
       << Pad(Fixed2(c.mean_db), 9) << Pad(Fixed2(c.std_db), 9) << "\n";
  }
  if (!report.denoiser.empty()) {
    os << "\nDenoiser\n"
       << Pad("snr_db", 9) << Pad("count", 7) << Pad("si_snr_in", 11) << Pad("si_snr_out", 11)
       << Pad("si_snr_imp", 11) << Pad("sd_sdr_in", 11) << Pad("sd_sdr_out", 11)
       << Pad("sd_sdr_imp", 11) << "\n";
    for (const auto &d : report.denoiser) {
      os << Pad(Fixed2(d.snr_db), 9) << Pad(std::to_string(d.count), 7)
         << Pad(Fixed2(d.input_si_snr), 11) << Pad(Fixed2(d.output_si_snr), 11)
         << Pad(Fixed2(d.si_snr_improvement()), 11) << Pad(Fixed2(d.input_sd_sdr), 11)
         << Pad(Fixed2(d.output_sd_sdr), 11) << Pad(Fixed2(d.sd_sdr_improvement()), 11) << "\n";
    }
  }
  return os.str();
}

std::string SerializeReport(const EvalReport &report) {
  std::ostringstream os;
  json meta = {{"type", "meta"},
               {"config_hash", report.config_hash},
               {"corpus_hash", report.corpus_hash},
               {"metadata", report.metadata}};
  os << meta.dump() << "\n";
  for (const auto &c : report.cells) {
    os << json{{"type", "cell"},       {"method", c.method},   {"snr_db", c.snr_db},
               {"count", c.count},     {"mean_db", c.mean_db}, {"std_db", c.std_db}}
              .dump()
       << "\n";
  }
  for (const auto &u : report.utterances) {
    os << json{{"type", "utterance"},     {"method", u.method},
               {"snr_db", u.snr_db},      {"utterance_id", u.utterance_id},
               {"target", u.target_speaker}, {"mcd_db", u.mcd_db}}
              .dump()
       << "\n";
  }
  for (const auto &d : report.denoiser) {
    os << json{{"type", "denoiser"},
               {"snr_db", d.snr_db},
               {"count", d.count},
               {"input_si_snr", d.input_si_snr},
               {"output_si_snr", d.output_si_snr},
               {"input_sd_sdr", d.input_sd_sdr},
               {"output_sd_sdr", d.output_sd_sdr}}
              .dump()
       << "\n";
  }
  return os.str();
}

EvalReport ParseReport(const std::string &text) {
  EvalReport r;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      const std::string type = j.at("type");
      if (type == "meta") {
        r.config_hash = j.at("config_hash");
        r.corpus_hash = j.at("corpus_hash");
        r.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
      } else if (type == "cell") {
        r.cells.push_back({j.at("method"), j.at("snr_db"), j.at("count"), j.at("mean_db"),
                           j.at("std_db")});
      } else if (type == "utterance") {
        r.utterances.push_back({j.at("method"), j.at("snr_db"), j.at("utterance_id"),
                                j.at("target"), j.at("mcd_db")});
      } else if (type == "denoiser") {
        DenoiserCell d;
        d.snr_db = j.at("snr_db");
        d.count = j.at("count");
        d.input_si_snr = j.at("input_si_snr");
        d.output_si_snr = j.at("output_si_snr");
        d.input_sd_sdr = j.at("input_sd_sdr");
        d.output_sd_sdr = j.at("output_sd_sdr");
        r.denoiser.push_back(d);
      } else {
        throw DataError("unknown record type " + type);
      }
    } catch (const json::exception &ex) {
      throw DataError("report line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return r;
}

std::string FormatPlotData(const EvalReport &report) {
  std::string out = "method,snr_db,mean_mcd_db\n";
  for (const auto &c : report.cells) {
    out += c.method + "," + Fixed2(c.snr_db) + "," + Fixed2(c.mean_db) + "\n";
  }
  return out;
}

void EmitReport(const EvalReport &report, const std::filesystem::path &dir) {
  if (report.cells.empty()) throw UsageError("no cells");
  std::filesystem::create_directories(dir);
  auto write = [&](const char *name, const std::string &body) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + (dir / name).string());
    out << body;
  };
  write(kReportText, FormatReportText(report));
  write(kReportRecords, SerializeReport(report));
  write(kReportPlot, FormatPlotData(report));
}

EvalReport ReadReport(const std::filesystem::path &dir) {
  std::ifstream in(dir / kReportRecords, std::ios::binary);
  if (!in) throw DataError("cannot open " + (dir / kReportRecords).string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseReport(ss.str());
}

}  // namespace n2n::eval
