// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_EVAL_HARNESS_H_
#define N2N_EVAL_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "n2n/data/manifest.h"
#include "n2n/data/pool.h"
#include "n2n/denoiser/denoiser.h"
#include "n2n/vc/vqvae.h"

namespace n2n::eval {

enum class MethodKind {
  kCleanVc,   // baseline model on the clean source; SNR-independent
  kBaseline,  // baseline model on d, noise not superimposed
  kProposed,  // noise-conditioned model on d with the zero-sequence condition
};

MethodKind ParseMethodKind(const std::string &name);
// "clean_vc", "baseline" or "proposed".
std::string MethodKindName(MethodKind kind);

struct Method {
  std::string label;
  MethodKind kind = MethodKind::kProposed;
  const vc::VQVAEModel *model = nullptr;
};

// One converted utterance scored against its reference.
struct UtteranceScore {
  std::string method;
  double snr_db = 0.0;
  std::string utterance_id;
  std::string target_speaker;
  double mcd_db = 0.0;
  friend bool operator==(const UtteranceScore &, const UtteranceScore &) = default;
};

struct McdCell {
  std::string method;
  double snr_db = 0.0;
  int count = 0;
  double mean_db = 0.0;
  double std_db = 0.0;  // population deviation
  friend bool operator==(const McdCell &, const McdCell &) = default;
};

// Denoiser metrics of one SNR level, averaged over utterances.
struct DenoiserCell {
  double snr_db = 0.0;
  int count = 0;
  double input_si_snr = 0.0;
  double output_si_snr = 0.0;
  double input_sd_sdr = 0.0;
  double output_sd_sdr = 0.0;
  double si_snr_improvement() const { return output_si_snr - input_si_snr; }
  double sd_sdr_improvement() const { return output_sd_sdr - input_sd_sdr; }
  friend bool operator==(const DenoiserCell &, const DenoiserCell &) = default;
};

struct EvalReport {
  // Cells ordered by method (input order) then ascending SNR.
  std::vector<McdCell> cells;
  std::vector<UtteranceScore> utterances;
  std::vector<DenoiserCell> denoiser;
  std::string config_hash;
  std::string corpus_hash;
  // Free-form run metadata, e.g. the reference pairing.
  std::map<std::string, std::string> metadata;
  friend bool operator==(const EvalReport &, const EvalReport &) = default;

  // Throws UsageError when absent.
  const McdCell &Cell(const std::string &method, double snr_db) const;
  std::vector<double> Levels() const;
  std::vector<std::string> Methods() const;  // first-appearance order
};

struct EvalConfig {
  uint64_t seed = 1;
};

// Identical utterance ids and noise categories at every level, or DataError.
void CheckParallelSets(const std::vector<data::MixManifest> &levels);

// Content hash of the parallel sets: pairings, gains and rendered audio.
std::string CorpusHash(const std::vector<data::MixManifest> &levels);

// MCD of every method at every level. Each eval utterance is converted to
// every other speaker that has a clean utterance of the same content in
// `speech`, and scored against that utterance. Sampling seeds depend on the
// utterance and target only, so identical inputs give identical outputs.
EvalReport EvalMcdVsSnr(const denoiser::DenoiserModel &denoiser,
                        const std::vector<Method> &methods,
                        const std::vector<data::MixManifest> &levels,
                        const data::SpeechPool &speech, const EvalConfig &config);

struct DenoiserScore {
  std::string utterance_id;
  double snr_db = 0.0;
  double input_si_snr = 0.0;
  double output_si_snr = 0.0;
  double input_sd_sdr = 0.0;
  double output_sd_sdr = 0.0;
};

// Per-utterance SI-SNR / SD-SDR of y and d against the clean speech read
// from each entry's speech_path.
std::vector<DenoiserScore> EvalDenoiser(const denoiser::DenoiserModel &model,
                                        const data::MixManifest &manifest);
// Averages of `scores`, all assumed to share one level.
DenoiserCell SummarizeDenoiser(const std::vector<DenoiserScore> &scores);

// Mean and population deviation, in that order.
std::pair<double, double> MeanStd(const std::vector<double> &values);

inline constexpr char kReportText[] = "report.txt";
inline constexpr char kReportRecords[] = "report.jsonl";
inline constexpr char kReportPlot[] = "mcd_vs_snr.csv";

// Fixed-width table with 2-decimal numbers.
std::string FormatReportText(const EvalReport &report);
// JSON lines carrying every value exactly.
std::string SerializeReport(const EvalReport &report);
EvalReport ParseReport(const std::string &text);
// "method,snr_db,mean_mcd_db" rows, 2 decimals.
std::string FormatPlotData(const EvalReport &report);

// Writes the three report files into `dir`. UsageError "no cells" when the
// report is empty.
void EmitReport(const EvalReport &report, const std::filesystem::path &dir);
EvalReport ReadReport(const std::filesystem::path &dir);

}  // namespace n2n::eval

#endif  // N2N_EVAL_HARNESS_H_
