// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "n2n/cli/cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "n2n/common/config.h"
#include "n2n/common/error.h"
#include "n2n/common/log.h"
#include "n2n/data/corpus_builder.h"
#include "n2n/data/manifest.h"
#include "n2n/data/pool.h"
#include "n2n/denoiser/denoiser.h"
#include "n2n/denoiser/trainer.h"
#include "n2n/eval/harness.h"
#include "n2n/signal/waveform.h"
#include "n2n/vc/convert.h"
#include "n2n/vc/trainer.h"
#include "n2n/vc/vqvae.h"

namespace n2n::cli {
namespace {

namespace fs = std::filesystem;

const char kPoolsDir[] = "pools";
const char kCorpusDir[] = "corpus";
const char kEvalDir[] = "eval";
const char kManifest[] = "manifest.jsonl";

std::vector<double> Grid(const std::string &flag, const std::string &text) {
  if (text.empty()) throw UsageError(flag + " must not be empty");
  return ParseNumberList(text);
}

std::vector<int> IntList(const std::string &flag, const std::string &text) {
  std::vector<int> out;
  for (double v : Grid(flag, text)) {
    if (v != static_cast<int>(v)) throw UsageError(flag + " needs integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

void WriteRunConfig(const CLI::App &sub, const fs::path &dir) {
  fs::create_directories(dir);
  std::ofstream out(dir / kRunConfigFile, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + (dir / kRunConfigFile).string());
  out << "[" << sub.get_name() << "]\n" << sub.config_to_str(true, false);
}

data::MixManifest CorpusManifest(const fs::path &corpus) {
  const fs::path path = corpus / kCorpusDir / kManifest;
  if (!fs::exists(path)) throw DataError("no corpus manifest at " + path.string());
  return data::ReadManifest(path);
}

// ---------------------------------------------------------------- mix

struct MixArgs {
  std::string out;
  bool toy = false;
  std::string speech_dir, noise_dir;
  uint64_t seed = 1;
  int speakers = 2, utterances = 16, noise_clips = 16;
  double min_seconds = 1.0, max_seconds = 2.0;
  std::string snr_grid = "6,8,10,12,14,16,18,20";
  std::string eval_levels = "-5,0,5,10,15,20,25,30";
  double eval_fraction = 0.5;
};

void AddMix(CLI::App &app, MixArgs &a) {
  CLI::App *s = app.add_subcommand("mix", "Build the noisy training corpus and parallel eval sets");
  s->add_option("--out", a.out, "Output directory")->required();
  auto *toy = s->add_flag("--toy", a.toy, "Generate the synthetic toy pools");
  auto *sd = s->add_option("--speech-dir", a.speech_dir, "External speech: {dir}/{speaker}/{name}.wav");
  auto *nd = s->add_option("--noise-dir", a.noise_dir, "External noise: {dir}/{category}/{name}.wav");
  toy->excludes(sd)->excludes(nd);
  sd->needs(nd);
  nd->needs(sd);
  s->add_option("--seed", a.seed, "Seed for pool generation and mixing")->capture_default_str();
  s->add_option("--speakers", a.speakers, "Toy speakers")->capture_default_str();
  s->add_option("--utterances", a.utterances, "Toy utterances in total")->capture_default_str();
  s->add_option("--noise-clips", a.noise_clips, "Toy noise clips")->capture_default_str();
  s->add_option("--min-seconds", a.min_seconds, "Shortest toy utterance")->capture_default_str();
  s->add_option("--max-seconds", a.max_seconds, "Longest toy utterance")->capture_default_str();
  s->add_option("--snr-grid", a.snr_grid, "Training SNR levels in dB, comma separated")
      ->capture_default_str();
  s->add_option("--eval-levels", a.eval_levels, "Eval SNR levels in dB, comma separated")
      ->capture_default_str();
  s->add_option("--eval-fraction", a.eval_fraction, "Fraction of contents held out for eval")
      ->capture_default_str();
}

int RunMix(const CLI::App &sub, const MixArgs &a, std::ostream &out) {
  if (!a.toy && a.speech_dir.empty()) {
    throw UsageError("mix needs --toy or --speech-dir with --noise-dir");
  }
  data::CorpusSpec spec;
  spec.train_snr_grid = Grid("--snr-grid", a.snr_grid);
  const std::vector<double> levels = Grid("--eval-levels", a.eval_levels);
  spec.eval_snr_grid = levels;
  spec.eval_content_fraction = a.eval_fraction;
  spec.seed = a.seed;
  spec.Validate();

  data::SpeechPool speech;
  data::NoisePool noise;
  if (a.toy) {
    data::ToyCorpusConfig tc;
    tc.seed = a.seed;
    tc.n_speakers = a.speakers;
    tc.n_utterances = a.utterances;
    tc.n_noise_clips = a.noise_clips;
    tc.min_seconds = a.min_seconds;
    tc.max_seconds = a.max_seconds;
    data::ToyCorpus toy = data::GenerateToyCorpus(tc);
    speech = std::move(toy.speech);
    noise = std::move(toy.noise);
  } else {
    if (!fs::is_directory(a.speech_dir)) throw UsageError("no such directory: " + a.speech_dir);
    if (!fs::is_directory(a.noise_dir)) throw UsageError("no such directory: " + a.noise_dir);
    speech = data::ScanSpeechDirectory(a.speech_dir);
    noise = data::ScanNoiseDirectory(a.noise_dir);
  }
  const fs::path root(a.out);
  data::WritePools(root / kPoolsDir, &speech, &noise);
  data::BuildNoisyCorpus(speech, noise, spec, root / kCorpusDir);
  data::BuildParallelEvalSets(speech, noise, spec, levels, root / kEvalDir);
  WriteRunConfig(sub, root);
  out << (root / kCorpusDir / kManifest).string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------- train-denoiser

struct TrainDenoiserArgs {
  std::string corpus, out;
  bool resume = false;
  denoiser::DenoiserTrainConfig train;
  std::string channels = "16,32,32,64";
  int rnn_width = 64;
  std::optional<uint64_t> model_seed;
};

void AddTrainDenoiser(CLI::App &app, TrainDenoiserArgs &a) {
  CLI::App *s = app.add_subcommand("train-denoiser", "Train the speech/noise separator");
  s->add_option("--corpus", a.corpus, "Directory written by mix")->required();
  s->add_option("--out", a.out, "Output directory for checkpoints and curves")->required();
  s->add_flag("--resume", a.resume, "Continue from the last checkpoint in --out");
  s->add_option("--steps", a.train.steps, "Optimizer steps")->capture_default_str();
  s->add_option("--batch", a.train.batch_size, "Clips per step")->capture_default_str();
  s->add_option("--crop-seconds", a.train.crop_seconds, "Training crop length")
      ->capture_default_str();
  s->add_option("--lr", a.train.learning_rate, "Adam learning rate")->capture_default_str();
  s->add_option("--clip-norm", a.train.clip_norm, "Gradient norm clip")->capture_default_str();
  s->add_option("--seed", a.train.seed, "Training seed")->capture_default_str();
  s->add_option("--valid-every", a.train.valid_every, "Steps between validations")
      ->capture_default_str();
  s->add_option("--channels", a.channels, "Encoder channels, comma separated")
      ->capture_default_str();
  s->add_option("--rnn-width", a.rnn_width, "Recurrent width")->capture_default_str();
  s->add_option("--model-seed", a.model_seed, "Initialization seed (default: --seed)");
}

int RunTrainDenoiser(const CLI::App &sub, const TrainDenoiserArgs &a, std::ostream &out) {
  const data::MixManifest manifest = CorpusManifest(a.corpus);
  const auto train = denoiser::LoadPairs(data::Filter(manifest, data::Split::kTrain));
  const data::MixManifest eval = data::Filter(manifest, data::Split::kEval);
  const auto valid = eval.empty() ? std::vector<denoiser::TrainingPair>{}
                                  : denoiser::LoadPairs(eval);
  if (train.empty()) throw DataError("corpus has no training utterances");
  denoiser::DenoiserConfig dc;
  dc.encoder_channels = IntList("--channels", a.channels);
  dc.rnn_width = a.rnn_width;
  dc.seed = a.model_seed.value_or(a.train.seed);
  denoiser::DenoiserModel model(dc, signal::SignalConfig{});
  const auto result = denoiser::TrainDenoiser(&model, train, valid, a.train, a.out, a.resume);
  WriteRunConfig(sub, a.out);
  out << (fs::path(a.out) / denoiser::kDenoiserCheckpoint).string() << "\n";
  if (!result.curve.empty()) {
    N2N_LOG_INFO << "denoiser final train loss " << result.curve.back().train_loss;
  }
  return kExitOk;
}

// ----------------------------------------------------------------- train-vc

struct TrainVcArgs {
  std::string corpus, out, denoiser;
  std::string variant = "proposed";
  std::string noise_source = "separated";
  bool resume = false;
  vc::VcTrainConfig train;
  vc::VcConfig model;
  std::optional<uint64_t> model_seed;
};

void AddTrainVc(CLI::App &app, TrainVcArgs &a) {
  CLI::App *s = app.add_subcommand("train-vc", "Train the VQ-VAE voice conversion model");
  s->add_option("--corpus", a.corpus, "Directory written by mix")->required();
  s->add_option("--out", a.out, "Output directory for checkpoints and curves")->required();
  s->add_option("--variant", a.variant, "baseline or proposed")
      ->check(CLI::IsMember({"baseline", "proposed"}))
      ->capture_default_str();
  s->add_option("--denoiser", a.denoiser, "Denoiser checkpoint for separated noise");
  s->add_option("--noise-source", a.noise_source, "separated or mixing")
      ->check(CLI::IsMember({"separated", "mixing"}))
      ->capture_default_str();
  s->add_flag("--resume", a.resume, "Continue from the checkpoint in --out");
  s->add_option("--steps", a.train.steps, "Optimizer steps")->capture_default_str();
  s->add_option("--batch", a.train.batch_size, "Segments per step")->capture_default_str();
  s->add_option("--segment", a.train.segment_samples, "Segment length in samples")
      ->capture_default_str();
  s->add_option("--lr", a.train.learning_rate, "Peak Adam learning rate")->capture_default_str();
  s->add_option("--final-lr-fraction", a.train.final_lr_fraction,
                "Learning rate at the end of the cosine decay, relative to --lr")
      ->capture_default_str();
  s->add_option("--lr-decay-steps", a.train.lr_decay_steps, "Length of the cosine decay")
      ->capture_default_str();
  s->add_option("--clip-norm", a.train.clip_norm, "Gradient norm clip")->capture_default_str();
  s->add_option("--seed", a.train.seed, "Training seed")->capture_default_str();
  s->add_option("--checkpoint-every", a.train.checkpoint_every, "Steps between checkpoints")
      ->capture_default_str();
  s->add_option("--codebook-size", a.model.codebook_size, "Codebook entries")
      ->capture_default_str();
  s->add_option("--latent-dim", a.model.latent_dim, "Latent dimension")->capture_default_str();
  s->add_option("--decoder-context", a.model.decoder_context, "Previous samples per step")
      ->capture_default_str();
  s->add_option("--rnn-width", a.model.rnn_width, "Decoder recurrent width")
      ->capture_default_str();
  s->add_option("--model-seed", a.model_seed, "Initialization seed (default: --seed)");
}

int RunTrainVc(const CLI::App &sub, TrainVcArgs a, std::ostream &out) {
  const vc::NoiseSource source = vc::ParseNoiseSource(a.noise_source);
  std::unique_ptr<denoiser::DenoiserModel> den;
  if (source == vc::NoiseSource::kSeparated) {
    if (a.denoiser.empty()) throw UsageError("--denoiser is required for separated noise");
    den = std::make_unique<denoiser::DenoiserModel>(denoiser::DenoiserModel::Load(a.denoiser));
  }
  const data::MixManifest train = data::Filter(CorpusManifest(a.corpus), data::Split::kTrain);
  const auto corpus = vc::BuildVcCorpus(train, den.get(), source);
  a.model.variant = vc::ParseVariant(a.variant);
  a.model.seed = a.model_seed.value_or(a.train.seed);
  vc::VQVAEModel model(a.model, signal::SignalConfig{}, vc::CorpusSpeakers(corpus));
  const auto result = vc::TrainVc(&model, corpus, a.train, a.out, a.resume);
  WriteRunConfig(sub, a.out);
  out << (fs::path(a.out) / vc::kVcCheckpoint).string() << "\n";
  N2N_LOG_INFO << "vc codebook entries used " << result.codebook_used;
  return kExitOk;
}

// ------------------------------------------------------------------ convert

struct ConvertArgs {
  std::string denoiser, vc, input, output, target;
  std::string mode = "direct";
  bool superimpose = false;
  uint64_t seed = 1;
};

void AddConvert(CLI::App &app, ConvertArgs &a) {
  CLI::App *s = app.add_subcommand("convert", "Convert one 8 kHz WAV to a target speaker");
  s->add_option("--denoiser", a.denoiser, "Denoiser checkpoint")->required();
  s->add_option("--vc", a.vc, "VC checkpoint")->required();
  s->add_option("--input", a.input, "Input WAV (16-bit mono, 8 kHz)")->required();
  s->add_option("--output", a.output, "Output WAV")->required();
  s->add_option("--target", a.target, "Target speaker id")->required();
  s->add_option("--mode", a.mode, "direct, clean, indirect or baseline")
      ->check(CLI::IsMember({"direct", "clean", "indirect", "baseline"}))
      ->capture_default_str();
  s->add_flag("--superimpose", a.superimpose, "Baseline mode: add the separated noise back");
  s->add_option("--seed", a.seed, "Sampling seed")->capture_default_str();
}

int RunConvert(const ConvertArgs &a, std::ostream &out) {
  const vc::ConvertMode mode = vc::ParseConvertMode(a.mode);
  if (a.superimpose && mode != vc::ConvertMode::kBaseline) {
    throw UsageError("--superimpose only applies to --mode baseline");
  }
  const auto den = denoiser::DenoiserModel::Load(a.denoiser);
  const auto model = vc::VQVAEModel::Load(a.vc);
  model.SpeakerIndex(a.target);
  const signal::Waveform y = signal::ReadWav(a.input, model.signal_config().sample_rate);
  const signal::Waveform w = vc::Convert(mode, den, model, y, a.target, a.superimpose, a.seed);
  const fs::path parent = fs::path(a.output).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  signal::WriteWav(a.output, w);
  out << a.output << "\n";
  return kExitOk;
}

// ----------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string corpus, out, denoiser;
  std::string clean_vc, baseline, proposed;
  std::string levels = "-5,0,5,10,15,20,25,30";
  uint64_t seed = 1;
};

void AddEvaluate(CLI::App &app, EvaluateArgs &a) {
  CLI::App *s = app.add_subcommand("evaluate", "MCD versus input SNR for each method");
  s->add_option("--corpus", a.corpus, "Directory written by mix")->required();
  s->add_option("--out", a.out, "Report directory")->required();
  s->add_option("--denoiser", a.denoiser, "Denoiser checkpoint")->required();
  s->add_option("--clean-vc", a.clean_vc, "Baseline checkpoint run on clean input");
  s->add_option("--baseline", a.baseline, "Baseline checkpoint");
  s->add_option("--proposed", a.proposed, "Noise-conditioned checkpoint");
  s->add_option("--levels", a.levels, "SNR levels in dB, comma separated")
      ->capture_default_str();
  s->add_option("--seed", a.seed, "Sampling seed")->capture_default_str();
}

int RunEvaluate(const CLI::App &sub, const EvaluateArgs &a, std::ostream &out) {
  std::vector<std::pair<eval::MethodKind, std::string>> wanted;
  if (!a.clean_vc.empty()) wanted.emplace_back(eval::MethodKind::kCleanVc, a.clean_vc);
  if (!a.baseline.empty()) wanted.emplace_back(eval::MethodKind::kBaseline, a.baseline);
  if (!a.proposed.empty()) wanted.emplace_back(eval::MethodKind::kProposed, a.proposed);
  if (wanted.empty()) {
    throw UsageError("evaluate needs at least one of --clean-vc, --baseline, --proposed");
  }
  const std::vector<double> levels = Grid("--levels", a.levels);
  for (const auto &[kind, path] : wanted) {
    if (!fs::exists(path)) throw DataError("missing checkpoint " + path);
  }
  if (!fs::exists(a.denoiser)) throw DataError("missing checkpoint " + a.denoiser);
  const auto den = denoiser::DenoiserModel::Load(a.denoiser);
  std::vector<std::unique_ptr<vc::VQVAEModel>> models;
  std::vector<eval::Method> methods;
  for (const auto &[kind, path] : wanted) {
    models.push_back(std::make_unique<vc::VQVAEModel>(vc::VQVAEModel::Load(path)));
    methods.push_back({eval::MethodKindName(kind), kind, models.back().get()});
  }
  std::vector<data::MixManifest> sets;
  for (double level : levels) {
    const fs::path p = fs::path(a.corpus) / kEvalDir / data::LevelDirName(level) / kManifest;
    if (!fs::exists(p)) {
      throw DataError("no eval set for " + FormatExact(level) + " dB at " + p.string());
    }
    sets.push_back(data::ReadManifest(p));
  }
  const data::SpeechPool speech = data::ReadSpeechPool(fs::path(a.corpus) / kPoolsDir);
  eval::EvalConfig config;
  config.seed = a.seed;
  const eval::EvalReport report = eval::EvalMcdVsSnr(den, methods, sets, speech, config);
  eval::EmitReport(report, a.out);
  WriteRunConfig(sub, a.out);
  out << eval::FormatReportText(report);
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"n2nvc: noisy-to-noisy voice conversion toolkit", "n2nvc"};
  app.set_config("--config", "", "Read flags from a config file (flags on the command line win)");
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress progress messages");
  MixArgs mix;
  TrainDenoiserArgs td;
  TrainVcArgs tv;
  ConvertArgs cv;
  EvaluateArgs ev;
  AddMix(app, mix);
  AddTrainDenoiser(app, td);
  AddTrainVc(app, tv);
  AddConvert(app, cv);
  AddEvaluate(app, ev);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  const int saved_verbosity = LogVerbosity();
  if (quiet) LogVerbosity() = 0;
  int code = kExitOk;
  try {
    if (app.got_subcommand("mix")) {
      code = RunMix(*app.get_subcommand("mix"), mix, out);
    } else if (app.got_subcommand("train-denoiser")) {
      code = RunTrainDenoiser(*app.get_subcommand("train-denoiser"), td, out);
    } else if (app.got_subcommand("train-vc")) {
      code = RunTrainVc(*app.get_subcommand("train-vc"), tv, out);
    } else if (app.got_subcommand("convert")) {
      code = RunConvert(cv, out);
    } else if (app.got_subcommand("evaluate")) {
      code = RunEvaluate(*app.get_subcommand("evaluate"), ev, out);
    }
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    code = static_cast<int>(e.kind());
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    code = kExitData;
  }
  LogVerbosity() = saved_verbosity;
  return code;
}

}  // namespace n2n::cli
