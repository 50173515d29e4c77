// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "n2n/vc/trainer.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "n2n/common/error.h"
#include "n2n/common/log.h"
#include "n2n/common/random.h"
#include "n2n/nn/ops.h"
#include "n2n/nn/optimizer.h"

namespace n2n::vc {
namespace {

struct Prepared {
  signal::MelSpectrogram mel;
  NoiseCondition noise;
  std::vector<int> codes;
  int speaker = 0;
};

std::vector<Prepared> Prepare(const VQVAEModel &model, const std::vector<VcExample> &corpus,
                              size_t min_length) {
  std::vector<Prepared> out;
  for (const VcExample &ex : corpus) {
    const auto &sep = ex.sep;
    if (sep.y.size() < min_length) {
      throw DataError("utterance " + ex.id + " is shorter than one training segment");
    }
    Prepared p;
    p.mel = signal::LogMel(sep.d, model.signal_config());
    if (model.noise_conditioned()) p.noise = MakeNoiseCondition(sep.n, model.signal_config());
    p.codes = TrainingTargets(model.variant(), sep.y, sep.d);
    p.speaker = model.SpeakerIndex(ex.speaker_id);
    out.push_back(std::move(p));
  }
  return out;
}

nn::Checkpoint TrainingCheckpoint(const VQVAEModel &model, const nn::Adam &opt, long step,
                                  const VcTrainConfig &config) {
  nn::Checkpoint ck = model.ToCheckpoint();
  KeyValueConfig kv;
  config.Save("vctrain.", &kv);
  ck.header["train"] = {{"step", step}, {"config", kv.Serialize()}};
  for (const auto &[name, t] : opt.State()) ck.tensors["adam/" + name] = t;
  return ck;
}

// Encoder latents of every utterance, side by side.
nn::Matrix CollectLatents(const VQVAEModel &model, const std::vector<Prepared> &data) {
  std::vector<nn::Matrix> parts;
  Eigen::Index cols = 0;
  for (const Prepared &p : data) {
    parts.push_back(model.EncodeLatents(p.mel));
    cols += parts.back().cols();
  }
  nn::Matrix all(model.config().latent_dim, cols);
  Eigen::Index c = 0;
  for (const auto &m : parts) {
    all.middleCols(c, m.cols()) = m;
    c += m.cols();
  }
  return all;
}

}  // namespace

NoiseSource ParseNoiseSource(const std::string &name) {
  if (name == "separated") return NoiseSource::kSeparated;
  if (name == "mixing") return NoiseSource::kMixing;
  throw UsageError("unknown noise source \"" + name + "\" (expected separated or mixing)");
}

std::string NoiseSourceName(NoiseSource source) {
  return source == NoiseSource::kSeparated ? "separated" : "mixing";
}

std::vector<VcExample> BuildVcCorpus(const data::MixManifest &manifest,
                                     const denoiser::DenoiserModel *denoiser,
                                     NoiseSource source) {
  if (manifest.empty()) throw DataError("vc training manifest is empty");
  if (source == NoiseSource::kSeparated && denoiser == nullptr) {
    throw UsageError("separated noise needs a denoiser");
  }
  std::vector<VcExample> out;
  for (const auto &e : manifest) {
    if (e.mixture_path.empty()) throw DataError("entry " + e.utterance_id + " was not rendered");
    const signal::Waveform y = signal::ReadWav(e.mixture_path);
    if (source == NoiseSource::kSeparated) {
      out.push_back({e.utterance_id, e.speaker_id, denoiser->Separate(y)});
    } else {
      const signal::Waveform n = signal::ReadWav(e.scaled_noise_path);
      out.push_back({e.utterance_id, e.speaker_id, denoiser::Separate(y, y - n)});
    }
  }
  return out;
}

std::vector<std::string> CorpusSpeakers(const std::vector<VcExample> &corpus) {
  std::set<std::string> ids;
  for (const auto &ex : corpus) ids.insert(ex.speaker_id);
  return {ids.begin(), ids.end()};
}

void VcTrainConfig::Validate() const {
  if (steps < 0) throw UsageError("vc steps must be >= 0");
  if (batch_size < 1) throw UsageError("vc batch size must be >= 1");
  if (segment_samples < 1) throw UsageError("vc segment length must be >= 1");
  if (!(learning_rate >= 0.0)) throw UsageError("learning rate must be >= 0");
  if (log_every < 1 || checkpoint_every < 1) {
    throw UsageError("log_every and checkpoint_every must be >= 1");
  }
  if (!(dead_threshold >= 0.0)) throw UsageError("dead_threshold must be >= 0");
  if (!(final_lr_fraction >= 0.0 && final_lr_fraction <= 1.0)) {
    throw UsageError("final_lr_fraction must lie in [0, 1]");
  }
  if (lr_decay_steps < 1) throw UsageError("lr_decay_steps must be >= 1");
}

double VcTrainConfig::LearningRateAt(long step) const {
  if (lr_decay_steps <= 1) return learning_rate * final_lr_fraction;
  const double progress = std::min(
      1.0, static_cast<double>(step - 1) / static_cast<double>(lr_decay_steps - 1));
  const double cosine = 0.5 * (1.0 + std::cos(M_PI * progress));
  return learning_rate * (final_lr_fraction + (1.0 - final_lr_fraction) * cosine);
}

void VcTrainConfig::Save(const std::string &p, KeyValueConfig *kv) const {
  kv->Set(p + "steps", static_cast<int64_t>(steps));
  kv->Set(p + "batch_size", batch_size);
  kv->Set(p + "segment_samples", segment_samples);
  kv->Set(p + "learning_rate", learning_rate);
  kv->Set(p + "clip_norm", clip_norm);
  kv->Set(p + "seed", static_cast<int64_t>(seed));
  kv->Set(p + "log_every", static_cast<int64_t>(log_every));
  kv->Set(p + "checkpoint_every", static_cast<int64_t>(checkpoint_every));
  kv->Set(p + "dead_threshold", dead_threshold);
  kv->Set(p + "final_lr_fraction", final_lr_fraction);
  kv->Set(p + "lr_decay_steps", static_cast<int64_t>(lr_decay_steps));
}

void VcTrainConfig::Load(const std::string &p, const KeyValueConfig &kv) {
  int64_t v = steps;
  kv.Get(p + "steps", &v);
  steps = v;
  kv.Get(p + "batch_size", &batch_size);
  kv.Get(p + "segment_samples", &segment_samples);
  kv.Get(p + "learning_rate", &learning_rate);
  kv.Get(p + "clip_norm", &clip_norm);
  kv.Get(p + "seed", &seed);
  v = log_every;
  kv.Get(p + "log_every", &v);
  log_every = v;
  v = checkpoint_every;
  kv.Get(p + "checkpoint_every", &v);
  checkpoint_every = v;
  kv.Get(p + "dead_threshold", &dead_threshold);
  kv.Get(p + "final_lr_fraction", &final_lr_fraction);
  v = lr_decay_steps;
  kv.Get(p + "lr_decay_steps", &v);
  lr_decay_steps = v;
  Validate();
}

VcTrainResult TrainVc(VQVAEModel *model, const std::vector<VcExample> &corpus,
                      const VcTrainConfig &config, const std::filesystem::path &out_dir,
                      bool resume) {
  config.Validate();
  if (corpus.empty()) throw DataError("vc training corpus is empty");
  const size_t segment = static_cast<size_t>(config.segment_samples);
  const bool learning = config.learning_rate > 0.0;

  nn::Adam opt(&model->params(), nn::AdamConfig{config.learning_rate, 0.9, 0.999, 1e-8,
                                                config.clip_norm});
  VcTrainResult result;
  long start = 0;
  if (resume) {
    if (out_dir.empty()) throw UsageError("resume requires an output directory");
    const nn::Checkpoint ck = nn::Checkpoint::Load(out_dir / kVcCheckpoint);
    VQVAEModel saved = VQVAEModel::FromCheckpoint(ck);
    if (saved.variant() != model->variant()) {
      throw UsageError("resume: checkpoint variant is " + VariantName(saved.variant()) +
                       " but " + VariantName(model->variant()) + " was requested");
    }
    if (!(saved.config() == model->config()) || saved.speakers() != model->speakers()) {
      throw UsageError("resume: checkpoint model config differs from the requested one");
    }
    *model = std::move(saved);
    std::map<std::string, nn::Matrix> state;
    for (const auto &[name, t] : ck.tensors) {
      if (name.rfind("adam/", 0) == 0) state[name.substr(5)] = t;
    }
    start = ck.header.at("train").at("step").get<long>();
    opt.LoadState(state, start);
    if (std::filesystem::exists(out_dir / kVcCurve)) {
      for (const auto &p : nn::ReadCurve(out_dir / kVcCurve)) {
        if (p.step <= start) result.curve.push_back(p);
      }
    }
  }

  std::vector<Prepared> data = Prepare(*model, corpus, segment);
  if (!model->normalization_fitted()) {
    std::vector<signal::MelSpectrogram> mels;
    std::vector<NoiseCondition> noise;
    for (const auto &p : data) {
      mels.push_back(p.mel);
      if (model->noise_conditioned()) noise.push_back(p.noise);
    }
    model->FitNormalization(mels, noise);
  }
  if (learning && model->trained_steps() == 0 && start == 0) {
    // Seed the codebook with encoder outputs so every entry starts in use.
    const nn::Matrix latents = CollectLatents(*model, data);
    std::mt19937_64 rng(DeriveSeed(config.seed, "vc/codebook_init"));
    const int k = model->codebook().entries();
    nn::Matrix init(latents.rows(), k);
    std::normal_distribution<double> jitter(0.0, 1e-3);
    for (int j = 0; j < k; ++j) {
      init.col(j) = latents.col(static_cast<Eigen::Index>(rng() % latents.cols()));
      for (Eigen::Index i = 0; i < init.rows(); ++i) init(i, j) += jitter(rng);
    }
    model->codebook().set_embeddings(init);
  }

  for (long step = start + 1; step <= config.steps; ++step) {
    std::mt19937_64 rng(DeriveSeed(config.seed, "vc/step/" + std::to_string(step)));
    model->params().ZeroGrad();
    nn::Graph g;
    nn::Binder bind(&g, &model->params());
    std::vector<DecoderSegment> segments;
    std::vector<nn::Var> commitments;
    std::vector<nn::Matrix> latent_values;
    std::vector<int> indices;
    for (int b = 0; b < config.batch_size; ++b) {
      const Prepared &p = data[rng() % data.size()];
      const size_t offset = static_cast<size_t>(rng() % (p.codes.size() - segment + 1));
      nn::Var latents = model->Encode(bind, p.mel);
      LatentCodes codes;
      nn::Var commitment;
      nn::Var z = model->codebook().QuantizeStraightThrough(latents, &codes, &commitment);
      commitments.push_back(commitment);
      latent_values.push_back(latents.value());
      indices.insert(indices.end(), codes.indices.begin(), codes.indices.end());
      DecoderSegment s;
      s.frames = model->Condition(bind, z, p.speaker, p.mel.frames.rows());
      if (model->noise_conditioned()) s.noise = model->NoiseFeatures(bind, p.noise);
      s.codes = p.codes;
      s.start = offset;
      s.length = segment;
      segments.push_back(s);
    }
    std::vector<int> targets;
    nn::Var logits = model->DecoderLogits(bind, segments, &targets);
    nn::Var ce = nn::SoftmaxCrossEntropy(logits, targets);
    nn::Var vq = commitments[0];
    for (size_t i = 1; i < commitments.size(); ++i) vq = nn::Add(vq, commitments[i]);
    vq = nn::Scale(vq, 1.0 / static_cast<double>(commitments.size()));
    nn::Var loss = nn::Add(ce, vq);
    if (!std::isfinite(loss.scalar())) {
      throw NumericalError("vc training loss is not finite at step " + std::to_string(step));
    }
    g.Backward(loss);
    opt.set_learning_rate(config.LearningRateAt(step));
    opt.Step();

    model->codebook().RecordUsage(indices);
    if (learning) {
      Eigen::Index cols = 0;
      for (const auto &m : latent_values) cols += m.cols();
      nn::Matrix all(model->config().latent_dim, cols);
      Eigen::Index c = 0;
      for (const auto &m : latent_values) {
        all.middleCols(c, m.cols()) = m;
        c += m.cols();
      }
      model->codebook().EmaUpdate(all, indices, config.dead_threshold, rng);
    }
    model->set_trained_steps(step);

    result.curve.push_back({step, ce.scalar(), std::nullopt});
    if (step % config.log_every == 0 || step == config.steps) {
      N2N_LOG_INFO << "vc " << VariantName(model->variant()) << " step " << step << " ce "
                   << ce.scalar() << " commit " << vq.scalar();
    }
    if (!out_dir.empty() && (step % config.checkpoint_every == 0 || step == config.steps)) {
      TrainingCheckpoint(*model, opt, step, config).Save(out_dir / kVcCheckpoint);
      nn::WriteCurve(out_dir / kVcCurve, result.curve);
    }
  }

  VQCodebook &cb = model->codebook();
  cb.ResetUsage();
  for (const Prepared &p : data) cb.RecordUsage(cb.Quantize(model->EncodeLatents(p.mel)).indices);
  result.codebook_used = cb.used_entries();
  N2N_LOG_INFO << "vc codebook entries in use: " << result.codebook_used << " / "
               << cb.entries();
  if (!out_dir.empty()) {
    TrainingCheckpoint(*model, opt, std::max(start, config.steps), config)
        .Save(out_dir / kVcCheckpoint);
    nn::WriteCurve(out_dir / kVcCurve, result.curve);
  }
  return result;
}

}  // namespace n2n::vc
