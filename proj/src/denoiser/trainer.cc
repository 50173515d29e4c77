// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "n2n/denoiser/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "n2n/common/error.h"
#include "n2n/common/log.h"
#include "n2n/common/random.h"
#include "n2n/nn/ops.h"
#include "n2n/nn/optimizer.h"
#include "n2n/signal/metrics.h"

namespace n2n::denoiser {
namespace {

nn::Checkpoint TrainingCheckpoint(const DenoiserModel &model, const nn::Adam &opt,
                                  long step, long best_step, double best_valid,
                                  const DenoiserTrainConfig &config) {
  nn::Checkpoint ck = model.ToCheckpoint();
  KeyValueConfig kv;
  config.Save("train.", &kv);
  ck.header["train"] = {{"step", step},
                        {"best_step", best_step},
                        {"best_valid_loss", std::isfinite(best_valid) ? nlohmann::json(best_valid)
                                                                      : nlohmann::json(nullptr)},
                        {"config", kv.Serialize()}};
  for (const auto &[name, t] : opt.State()) ck.tensors["adam/" + name] = t;
  return ck;
}

}  // namespace

std::vector<TrainingPair> LoadPairs(const data::MixManifest &manifest) {
  std::vector<TrainingPair> out;
  for (const auto &e : manifest) {
    if (e.mixture_path.empty()) throw DataError("entry " + e.utterance_id + " was not rendered");
    TrainingPair p{e.utterance_id, signal::ReadWav(e.mixture_path), signal::ReadWav(e.speech_path)};
    signal::CheckSameLength(p.noisy, p.clean, "training pair");
    out.push_back(std::move(p));
  }
  return out;
}

void DenoiserTrainConfig::Validate() const {
  if (steps < 0) throw UsageError("denoiser steps must be >= 0");
  if (batch_size < 1) throw UsageError("denoiser batch size must be >= 1");
  if (!(crop_seconds > 0.0)) throw UsageError("denoiser crop must be positive");
  if (!(learning_rate >= 0.0)) throw UsageError("learning rate must be >= 0");
  if (valid_every < 1) throw UsageError("valid_every must be >= 1");
}

void DenoiserTrainConfig::Save(const std::string &p, KeyValueConfig *kv) const {
  kv->Set(p + "steps", static_cast<int64_t>(steps));
  kv->Set(p + "batch_size", batch_size);
  kv->Set(p + "crop_seconds", crop_seconds);
  kv->Set(p + "learning_rate", learning_rate);
  kv->Set(p + "clip_norm", clip_norm);
  kv->Set(p + "seed", static_cast<int64_t>(seed));
  kv->Set(p + "valid_every", static_cast<int64_t>(valid_every));
  kv->Set(p + "max_valid_clips", max_valid_clips);
}

void DenoiserTrainConfig::Load(const std::string &p, const KeyValueConfig &kv) {
  int64_t v = steps;
  kv.Get(p + "steps", &v);
  steps = v;
  kv.Get(p + "batch_size", &batch_size);
  kv.Get(p + "crop_seconds", &crop_seconds);
  kv.Get(p + "learning_rate", &learning_rate);
  kv.Get(p + "clip_norm", &clip_norm);
  kv.Get(p + "seed", &seed);
  v = valid_every;
  kv.Get(p + "valid_every", &v);
  valid_every = v;
  kv.Get(p + "max_valid_clips", &max_valid_clips);
  Validate();
}

double EvaluateLoss(const DenoiserModel &model, const std::vector<TrainingPair> &pairs) {
  if (pairs.empty()) throw DataError("no clips to evaluate");
  double sum = 0.0;
  for (const auto &p : pairs) {
    const signal::Waveform d = model.Denoise(p.noisy);
    sum += signal::SdSdrLoss(d.samples(), p.clean.samples()).loss;
  }
  return sum / static_cast<double>(pairs.size());
}

DenoiserTrainResult TrainDenoiser(DenoiserModel *model, const std::vector<TrainingPair> &train,
                                  const std::vector<TrainingPair> &valid,
                                  const DenoiserTrainConfig &config,
                                  const std::filesystem::path &out_dir, bool resume) {
  config.Validate();
  if (train.empty()) throw DataError("denoiser training set is empty");
  const size_t crop =
      static_cast<size_t>(config.crop_seconds * model->signal_config().sample_rate);
  std::vector<TrainingPair> valid_set(
      valid.begin(), valid.begin() + std::min<size_t>(valid.size(), config.max_valid_clips));

  nn::Adam opt(&model->params(), nn::AdamConfig{config.learning_rate, 0.9, 0.999, 1e-8,
                                                config.clip_norm});
  DenoiserTrainResult result;
  result.best_valid_loss = std::numeric_limits<double>::infinity();
  long start = 0;
  nn::ParameterStore best = model->params();
  if (resume) {
    if (out_dir.empty()) throw UsageError("resume requires an output directory");
    const nn::Checkpoint ck = nn::Checkpoint::Load(out_dir / kDenoiserLastCheckpoint);
    const DenoiserModel saved = DenoiserModel::FromCheckpoint(ck);
    if (!(saved.config() == model->config()) || !(saved.signal_config() == model->signal_config())) {
      throw UsageError("resume: checkpoint model config differs from the requested one");
    }
    model->params() = saved.params();
    std::map<std::string, nn::Matrix> state;
    for (const auto &[name, t] : ck.tensors) {
      if (name.rfind("adam/", 0) == 0) state[name.substr(5)] = t;
    }
    start = ck.header.at("train").at("step").get<long>();
    opt.LoadState(state, start);
    result.best_step = ck.header["train"]["best_step"].get<long>();
    const auto &bv = ck.header["train"]["best_valid_loss"];
    if (!bv.is_null()) result.best_valid_loss = bv.get<double>();
    if (std::filesystem::exists(out_dir / kDenoiserCheckpoint)) {
      best = DenoiserModel::Load(out_dir / kDenoiserCheckpoint).params();
    }
    if (std::filesystem::exists(out_dir / kDenoiserCurve)) {
      for (const auto &p : nn::ReadCurve(out_dir / kDenoiserCurve)) {
        if (p.step <= start) result.curve.push_back(p);
      }
    }
  }

  std::vector<size_t> order(train.size());
  for (long step = start + 1; step <= config.steps; ++step) {
    std::mt19937_64 rng(DeriveSeed(config.seed, "denoiser/step/" + std::to_string(step)));
    std::iota(order.begin(), order.end(), 0);
    std::vector<size_t> batch;
    for (int b = 0; b < config.batch_size; ++b) {
      if (b % static_cast<int>(order.size()) == 0) std::shuffle(order.begin(), order.end(), rng);
      batch.push_back(order[b % order.size()]);
    }
    std::sort(batch.begin(), batch.end());

    model->params().ZeroGrad();
    nn::Graph g;
    nn::Binder bind(&g, &model->params());
    std::vector<nn::Var> losses;
    for (size_t idx : batch) {
      const TrainingPair &p = train[idx];
      const size_t len = std::min(crop, p.noisy.size());
      const size_t offset =
          p.noisy.size() > len ? static_cast<size_t>(rng() % (p.noisy.size() - len + 1)) : 0;
      std::span<const double> y = p.noisy.samples().subspan(offset, len);
      std::span<const double> s = p.clean.samples().subspan(offset, len);
      losses.push_back(nn::SdSdrLoss(model->Forward(bind, y), s));
    }
    nn::Var total = losses[0];
    for (size_t i = 1; i < losses.size(); ++i) total = nn::Add(total, losses[i]);
    nn::Var loss = nn::Scale(total, 1.0 / static_cast<double>(losses.size()));
    if (!std::isfinite(loss.scalar())) {
      throw NumericalError("denoiser training loss is not finite at step " +
                           std::to_string(step));
    }
    g.Backward(loss);
    opt.Step();
    model->set_trained_steps(step);

    nn::CurvePoint point{step, loss.scalar(), std::nullopt};
    const bool validate = !valid_set.empty() &&
                          (step % config.valid_every == 0 || step == config.steps);
    if (validate) {
      point.valid_loss = EvaluateLoss(*model, valid_set);
      if (*point.valid_loss < result.best_valid_loss) {
        result.best_valid_loss = *point.valid_loss;
        result.best_step = step;
        best = model->params();
        if (!out_dir.empty()) model->Save(out_dir / kDenoiserCheckpoint);
      }
      N2N_LOG_INFO << "denoiser step " << step << " train " << point.train_loss << " valid "
                   << *point.valid_loss;
    }
    result.curve.push_back(point);
    if (!out_dir.empty() && (validate || step == config.steps)) {
      TrainingCheckpoint(*model, opt, step, result.best_step, result.best_valid_loss, config)
          .Save(out_dir / kDenoiserLastCheckpoint);
      nn::WriteCurve(out_dir / kDenoiserCurve, result.curve);
    }
  }
  if (valid_set.empty()) {
    result.best_step = config.steps;
    result.best_valid_loss = std::nan("");
    if (!out_dir.empty()) model->Save(out_dir / kDenoiserCheckpoint);
  } else if (result.best_step > 0) {
    model->params() = best;
  }
  if (!out_dir.empty()) nn::WriteCurve(out_dir / kDenoiserCurve, result.curve);
  return result;
}

}  // namespace n2n::denoiser
