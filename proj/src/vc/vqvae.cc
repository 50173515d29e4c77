// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "n2n/vc/vqvae.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <utility>

#include "n2n/common/error.h"
#include "n2n/common/random.h"
#include "n2n/nn/ops.h"
#include "n2n/signal/mulaw.h"

namespace n2n::vc {
namespace {

using nn::Matrix;
using nn::Var;

constexpr double kMinDeviation = 1e-3;

nn::ConvGeometry TimeConv(int cin, int cout, int width, int kernel, int stride, int pad_left,
                          int pad_right) {
  nn::ConvGeometry g;
  g.in_channels = cin;
  g.out_channels = cout;
  g.height = 1;
  g.width = width;
  g.kernel_w = kernel;
  g.stride_w = stride;
  g.pad_left = pad_left;
  g.pad_right = pad_right;
  return g;
}

double PrevValue(int code) {
  return (code - signal::kMuLawLevels / 2) / static_cast<double>(signal::kMuLawLevels / 2);
}

// Softmax sampling with a portable uniform draw.
int SampleCategorical(const Eigen::VectorXd &logits, std::mt19937_64 &rng) {
  const double top = logits.maxCoeff();
  const Eigen::VectorXd p = (logits.array() - top).exp().matrix();
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * p.sum();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    acc += p(k);
    if (u < acc) return static_cast<int>(k);
  }
  return static_cast<int>(p.size() - 1);
}

}  // namespace

std::string VariantName(Variant v) {
  return v == Variant::kBaseline ? "baseline" : "proposed";
}

Variant ParseVariant(const std::string &name) {
  if (name == "baseline") return Variant::kBaseline;
  if (name == "proposed" || name == "noise_conditioned") return Variant::kNoiseConditioned;
  throw UsageError("unknown variant \"" + name + "\" (expected baseline or proposed)");
}

void VcConfig::Validate() const {
  for (int v : {encoder_channels, latent_dim, codebook_size, speaker_dim, cond_channels,
                noise_channels, decoder_context, rnn_width, fc_width}) {
    if (v < 1) throw UsageError("vc widths and sizes must be positive");
  }
  if (!(commitment >= 0.0)) throw UsageError("vc commitment must be >= 0");
  if (!(ema_decay >= 0.0 && ema_decay < 1.0)) throw UsageError("vc ema_decay must be in [0, 1)");
  if (!(output_init_scale >= 0.0)) throw UsageError("vc output_init_scale must be >= 0");
}

void VcConfig::Save(const std::string &p, KeyValueConfig *kv) const {
  kv->Set(p + "variant", VariantName(variant));
  kv->Set(p + "encoder_channels", encoder_channels);
  kv->Set(p + "latent_dim", latent_dim);
  kv->Set(p + "codebook_size", codebook_size);
  kv->Set(p + "commitment", commitment);
  kv->Set(p + "ema_decay", ema_decay);
  kv->Set(p + "speaker_dim", speaker_dim);
  kv->Set(p + "cond_channels", cond_channels);
  kv->Set(p + "noise_channels", noise_channels);
  kv->Set(p + "decoder_context", decoder_context);
  kv->Set(p + "rnn_width", rnn_width);
  kv->Set(p + "fc_width", fc_width);
  kv->Set(p + "output_init_scale", output_init_scale);
  kv->Set(p + "seed", static_cast<int64_t>(seed));
}

void VcConfig::Load(const std::string &p, const KeyValueConfig &kv) {
  if (kv.Has(p + "variant")) {
    std::string name;
    kv.Get(p + "variant", &name);
    variant = ParseVariant(name);
  }
  kv.Get(p + "encoder_channels", &encoder_channels);
  kv.Get(p + "latent_dim", &latent_dim);
  kv.Get(p + "codebook_size", &codebook_size);
  kv.Get(p + "commitment", &commitment);
  kv.Get(p + "ema_decay", &ema_decay);
  kv.Get(p + "speaker_dim", &speaker_dim);
  kv.Get(p + "cond_channels", &cond_channels);
  kv.Get(p + "noise_channels", &noise_channels);
  kv.Get(p + "decoder_context", &decoder_context);
  kv.Get(p + "rnn_width", &rnn_width);
  kv.Get(p + "fc_width", &fc_width);
  kv.Get(p + "output_init_scale", &output_init_scale);
  kv.Get(p + "seed", &seed);
  Validate();
}

NoiseCondition MakeNoiseCondition(const signal::Waveform &n, const signal::SignalConfig &config) {
  NoiseCondition c;
  c.features = signal::LogMel(n, config).frames;
  c.zero_sequence = false;
  return c;
}

NoiseCondition ZeroNoiseCondition(size_t length, const signal::SignalConfig &config) {
  NoiseCondition c = MakeNoiseCondition(signal::Waveform::Zeros(length, config.sample_rate),
                                        config);
  c.zero_sequence = true;
  return c;
}

int ConditionFrame(size_t t, Eigen::Index frames, const signal::SignalConfig &config) {
  const auto f = static_cast<Eigen::Index>(t / static_cast<size_t>(config.hop_length));
  return static_cast<int>(std::min(f, frames - 1));
}

int NoiseColumn(size_t t, Eigen::Index frames, const signal::SignalConfig &config) {
  const size_t last = static_cast<size_t>(config.frame_length) - 1;
  if (t < last) return 0;
  const auto f = static_cast<Eigen::Index>((t - last) / static_cast<size_t>(config.hop_length));
  return static_cast<int>(std::min(f, frames - 1)) + 1;
}

std::vector<int> TrainingTargets(Variant variant, const signal::Waveform &y,
                                 const signal::Waveform &d) {
  signal::CheckSameLength(y, d, "training targets");
  return signal::MuLawEncode(variant == Variant::kBaseline ? d.samples() : y.samples());
}

VQVAEModel::VQVAEModel(VcConfig config, signal::SignalConfig signal_config,
                       std::vector<std::string> speakers)
    : config_(config), signal_(signal_config), speakers_(std::move(speakers)) {
  config_.Validate();
  signal_.Validate();
  if (speakers_.empty()) throw UsageError("vc model needs at least one speaker");
  std::vector<std::string> sorted = speakers_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw UsageError("duplicate speaker id in speaker table");
  }
  Init();
}

void VQVAEModel::Init() {
  std::mt19937_64 rng(config_.seed);
  const int m = signal_.mel_bands, c = config_.encoder_channels, d = config_.latent_dim;
  const int s = static_cast<int>(speakers_.size());
  auto relu_scale = [](int fan_in) { return std::sqrt(6.0 / fan_in); };
  auto lin_scale = [](int fan_in) { return std::sqrt(3.0 / fan_in); };

  params_.Add("enc1/w", c, m * 3, relu_scale(m * 3), rng);
  params_.AddZeros("enc1/b", c, 1);
  params_.Add("enc2/w", c, c * 4, relu_scale(c * 4), rng);
  params_.AddZeros("enc2/b", c, 1);
  params_.Add("enc3/w", d, c * 3, lin_scale(c * 3), rng);
  params_.AddZeros("enc3/b", d, 1);

  params_.Add("speaker/table", config_.speaker_dim, s, 1.0, rng);
  const int cond_in = (d + config_.speaker_dim) * 3;
  params_.Add("cond/w", config_.cond_channels, cond_in, lin_scale(cond_in), rng);
  params_.AddZeros("cond/b", config_.cond_channels, 1);
  if (noise_conditioned()) {
    params_.Add("noise/w", config_.noise_channels, m, lin_scale(m), rng);
    params_.AddZeros("noise/b", config_.noise_channels, 1);
  }

  const int h = config_.rnn_width;
  const double rnn_scale = 1.0 / std::sqrt(static_cast<double>(h));
  params_.Add("rnn/wx", 3 * h, InputRows(), rnn_scale, rng);
  params_.Add("rnn/wh", 3 * h, h, rnn_scale, rng);
  params_.Add("rnn/bx", 3 * h, 1, rnn_scale, rng);
  params_.Add("rnn/bh", 3 * h, 1, rnn_scale, rng);
  params_.Add("fc/w", config_.fc_width, h, relu_scale(h), rng);
  params_.AddZeros("fc/b", config_.fc_width, 1);
  params_.Add("out/w", signal::kMuLawLevels, config_.fc_width,
              lin_scale(config_.fc_width) * config_.output_init_scale, rng);
  params_.AddZeros("out/b", signal::kMuLawLevels, 1);

  codebook_ = VQCodebook(config_.codebook_size, d, config_.commitment, config_.ema_decay,
                         DeriveSeed(config_.seed, "codebook"));
  mel_mean_ = Eigen::VectorXd::Zero(m);
  mel_std_ = Eigen::VectorXd::Ones(m);
  noise_mean_ = Eigen::VectorXd::Zero(m);
  noise_std_ = Eigen::VectorXd::Ones(m);
}

int VQVAEModel::InputRows() const {
  return config_.decoder_context + config_.cond_channels +
         (noise_conditioned() ? config_.noise_channels : 0);
}

int VQVAEModel::SpeakerIndex(const std::string &id) const {
  const auto it = std::find(speakers_.begin(), speakers_.end(), id);
  if (it == speakers_.end()) throw UsageError("unknown speaker \"" + id + "\"");
  return static_cast<int>(it - speakers_.begin());
}

void VQVAEModel::FitNormalization(const std::vector<signal::MelSpectrogram> &speech,
                                  const std::vector<NoiseCondition> &noise) {
  auto fit = [&](const std::vector<const Eigen::MatrixXd *> &mats, Eigen::VectorXd *mean,
                 Eigen::VectorXd *dev) {
    const int m = signal_.mel_bands;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(m), sq = Eigen::VectorXd::Zero(m);
    double count = 0.0;
    for (const Eigen::MatrixXd *f : mats) {
      if (f->cols() != m) throw UsageError("mel band count differs from the model config");
      sum += f->colwise().sum().transpose();
      sq += f->array().square().colwise().sum().matrix().transpose();
      count += static_cast<double>(f->rows());
    }
    if (count == 0.0) return;
    *mean = sum / count;
    const Eigen::VectorXd var = (sq / count).array() - mean->array().square();
    *dev = var.array().max(0.0).sqrt().max(kMinDeviation).matrix();
  };
  std::vector<const Eigen::MatrixXd *> s, n;
  for (const auto &mel : speech) s.push_back(&mel.frames);
  for (const auto &c : noise) n.push_back(&c.features);
  fit(s, &mel_mean_, &mel_std_);
  if (noise_conditioned()) fit(n, &noise_mean_, &noise_std_);
  fitted_ = true;
}

Matrix VQVAEModel::NormalizedMel(const Eigen::MatrixXd &frames, bool noise) const {
  if (frames.cols() != signal_.mel_bands) {
    throw UsageError("mel band count " + std::to_string(frames.cols()) +
                     " differs from the model's " + std::to_string(signal_.mel_bands));
  }
  const Eigen::VectorXd &mean = noise ? noise_mean_ : mel_mean_;
  const Eigen::VectorXd &dev = noise ? noise_std_ : mel_std_;
  return ((frames.rowwise() - mean.transpose()).array().rowwise() / dev.transpose().array())
      .matrix()
      .transpose();
}

Var VQVAEModel::Encode(nn::Binder &bind, const signal::MelSpectrogram &mel) const {
  if (mel.mel_bands != signal_.mel_bands || mel.hop_length != signal_.hop_length) {
    throw UsageError("mel spectrogram config differs from the model's");
  }
  nn::Graph &g = bind.graph();
  const int m = signal_.mel_bands, c = config_.encoder_channels;
  const int f = static_cast<int>(mel.frames.rows());
  Var x = g.Constant(NormalizedMel(mel.frames, false));
  x = nn::Relu(nn::Conv2d(x, bind("enc1/w"), bind("enc1/b"), TimeConv(m, c, f, 3, 1, 1, 1)));
  x = nn::Relu(nn::Conv2d(x, bind("enc2/w"), bind("enc2/b"), TimeConv(c, c, f, 4, 2, 1, 2)));
  const int f2 = (f + 1) / 2;
  return nn::Conv2d(x, bind("enc3/w"), bind("enc3/b"),
                    TimeConv(c, config_.latent_dim, f2, 3, 1, 1, 1));
}

Matrix VQVAEModel::EncodeLatents(const signal::MelSpectrogram &mel) const {
  nn::Graph g;
  nn::Binder bind(&g, &params_);
  return Encode(bind, mel).value();
}

Var VQVAEModel::Condition(nn::Binder &bind, Var z, int speaker, Eigen::Index frames) const {
  if (speaker < 0 || speaker >= static_cast<int>(speakers_.size())) {
    throw UsageError("speaker index out of range");
  }
  if (z.rows() != config_.latent_dim || z.cols() != (frames + 1) / 2) {
    throw UsageError("latent sequence does not match the frame count");
  }
  std::vector<int> up(frames);
  for (Eigen::Index j = 0; j < frames; ++j) up[j] = static_cast<int>(j / 2);
  Var zup = nn::GatherCols(z, up);
  Var spk = nn::GatherCols(bind("speaker/table"), std::vector<int>(frames, speaker));
  Var cat = nn::ConcatRows({zup, spk});
  const int cin = config_.latent_dim + config_.speaker_dim;
  return nn::Tanh(nn::Conv2d(cat, bind("cond/w"), bind("cond/b"),
                             TimeConv(cin, config_.cond_channels, static_cast<int>(frames), 3, 1,
                                      1, 1)));
}

Var VQVAEModel::NoiseFeatures(nn::Binder &bind, const NoiseCondition &noise) const {
  if (!noise_conditioned()) throw UsageError("baseline model takes no noise condition");
  nn::Graph &g = bind.graph();
  Var x = g.Constant(NormalizedMel(noise.features, true));
  Var proj = nn::Tanh(nn::Linear(x, bind("noise/w"), bind("noise/b")));
  return nn::ConcatCols({g.Constant(Matrix::Zero(config_.noise_channels, 1)), proj});
}

Conditioning VQVAEModel::Prepare(const signal::Waveform &speech, int speaker,
                                 const NoiseCondition *noise) const {
  if (noise_conditioned() != (noise != nullptr)) {
    throw UsageError(noise_conditioned() ? "proposed model needs a noise condition"
                                         : "baseline model takes no noise condition");
  }
  const signal::MelSpectrogram mel = signal::LogMel(speech, signal_);
  nn::Graph g;
  nn::Binder bind(&g, &params_);
  const LatentCodes codes = codebook_.Quantize(Encode(bind, mel).value());
  Conditioning out;
  out.frames = Condition(bind, g.Constant(codes.z), speaker, mel.frames.rows()).value();
  if (noise != nullptr) {
    if (noise->num_frames() != mel.frames.rows()) {
      throw UsageError("noise condition frame count differs from the speech");
    }
    out.noise = NoiseFeatures(bind, *noise).value();
  }
  return out;
}

Var VQVAEModel::DecoderLogits(nn::Binder &bind, const std::vector<DecoderSegment> &segments,
                              std::vector<int> *targets) const {
  if (segments.empty()) throw UsageError("DecoderLogits: no segments");
  nn::Graph &g = bind.graph();
  const size_t length = segments[0].length;
  const int batch = static_cast<int>(segments.size());
  const int ctx = config_.decoder_context;
  targets->assign(length * batch, 0);
  std::vector<Var> inputs;
  for (int b = 0; b < batch; ++b) {
    const DecoderSegment &s = segments[b];
    if (s.length != length || length == 0) throw UsageError("segments need one equal length");
    if (s.start + length > s.codes.size()) throw UsageError("segment exceeds its codes");
    if (noise_conditioned() != (s.noise.graph() != nullptr)) {
      throw UsageError("segment noise features must be given iff the model is noise-conditioned");
    }
    const Eigen::Index frames = s.frames.cols();
    Matrix prev(ctx, static_cast<Eigen::Index>(length));
    std::vector<int> cond_idx(length), noise_idx(length);
    for (size_t t = 0; t < length; ++t) {
      const size_t a = s.start + t;
      for (int j = 0; j < ctx; ++j) {
        const long idx = static_cast<long>(a) - ctx + j;
        prev(j, static_cast<Eigen::Index>(t)) = idx < 0 ? 0.0 : PrevValue(s.codes[idx]);
      }
      cond_idx[t] = ConditionFrame(a, frames, signal_);
      noise_idx[t] = NoiseColumn(a, frames, signal_);
      (*targets)[t * batch + b] = s.codes[a];
    }
    std::vector<Var> rows = {g.Constant(std::move(prev)), nn::GatherCols(s.frames, cond_idx)};
    if (noise_conditioned()) {
      if (s.noise.cols() != frames + 1) throw UsageError("noise features misaligned");
      rows.push_back(nn::GatherCols(s.noise, noise_idx));
    }
    inputs.push_back(nn::ConcatRows(rows));
  }
  Var x = nn::InterleaveCols(inputs);
  Var h = nn::Gru(x, bind("rnn/wx"), bind("rnn/wh"), bind("rnn/bx"), bind("rnn/bh"), batch);
  Var fc = nn::Relu(nn::Linear(h, bind("fc/w"), bind("fc/b")));
  return nn::Linear(fc, bind("out/w"), bind("out/b"));
}

DecoderState VQVAEModel::InitialState() const {
  return DecoderState{Eigen::MatrixXd::Zero(config_.rnn_width, 1)};
}

Eigen::VectorXd VQVAEModel::DecoderStep(std::span<const int> prev_codes,
                                        const Eigen::Ref<const Eigen::VectorXd> &cond_frame,
                                        const Eigen::VectorXd *noise_frame,
                                        DecoderState *state) const {
  if (noise_conditioned() != (noise_frame != nullptr)) {
    throw UsageError(noise_conditioned() ? "proposed decoder step needs a noise frame"
                                         : "baseline decoder step takes no noise frame");
  }
  const int ctx = config_.decoder_context;
  if (static_cast<int>(prev_codes.size()) != ctx) {
    throw UsageError("decoder step expects " + std::to_string(ctx) + " previous codes");
  }
  if (cond_frame.size() != config_.cond_channels ||
      (noise_frame && noise_frame->size() != config_.noise_channels)) {
    throw UsageError("decoder step frame sizes differ from the model config");
  }
  Eigen::VectorXd x(InputRows());
  for (int j = 0; j < ctx; ++j) x(j) = PrevValue(prev_codes[j]);
  x.segment(ctx, config_.cond_channels) = cond_frame;
  if (noise_frame) x.tail(config_.noise_channels) = *noise_frame;
  Matrix gx = params_.Get("rnn/wx").value * x;
  gx.col(0) += params_.Get("rnn/bx").value.col(0);
  nn::GruStep(gx, params_.Get("rnn/wh").value, params_.Get("rnn/bh").value, &state->h);
  const Eigen::VectorXd fc =
      (params_.Get("fc/w").value * state->h + params_.Get("fc/b").value).cwiseMax(0.0);
  return params_.Get("out/w").value * fc + params_.Get("out/b").value;
}

std::vector<int> VQVAEModel::Generate(const Conditioning &cond, size_t length,
                                      uint64_t seed) const {
  if (cond.frames.rows() != config_.cond_channels || cond.num_frames() < 1) {
    throw UsageError("conditioning does not match the model");
  }
  if (noise_conditioned() != (cond.noise.size() > 0)) {
    throw UsageError("conditioning noise features must be present iff noise-conditioned");
  }
  const Eigen::Index frames = cond.num_frames();
  const int ctx = config_.decoder_context;
  const Matrix &wx = params_.Get("rnn/wx").value;
  const Matrix &wh = params_.Get("rnn/wh").value;
  const Matrix &bh = params_.Get("rnn/bh").value;
  const Matrix &fc_w = params_.Get("fc/w").value;
  const Matrix &fc_b = params_.Get("fc/b").value;
  const Matrix &out_w = params_.Get("out/w").value;
  const Matrix &out_b = params_.Get("out/b").value;
  const Matrix w_prev = wx.leftCols(ctx);
  // Input gates of the frame-rate inputs change only when a frame index does.
  std::map<std::pair<int, int>, Eigen::VectorXd> static_gates;
  auto gates = [&](int m, int n) -> const Eigen::VectorXd & {
    auto it = static_gates.find({m, n});
    if (it != static_gates.end()) return it->second;
    Eigen::VectorXd v = params_.Get("rnn/bx").value.col(0);
    v.noalias() += wx.middleCols(ctx, config_.cond_channels) * cond.frames.col(m);
    if (noise_conditioned()) {
      v.noalias() += wx.rightCols(config_.noise_channels) * cond.noise.col(n);
    }
    return static_gates.emplace(std::make_pair(m, n), std::move(v)).first->second;
  };

  std::mt19937_64 rng(seed);
  Matrix h = Matrix::Zero(config_.rnn_width, 1);
  std::vector<int> codes(length);
  Eigen::VectorXd prev(ctx);
  for (size_t t = 0; t < length; ++t) {
    for (int j = 0; j < ctx; ++j) {
      const long idx = static_cast<long>(t) - ctx + j;
      prev(j) = idx < 0 ? 0.0 : PrevValue(codes[idx]);
    }
    const int m = ConditionFrame(t, frames, signal_);
    const int n = noise_conditioned() ? NoiseColumn(t, frames, signal_) : 0;
    Matrix gx = gates(m, n);
    gx.noalias() += w_prev * prev;
    nn::GruStep(gx, wh, bh, &h);
    const Eigen::VectorXd fc = (fc_w * h + fc_b).cwiseMax(0.0);
    const Eigen::VectorXd logits = out_w * fc + out_b;
    codes[t] = SampleCategorical(logits, rng);
  }
  return codes;
}

KeyValueConfig VQVAEModel::ConfigSnapshot() const {
  KeyValueConfig kv;
  signal_.Save("signal.", &kv);
  config_.Save("vc.", &kv);
  return kv;
}

nn::Checkpoint VQVAEModel::ToCheckpoint() const {
  nn::Checkpoint ck;
  const std::string text = ConfigSnapshot().Serialize();
  ck.header["kind"] = "vc";
  ck.header["variant"] = VariantName(config_.variant);
  ck.header["config"] = text;
  ck.header["config_hash"] = HashHex(Fnv1a64(text));
  ck.header["speakers"] = speakers_;
  ck.header["trained_steps"] = trained_steps_;
  ck.header["normalization_fitted"] = fitted_;
  ck.ExportParameters(params_, "param/");
  codebook_.Export("codebook/", &ck.tensors);
  ck.tensors["buffer/mel_mean"] = mel_mean_;
  ck.tensors["buffer/mel_std"] = mel_std_;
  ck.tensors["buffer/noise_mean"] = noise_mean_;
  ck.tensors["buffer/noise_std"] = noise_std_;
  return ck;
}

VQVAEModel VQVAEModel::FromCheckpoint(const nn::Checkpoint &ck) {
  if (ck.header.value("kind", "") != "vc") {
    throw DataError("checkpoint is not a vc model (kind \"" + ck.header.value("kind", "") +
                    "\")");
  }
  const KeyValueConfig kv = KeyValueConfig::Parse(ck.header.value("config", ""));
  signal::SignalConfig sig;
  sig.Load("signal.", kv);
  VcConfig cfg;
  cfg.Load("vc.", kv);
  if (!ck.header.contains("speakers") || !ck.header["speakers"].is_array()) {
    throw DataError("vc checkpoint lacks its speaker table");
  }
  VQVAEModel model(cfg, sig, ck.header["speakers"].get<std::vector<std::string>>());
  ck.ImportParameters(&model.params_, "param/");
  model.codebook_.Import("codebook/", ck.tensors);
  const int m = sig.mel_bands;
  auto buffer = [&](const std::string &name, Eigen::VectorXd *out) {
    auto it = ck.tensors.find("buffer/" + name);
    if (it == ck.tensors.end() || it->second.rows() != m || it->second.cols() != 1) {
      throw DataError("vc checkpoint lacks buffer/" + name);
    }
    *out = it->second.col(0);
  };
  buffer("mel_mean", &model.mel_mean_);
  buffer("mel_std", &model.mel_std_);
  buffer("noise_mean", &model.noise_mean_);
  buffer("noise_std", &model.noise_std_);
  model.fitted_ = ck.header.value("normalization_fitted", false);
  model.trained_steps_ = ck.header.value("trained_steps", 0L);
  return model;
}

void VQVAEModel::Save(const std::filesystem::path &path) const { ToCheckpoint().Save(path); }

VQVAEModel VQVAEModel::Load(const std::filesystem::path &path) {
  return FromCheckpoint(nn::Checkpoint::Load(path));
}

}  // namespace n2n::vc
