// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "n2n/denoiser/denoiser.h"

#include <cmath>
#include <random>

#include "n2n/common/error.h"
#include "n2n/nn/ops.h"
#include "n2n/signal/spectral.h"

namespace n2n::denoiser {
namespace {

using nn::Matrix;
using nn::Var;

std::string JoinInts(const std::vector<int> &v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string Layer(const char *kind, int l) { return std::string(kind) + std::to_string(l) + "/"; }

int PaddingFreq(const DenoiserConfig &c) { return c.kernel_freq / 2; }

// Frequency sizes through the encoder, h[0] = bins.
std::vector<int> Heights(const DenoiserConfig &c, int bins) {
  std::vector<int> h = {bins};
  for (size_t l = 0; l < c.encoder_channels.size(); ++l) {
    h.push_back((h.back() + 2 * PaddingFreq(c) - c.kernel_freq) / c.stride_freq + 1);
  }
  return h;
}

nn::ConvGeometry EncoderGeometry(const DenoiserConfig &c, int cin, int cout, int height,
                                 int width) {
  nn::ConvGeometry g;
  g.in_channels = cin;
  g.out_channels = cout;
  g.height = height;
  g.width = width;
  g.kernel_h = c.kernel_freq;
  g.kernel_w = c.kernel_time;
  g.stride_h = c.stride_freq;
  g.pad_top = g.pad_bottom = PaddingFreq(c);
  g.pad_left = c.kernel_time - 1;  // causal in time
  return g;
}

// Forward geometry whose adjoint maps (src, h_in) -> (dst, h_out).
nn::ConvGeometry DecoderGeometry(const DenoiserConfig &c, int src, int dst, int height,
                                 int width) {
  nn::ConvGeometry g;
  g.in_channels = dst;
  g.out_channels = src;
  g.height = height;
  g.width = width;
  g.kernel_h = c.kernel_freq;
  g.stride_h = c.stride_freq;
  g.pad_top = g.pad_bottom = PaddingFreq(c);
  return g;
}

Var Re(Var x, int c) { return nn::SliceRows(x, 0, c); }
Var Im(Var x, int c) { return nn::SliceRows(x, c, c); }

Var ComplexLeaky(Var x, double slope) { return nn::LeakyRelu(x, slope); }

}  // namespace

void DenoiserConfig::Validate() const {
  if (encoder_channels.empty()) throw UsageError("denoiser needs at least one encoder layer");
  for (int c : encoder_channels) {
    if (c < 1) throw UsageError("denoiser channel widths must be positive");
  }
  if (kernel_freq < 1 || kernel_time < 1 || stride_freq < 1) {
    throw UsageError("denoiser kernel and stride must be positive");
  }
  if (rnn_width < 1) throw UsageError("denoiser rnn_width must be positive");
  if (!(head_init_scale >= 0.0)) throw UsageError("head_init_scale must be >= 0");
  if (!std::isfinite(head_bias_init)) throw UsageError("head_bias_init must be finite");
}

void DenoiserConfig::Save(const std::string &p, KeyValueConfig *kv) const {
  kv->Set(p + "encoder_channels", JoinInts(encoder_channels));
  kv->Set(p + "kernel_freq", kernel_freq);
  kv->Set(p + "kernel_time", kernel_time);
  kv->Set(p + "stride_freq", stride_freq);
  kv->Set(p + "rnn_width", rnn_width);
  kv->Set(p + "leaky_slope", leaky_slope);
  kv->Set(p + "head_init_scale", head_init_scale);
  kv->Set(p + "head_bias_init", head_bias_init);
  kv->Set(p + "zero_mask_head", zero_mask_head);
  kv->Set(p + "seed", static_cast<int64_t>(seed));
}

void DenoiserConfig::Load(const std::string &p, const KeyValueConfig &kv) {
  if (kv.Has(p + "encoder_channels")) {
    std::string text;
    kv.Get(p + "encoder_channels", &text);
    encoder_channels.clear();
    for (double v : ParseNumberList(text)) {
      if (v != std::floor(v)) throw UsageError(p + "encoder_channels must be integers");
      encoder_channels.push_back(static_cast<int>(v));
    }
  }
  kv.Get(p + "kernel_freq", &kernel_freq);
  kv.Get(p + "kernel_time", &kernel_time);
  kv.Get(p + "stride_freq", &stride_freq);
  kv.Get(p + "rnn_width", &rnn_width);
  kv.Get(p + "leaky_slope", &leaky_slope);
  kv.Get(p + "head_init_scale", &head_init_scale);
  kv.Get(p + "head_bias_init", &head_bias_init);
  kv.Get(p + "zero_mask_head", &zero_mask_head);
  kv.Get(p + "seed", &seed);
  Validate();
}

SeparationResult Separate(const signal::Waveform &y, const signal::Waveform &d) {
  signal::CheckSameRate(y, d, "separate");
  signal::CheckSameLength(y, d, "separate");
  return SeparationResult{y, d, y - d};
}

DenoiserModel::DenoiserModel(DenoiserConfig config, signal::SignalConfig signal_config)
    : config_(std::move(config)), signal_(signal_config) {
  config_.Validate();
  signal_.Validate();
  if (signal_.fft_size != signal_.frame_length) {
    throw UsageError("denoiser requires fft_size == frame_length");
  }
  Init();
}

void DenoiserModel::Init() {
  std::mt19937_64 rng(config_.seed);
  const auto &ch = config_.encoder_channels;
  const int layers = static_cast<int>(ch.size());
  const int kf = config_.kernel_freq, kt = config_.kernel_time;
  auto add_complex = [&](const std::string &p, int rows, int cols, int bias_rows, double scale) {
    params_.Add(p + "wr", rows, cols, scale, rng);
    params_.Add(p + "wi", rows, cols, scale, rng);
    params_.AddZeros(p + "br", bias_rows, 1);
    params_.AddZeros(p + "bi", bias_rows, 1);
  };
  for (int l = 0; l < layers; ++l) {
    const int cin = l == 0 ? 1 : ch[l - 1];
    const int fan_in = 2 * cin * kf * kt;
    add_complex(Layer("enc", l), ch[l], cin * kf * kt, ch[l], std::sqrt(3.0 / fan_in));
  }
  const std::vector<int> h = Heights(config_, signal_.num_bins());
  const int flat = ch.back() * h.back();
  const int hidden = config_.rnn_width;
  const double rnn_scale = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (const char *part : {"rnn_r/", "rnn_i/"}) {
    const std::string p = part;
    params_.Add(p + "wx", 3 * hidden, flat, rnn_scale, rng);
    params_.Add(p + "wh", 3 * hidden, hidden, rnn_scale, rng);
    params_.Add(p + "bx", 3 * hidden, 1, rnn_scale, rng);
    params_.Add(p + "bh", 3 * hidden, 1, rnn_scale, rng);
  }
  add_complex("rnn_out/", flat, hidden, flat, std::sqrt(3.0 / (2.0 * hidden)));
  for (int l = layers - 1; l >= 0; --l) {
    const int src = 2 * ch[l];
    const int dst = l == 0 ? 1 : ch[l - 1];
    const int fan_in = 2 * src * kf;
    double scale = std::sqrt(3.0 / fan_in);
    if (l == 0) scale *= config_.zero_mask_head ? 0.0 : config_.head_init_scale;
    add_complex(Layer("dec", l), src, dst * kf, dst, scale);
  }
  if (!config_.zero_mask_head) {
    params_.Get(Layer("dec", 0) + "br").value.setConstant(config_.head_bias_init);
  }
}

Var DenoiserModel::Forward(nn::Binder &bind, std::span<const double> y) const {
  if (y.size() < min_length()) {
    throw DataError("denoiser input shorter than one frame (" + std::to_string(y.size()) +
                    " < " + std::to_string(min_length()) + " samples)");
  }
  nn::Graph &g = bind.graph();
  const signal::ComplexSpectrogram spec = signal::Stft(y, signal_, signal::StftPadding::kFull);
  const int width = static_cast<int>(spec.num_frames());
  const Eigen::Index cells = spec.re.size();
  Matrix stacked(2, cells);
  stacked.row(0) = Eigen::Map<const Eigen::RowVectorXd>(spec.re.data(), cells);
  stacked.row(1) = Eigen::Map<const Eigen::RowVectorXd>(spec.im.data(), cells);
  const double input_scale = 1.0 / std::sqrt(signal::HannWindow(signal_.frame_length).squaredNorm());

  const auto &ch = config_.encoder_channels;
  const int layers = static_cast<int>(ch.size());
  const std::vector<int> h = Heights(config_, signal_.num_bins());
  auto complex_params = [&](const std::string &p) {
    return std::array<Var, 4>{bind(p + "wr"), bind(p + "wi"), bind(p + "br"), bind(p + "bi")};
  };

  Var x = g.Constant(stacked * input_scale);
  std::vector<Var> skips;
  for (int l = 0; l < layers; ++l) {
    const int cin = l == 0 ? 1 : ch[l - 1];
    const auto w = complex_params(Layer("enc", l));
    x = nn::ComplexConv2d(x, w[0], w[1], w[2], w[3],
                          EncoderGeometry(config_, cin, ch[l], h[l], width));
    x = ComplexLeaky(x, config_.leaky_slope);
    skips.push_back(x);
  }

  const int c_last = ch.back(), h_last = h.back();
  Var seq_r = nn::SpatialToSequence(Re(x, c_last), c_last, h_last, width);
  Var seq_i = nn::SpatialToSequence(Im(x, c_last), c_last, h_last, width);
  Var both = nn::InterleaveCols({seq_r, seq_i});
  auto gru = [&](const std::string &p) {
    return nn::Gru(both, bind(p + "wx"), bind(p + "wh"), bind(p + "bx"), bind(p + "bh"), 2);
  };
  Var hr = gru("rnn_r/"), hi = gru("rnn_i/");
  Var out_r = nn::Sub(nn::DeinterleaveCols(hr, 2, 0), nn::DeinterleaveCols(hi, 2, 1));
  Var out_i = nn::Add(nn::DeinterleaveCols(hr, 2, 1), nn::DeinterleaveCols(hi, 2, 0));
  const auto lin = complex_params("rnn_out/");
  Var zr = nn::AddBias(nn::Sub(nn::MatMul(lin[0], out_r), nn::MatMul(lin[1], out_i)), lin[2]);
  Var zi = nn::AddBias(nn::Add(nn::MatMul(lin[1], out_r), nn::MatMul(lin[0], out_i)), lin[3]);
  x = nn::ConcatRows({nn::SequenceToSpatial(zr, c_last, h_last, width),
                      nn::SequenceToSpatial(zi, c_last, h_last, width)});

  for (int l = layers - 1; l >= 0; --l) {
    const int prev = ch[l];
    const Var skip = skips[l];
    Var cat = nn::ConcatRows({Re(x, prev), Re(skip, ch[l]), Im(x, prev), Im(skip, ch[l])});
    const int dst = l == 0 ? 1 : ch[l - 1];
    const auto w = complex_params(Layer("dec", l));
    x = nn::ComplexConvTranspose2d(cat, w[0], w[1], w[2], w[3],
                                   DecoderGeometry(config_, 2 * ch[l], dst, h[l], width));
    if (l > 0) x = ComplexLeaky(x, config_.leaky_slope);
  }
  Var masked = nn::BoundedComplexMask(x, stacked);
  return nn::Istft(masked, signal_, y.size());
}

signal::Waveform DenoiserModel::Denoise(const signal::Waveform &y) const {
  if (y.sample_rate() != signal_.sample_rate) {
    throw DataError("denoiser expects " + std::to_string(signal_.sample_rate) +
                    " Hz input, got " + std::to_string(y.sample_rate()) + " Hz");
  }
  nn::Graph g;
  nn::Binder bind(&g, &params_);
  const Var d = Forward(bind, y.samples());
  const Matrix &v = d.value();
  return signal::Waveform(std::vector<double>(v.data(), v.data() + v.size()), y.sample_rate());
}

SeparationResult DenoiserModel::Separate(const signal::Waveform &y) const {
  return denoiser::Separate(y, Denoise(y));
}

KeyValueConfig DenoiserModel::ConfigSnapshot() const {
  KeyValueConfig kv;
  signal_.Save("signal.", &kv);
  config_.Save("denoiser.", &kv);
  return kv;
}

nn::Checkpoint DenoiserModel::ToCheckpoint() const {
  nn::Checkpoint ck;
  const std::string text = ConfigSnapshot().Serialize();
  ck.header["kind"] = "denoiser";
  ck.header["config"] = text;
  ck.header["config_hash"] = HashHex(Fnv1a64(text));
  ck.header["trained_steps"] = trained_steps_;
  ck.ExportParameters(params_, "param/");
  return ck;
}

DenoiserModel DenoiserModel::FromCheckpoint(const nn::Checkpoint &ck) {
  if (ck.header.value("kind", "") != "denoiser") {
    throw DataError("checkpoint is not a denoiser (kind \"" + ck.header.value("kind", "") +
                    "\")");
  }
  const KeyValueConfig kv = KeyValueConfig::Parse(ck.header.value("config", ""));
  signal::SignalConfig sig;
  sig.Load("signal.", kv);
  DenoiserConfig cfg;
  cfg.Load("denoiser.", kv);
  DenoiserModel model(cfg, sig);
  ck.ImportParameters(&model.params_, "param/");
  model.trained_steps_ = ck.header.value("trained_steps", 0L);
  return model;
}

void DenoiserModel::Save(const std::filesystem::path &path) const { ToCheckpoint().Save(path); }

DenoiserModel DenoiserModel::Load(const std::filesystem::path &path) {
  return FromCheckpoint(nn::Checkpoint::Load(path));
}

}  // namespace n2n::denoiser
