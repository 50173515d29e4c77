// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_VC_VQVAE_H_
#define N2N_VC_VQVAE_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "n2n/common/config.h"
#include "n2n/nn/checkpoint.h"
#include "n2n/nn/graph.h"
#include "n2n/signal/signal_config.h"
#include "n2n/signal/spectral.h"
#include "n2n/signal/waveform.h"
#include "n2n/vc/codebook.h"

namespace n2n::vc {

enum class Variant {
  kBaseline,          // models the denoised speech d
  kNoiseConditioned,  // models the noisy speech y given the separated noise n
};

// "baseline" or "proposed".
std::string VariantName(Variant v);
// Accepts "baseline", "proposed" and "noise_conditioned".
Variant ParseVariant(const std::string &name);

struct VcConfig {
  Variant variant = Variant::kNoiseConditioned;
  int encoder_channels = 64;
  int latent_dim = 32;
  int codebook_size = 64;
  double commitment = 0.25;
  double ema_decay = 0.99;
  int speaker_dim = 16;
  int cond_channels = 64;
  int noise_channels = 32;
  // Number of previous samples fed to each decoder step.
  int decoder_context = 1;
  int rnn_width = 128;
  int fc_width = 128;
  double output_init_scale = 0.1;
  uint64_t seed = 1;

  void Validate() const;
  void Save(const std::string &prefix, KeyValueConfig *kv) const;
  void Load(const std::string &prefix, const KeyValueConfig &kv);
  friend bool operator==(const VcConfig &, const VcConfig &) = default;
};

// Frame-level log-mel of the separated noise. A zero sequence is the
// analysis of an all-zero waveform, so every entry sits at the log floor.
struct NoiseCondition {
  Eigen::MatrixXd features;  // F x M
  bool zero_sequence = false;
  Eigen::Index num_frames() const { return features.rows(); }
};

NoiseCondition MakeNoiseCondition(const signal::Waveform &n, const signal::SignalConfig &config);
NoiseCondition ZeroNoiseCondition(size_t length, const signal::SignalConfig &config);

// Per-utterance decoder inputs at frame rate.
struct Conditioning {
  nn::Matrix frames;  // cond_channels x F
  // noise_channels x (F + 1); column 0 is the pad read before the first
  // noise frame is complete. Empty for the baseline variant.
  nn::Matrix noise;
  Eigen::Index num_frames() const { return frames.cols(); }
};

struct DecoderState {
  Eigen::MatrixXd h;  // rnn_width x 1
};

// One teacher-forced training segment.
struct DecoderSegment {
  nn::Var frames;  // cond_channels x F
  nn::Var noise;   // noise_channels x (F + 1), unset for the baseline
  std::span<const int> codes;  // full-utterance target codes
  size_t start = 0;
  size_t length = 0;
};

// The frame of z conditioning read by sample t.
int ConditionFrame(size_t t, Eigen::Index frames, const signal::SignalConfig &config);
// Column of Conditioning::noise read by sample t: the last noise frame whose
// span ends at or before t (1-based), or the pad column 0.
int NoiseColumn(size_t t, Eigen::Index frames, const signal::SignalConfig &config);

// Code sequence the decoder is trained to produce: mu-law codes of d for the
// baseline and of y = d + n for the noise-conditioned variant.
std::vector<int> TrainingTargets(Variant variant, const signal::Waveform &y,
                                 const signal::Waveform &d);

// VQ-VAE: mel encoder, EMA vector quantizer, speaker table, conditioning
// stack and a GRU decoder over mu-law classes.
class VQVAEModel {
 public:
  VQVAEModel(VcConfig config, signal::SignalConfig signal_config,
             std::vector<std::string> speakers);

  const VcConfig &config() const { return config_; }
  const signal::SignalConfig &signal_config() const { return signal_; }
  Variant variant() const { return config_.variant; }
  bool noise_conditioned() const { return config_.variant == Variant::kNoiseConditioned; }

  const std::vector<std::string> &speakers() const { return speakers_; }
  // Throws UsageError for ids not in the table.
  int SpeakerIndex(const std::string &id) const;

  // Mean and deviation of every log-mel band, for speech and noise inputs.
  void FitNormalization(const std::vector<signal::MelSpectrogram> &speech,
                        const std::vector<NoiseCondition> &noise);
  bool normalization_fitted() const { return fitted_; }

  // Latents (latent_dim x ceil(F / 2)) for a log-mel of F frames.
  nn::Var Encode(nn::Binder &bind, const signal::MelSpectrogram &mel) const;
  nn::Matrix EncodeLatents(const signal::MelSpectrogram &mel) const;
  LatentCodes Quantize(const nn::Matrix &latents) const { return codebook_.Quantize(latents); }

  // Upsampled (z, speaker) conditioning, cond_channels x frames.
  nn::Var Condition(nn::Binder &bind, nn::Var z, int speaker, Eigen::Index frames) const;
  // Projected noise features with the leading pad column.
  nn::Var NoiseFeatures(nn::Binder &bind, const NoiseCondition &noise) const;

  // Full inference conditioning: z from the mel of `speech`, the speaker
  // embedding and, for the noise-conditioned variant, `noise`.
  Conditioning Prepare(const signal::Waveform &speech, int speaker,
                       const NoiseCondition *noise) const;

  // Logits (levels x sum of lengths) for teacher-forced segments, batch
  // interleaved: column t * B + b is step t of segment b. Segments must
  // have equal lengths. `targets` receives the matching classes.
  nn::Var DecoderLogits(nn::Binder &bind, const std::vector<DecoderSegment> &segments,
                        std::vector<int> *targets) const;

  DecoderState InitialState() const;
  // One autoregressive step. `prev_codes` holds the last decoder_context
  // codes, oldest first. `noise_frame` must be given iff the variant is
  // noise-conditioned.
  Eigen::VectorXd DecoderStep(std::span<const int> prev_codes,
                              const Eigen::Ref<const Eigen::VectorXd> &cond_frame,
                              const Eigen::VectorXd *noise_frame, DecoderState *state) const;

  // Samples `length` codes at temperature 1 from a seeded generator.
  std::vector<int> Generate(const Conditioning &cond, size_t length, uint64_t seed) const;

  nn::ParameterStore &params() { return params_; }
  const nn::ParameterStore &params() const { return params_; }
  VQCodebook &codebook() { return codebook_; }
  const VQCodebook &codebook() const { return codebook_; }

  long trained_steps() const { return trained_steps_; }
  void set_trained_steps(long steps) { trained_steps_ = steps; }

  KeyValueConfig ConfigSnapshot() const;
  nn::Checkpoint ToCheckpoint() const;
  static VQVAEModel FromCheckpoint(const nn::Checkpoint &ck);
  void Save(const std::filesystem::path &path) const;
  static VQVAEModel Load(const std::filesystem::path &path);

 private:
  void Init();
  nn::Matrix NormalizedMel(const Eigen::MatrixXd &frames, bool noise) const;
  int InputRows() const;

  VcConfig config_;
  signal::SignalConfig signal_;
  std::vector<std::string> speakers_;
  nn::ParameterStore params_;
  VQCodebook codebook_;
  Eigen::VectorXd mel_mean_, mel_std_, noise_mean_, noise_std_;
  bool fitted_ = false;
  long trained_steps_ = 0;
};

}  // namespace n2n::vc

#endif  // N2N_VC_VQVAE_H_
