// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_VC_CODEBOOK_H_
#define N2N_VC_CODEBOOK_H_

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "n2n/nn/graph.h"

namespace n2n::vc {

// Indices plus quantized vectors for a latent sequence (dim x F).
struct LatentCodes {
  std::vector<int> indices;
  nn::Matrix z;
  // ||sg(e) - q||^2 and beta * ||e - sg(q)||^2, both averaged per element.
  double codebook_loss = 0.0;
  double commitment_loss = 0.0;
};

// K x dim vector quantizer with an exponential-moving-average codebook.
class VQCodebook {
 public:
  VQCodebook() = default;
  VQCodebook(int entries, int dim, double beta, double decay, uint64_t seed);

  int entries() const { return static_cast<int>(embeddings_.cols()); }
  int dim() const { return static_cast<int>(embeddings_.rows()); }
  double beta() const { return beta_; }

  // Nearest entry by squared Euclidean distance; ties go to the lower index.
  int Nearest(const Eigen::Ref<const Eigen::VectorXd> &e) const;
  LatentCodes Quantize(const nn::Matrix &latents) const;

  // Differentiable quantization: the result has the value of `codes.z` and
  // passes its gradient straight to `latents`. Also returns the commitment
  // term beta * mean((e - sg(q))^2).
  nn::Var QuantizeStraightThrough(nn::Var latents, LatentCodes *codes,
                                  nn::Var *commitment) const;

  // Moves assigned entries toward the mean of their latents. Entries whose
  // smoothed count falls below `dead_threshold` are restarted on a random
  // latent from `latents`.
  void EmaUpdate(const nn::Matrix &latents, const std::vector<int> &indices,
                 double dead_threshold, std::mt19937_64 &rng);

  void RecordUsage(const std::vector<int> &indices);
  void ResetUsage();
  const std::vector<int64_t> &usage() const { return usage_; }
  int64_t total_usage() const;
  int used_entries() const;

  const nn::Matrix &embeddings() const { return embeddings_; }  // dim x K
  void set_embeddings(const nn::Matrix &embeddings);

  // Tensors "<prefix>embed", "<prefix>cluster_size", "<prefix>embed_sum",
  // "<prefix>usage".
  void Export(const std::string &prefix, std::map<std::string, nn::Matrix> *out) const;
  void Import(const std::string &prefix, const std::map<std::string, nn::Matrix> &in);


 private:
  nn::Matrix embeddings_;
  Eigen::VectorXd cluster_size_;
  nn::Matrix embed_sum_;
  std::vector<int64_t> usage_;
  double beta_ = 0.25;
  double decay_ = 0.99;
};

}  // namespace n2n::vc

#endif  // N2N_VC_CODEBOOK_H_
