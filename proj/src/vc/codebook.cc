// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "n2n/vc/codebook.h"

#include <cmath>
#include <limits>
#include <numeric>

#include "n2n/common/error.h"
#include "n2n/nn/ops.h"

namespace n2n::vc {
namespace {

constexpr double kLaplace = 1e-5;

}  // namespace

VQCodebook::VQCodebook(int entries, int dim, double beta, double decay, uint64_t seed)
    : beta_(beta), decay_(decay) {
  if (entries < 1 || dim < 1) throw UsageError("codebook needs entries >= 1 and dim >= 1");
  if (!(decay >= 0.0 && decay < 1.0)) throw UsageError("codebook decay must be in [0, 1)");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  embeddings_.resize(dim, entries);
  for (Eigen::Index i = 0; i < embeddings_.size(); ++i) embeddings_(i) = dist(rng);
  cluster_size_ = Eigen::VectorXd::Ones(entries);
  embed_sum_ = embeddings_;
  usage_.assign(entries, 0);
}

int VQCodebook::Nearest(const Eigen::Ref<const Eigen::VectorXd> &e) const {
  if (e.size() != embeddings_.rows()) {
    throw UsageError("quantize: latent dim " + std::to_string(e.size()) + " != codebook dim " +
                     std::to_string(embeddings_.rows()));
  }
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < embeddings_.cols(); ++k) {
    const double dist = (embeddings_.col(k) - e).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = static_cast<int>(k);
    }
  }
  return best;
}

LatentCodes VQCodebook::Quantize(const nn::Matrix &latents) const {
  if (latents.rows() != embeddings_.rows()) {
    throw UsageError("quantize: latent dim " + std::to_string(latents.rows()) +
                     " != codebook dim " + std::to_string(embeddings_.rows()));
  }
  LatentCodes out;
  out.indices.resize(latents.cols());
  out.z.resize(latents.rows(), latents.cols());
  for (Eigen::Index f = 0; f < latents.cols(); ++f) {
    out.indices[f] = Nearest(latents.col(f));
    out.z.col(f) = embeddings_.col(out.indices[f]);
  }
  if (latents.size() > 0) {
    const double mse = (latents - out.z).squaredNorm() / static_cast<double>(latents.size());
    out.codebook_loss = mse;
    out.commitment_loss = beta_ * mse;
  }
  return out;
}

nn::Var VQCodebook::QuantizeStraightThrough(nn::Var latents, LatentCodes *codes,
                                            nn::Var *commitment) const {
  *codes = Quantize(latents.value());
  nn::Graph &g = *latents.graph();
  *commitment =
      nn::Scale(nn::MeanSquare(nn::Sub(latents, g.Constant(codes->z))), beta_);
  return nn::StraightThrough(latents, codes->z);
}

void VQCodebook::EmaUpdate(const nn::Matrix &latents, const std::vector<int> &indices,
                           double dead_threshold, std::mt19937_64 &rng) {
  const int k_entries = entries();
  if (static_cast<Eigen::Index>(indices.size()) != latents.cols()) {
    throw UsageError("EmaUpdate: index count differs from latent count");
  }
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(k_entries);
  nn::Matrix sums = nn::Matrix::Zero(dim(), k_entries);
  for (size_t f = 0; f < indices.size(); ++f) {
    counts(indices[f]) += 1.0;
    sums.col(indices[f]) += latents.col(static_cast<Eigen::Index>(f));
  }
  cluster_size_ = decay_ * cluster_size_ + (1.0 - decay_) * counts;
  embed_sum_ = decay_ * embed_sum_ + (1.0 - decay_) * sums;
  const double n = cluster_size_.sum();
  for (int k = 0; k < k_entries; ++k) {
    const double smoothed = (cluster_size_(k) + kLaplace) / (n + k_entries * kLaplace) * n;
    embeddings_.col(k) = embed_sum_.col(k) / smoothed;
  }
  if (latents.cols() == 0) return;
  for (int k = 0; k < k_entries; ++k) {
    if (cluster_size_(k) >= dead_threshold) continue;
    const auto pick = static_cast<Eigen::Index>(rng() % static_cast<uint64_t>(latents.cols()));
    embeddings_.col(k) = latents.col(pick);
    embed_sum_.col(k) = latents.col(pick);
    cluster_size_(k) = 1.0;
  }
}

void VQCodebook::RecordUsage(const std::vector<int> &indices) {
  for (int i : indices) {
    if (i < 0 || i >= entries()) throw UsageError("RecordUsage: index out of range");
    ++usage_[i];
  }
}

void VQCodebook::ResetUsage() { usage_.assign(entries(), 0); }

int64_t VQCodebook::total_usage() const {
  return std::accumulate(usage_.begin(), usage_.end(), int64_t{0});
}

int VQCodebook::used_entries() const {
  int used = 0;
  for (int64_t u : usage_) used += u > 0;
  return used;
}

void VQCodebook::set_embeddings(const nn::Matrix &embeddings) {
  if (embeddings.rows() != embeddings_.rows() || embeddings.cols() != embeddings_.cols()) {
    throw UsageError("set_embeddings: shape mismatch");
  }
  embeddings_ = embeddings;
  embed_sum_ = embeddings;
  cluster_size_.setOnes();
}

void VQCodebook::Export(const std::string &prefix,
                        std::map<std::string, nn::Matrix> *out) const {
  (*out)[prefix + "embed"] = embeddings_;
  (*out)[prefix + "cluster_size"] = cluster_size_;
  (*out)[prefix + "embed_sum"] = embed_sum_;
  nn::Matrix usage(1, entries());
  for (int k = 0; k < entries(); ++k) usage(0, k) = static_cast<double>(usage_[k]);
  (*out)[prefix + "usage"] = usage;
}

void VQCodebook::Import(const std::string &prefix,
                        const std::map<std::string, nn::Matrix> &in) {
  auto get = [&](const std::string &name, Eigen::Index rows, Eigen::Index cols) {
    auto it = in.find(prefix + name);
    if (it == in.end()) throw DataError("checkpoint lacks " + prefix + name);
    if (it->second.rows() != rows || it->second.cols() != cols) {
      throw DataError("checkpoint tensor " + prefix + name + " has the wrong shape");
    }
    return it->second;
  };
  embeddings_ = get("embed", dim(), entries());
  cluster_size_ = get("cluster_size", entries(), 1);
  embed_sum_ = get("embed_sum", dim(), entries());
  const nn::Matrix usage = get("usage", 1, entries());
  for (int k = 0; k < entries(); ++k) usage_[k] = static_cast<int64_t>(usage(0, k));
}

}  // namespace n2n::vc
