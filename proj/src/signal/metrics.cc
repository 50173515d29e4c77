// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "n2n/signal/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "n2n/common/error.h"

namespace n2n::signal {
namespace {

constexpr double kDbPerNeper = 10.0 / std::numbers::ln10;

// Mean-removed copies plus the inner products every ratio needs.
struct Centered {
  std::vector<double> e, r;
  double er = 0.0, rr = 0.0;
};

Centered Center(std::span<const double> estimate,
                std::span<const double> reference, const char *what) {
  if (estimate.size() != reference.size()) {
    throw DataError(std::string(what) + ": estimate and reference lengths differ");
  }
  if (reference.empty()) throw DataError(std::string(what) + ": empty input");
  Centered c;
  const double n = static_cast<double>(reference.size());
  double me = 0.0, mr = 0.0;
  for (size_t i = 0; i < reference.size(); ++i) {
    me += estimate[i];
    mr += reference[i];
  }
  me /= n;
  mr /= n;
  c.e.resize(reference.size());
  c.r.resize(reference.size());
  for (size_t i = 0; i < reference.size(); ++i) {
    c.e[i] = estimate[i] - me;
    c.r[i] = reference[i] - mr;
    c.er += c.e[i] * c.r[i];
    c.rr += c.r[i] * c.r[i];
  }
  if (c.rr <= 0.0) throw DataError(std::string(what) + ": zero reference");
  return c;
}

enum class Kind { kScaleInvariant, kScaleDependent };

// Uncapped ratio in dB and, optionally, its gradient w.r.t. the raw estimate.
double RatioDb(const Centered &c, Kind kind, std::vector<double> *grad) {
  const double alpha = c.er / c.rr;
  const double num = alpha * c.er;  // |alpha r|^2
  double den = 0.0;
  for (size_t i = 0; i < c.e.size(); ++i) {
    const double diff = kind == Kind::kScaleInvariant ? alpha * c.r[i] - c.e[i]
                                                      : c.e[i] - c.r[i];
    den += diff * diff;
  }
  const double ratio = num / (den + kMetricEpsilon);
  const double db = kDbPerNeper * std::log(ratio + kMetricEpsilon);
  if (grad) {
    const size_t n = c.e.size();
    grad->assign(n, 0.0);
    const double scale = kDbPerNeper / (ratio + kMetricEpsilon);
    const double dd = den + kMetricEpsilon;
    double mean = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double dnum = 2.0 * alpha * c.r[i];
      const double dden = kind == Kind::kScaleInvariant
                              ? 2.0 * (c.e[i] - alpha * c.r[i])
                              : 2.0 * (c.e[i] - c.r[i]);
      (*grad)[i] = scale * (dnum * dd - num * dden) / (dd * dd);
      mean += (*grad)[i];
    }
    // Back through the mean removal.
    mean /= static_cast<double>(n);
    for (double &g : *grad) g -= mean;
  }
  return db;
}

LossWithGradient NegativeLoss(const Centered &c, Kind kind) {
  LossWithGradient out;
  const double db = RatioDb(c, kind, &out.gradient);
  out.loss = -db;
  if (out.loss <= -kMetricCapDb) {
    out.loss = -kMetricCapDb;
    std::fill(out.gradient.begin(), out.gradient.end(), 0.0);
  } else {
    for (double &g : out.gradient) g = -g;
  }
  return out;
}

}  // namespace

double SiSnr(std::span<const double> estimate, std::span<const double> reference) {
  const Centered c = Center(estimate, reference, "si_snr");
  return std::clamp(RatioDb(c, Kind::kScaleInvariant, nullptr), -kMetricCapDb,
                    kMetricCapDb);
}

double SdSdr(std::span<const double> estimate, std::span<const double> reference) {
  const Centered c = Center(estimate, reference, "sd_sdr");
  return std::clamp(RatioDb(c, Kind::kScaleDependent, nullptr), -kMetricCapDb,
                    kMetricCapDb);
}

LossWithGradient SdSdrLoss(std::span<const double> estimate,
                           std::span<const double> reference) {
  return NegativeLoss(Center(estimate, reference, "sd_sdr_loss"),
                      Kind::kScaleDependent);
}

LossWithGradient SiSnrLoss(std::span<const double> estimate,
                           std::span<const double> reference) {
  return NegativeLoss(Center(estimate, reference, "si_snr_loss"),
                      Kind::kScaleInvariant);
}

double FrameMcd(const Eigen::Ref<const Eigen::RowVectorXd> &a,
                const Eigen::Ref<const Eigen::RowVectorXd> &b) {
  return kDbPerNeper * std::sqrt(2.0 * (a - b).squaredNorm());
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> DtwPath(
    const Eigen::MatrixXd &a, const Eigen::MatrixXd &b) {
  const Eigen::Index n = a.rows(), m = b.rows();
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd cost(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) cost(i, j) = (a.row(i) - b.row(j)).norm();
  }
  Eigen::MatrixXd acc = Eigen::MatrixXd::Constant(n, m, inf);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      double best = (i == 0 && j == 0) ? 0.0 : inf;
      if (i > 0 && j > 0) best = std::min(best, acc(i - 1, j - 1));
      if (i > 0) best = std::min(best, acc(i - 1, j));
      if (j > 0) best = std::min(best, acc(i, j - 1));
      acc(i, j) = best + cost(i, j);
    }
  }
  // Backtrack preferring the diagonal on ties.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> path;
  Eigen::Index i = n - 1, j = m - 1;
  path.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const double diag = acc(i - 1, j - 1), up = acc(i - 1, j),
                   left = acc(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    } else if (i > 0) {
      --i;
    } else {
      --j;
    }
    path.emplace_back(i, j);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

double Mcd(const CepstralSequence &reference, const CepstralSequence &estimate) {
  if (reference.num_frames() == 0 || estimate.num_frames() == 0) {
    throw DataError("mcd: empty cepstral sequence");
  }
  if (reference.order() != estimate.order()) {
    throw DataError("mcd: cepstral orders differ (" +
                    std::to_string(reference.order()) + " vs " +
                    std::to_string(estimate.order()) + ")");
  }
  if (reference.includes_c0 || estimate.includes_c0) {
    throw DataError("mcd: c0 must be excluded");
  }
  const auto path = DtwPath(reference.frames, estimate.frames);
  double total = 0.0;
  for (const auto &[i, j] : path) {
    total += FrameMcd(reference.frames.row(i), estimate.frames.row(j));
  }
  return total / static_cast<double>(path.size());
}

}  // namespace n2n::signal
