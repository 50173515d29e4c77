// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "n2n/nn/optimizer.h"

#include <cmath>

#include "n2n/common/error.h"

namespace n2n::nn {

Adam::Adam(ParameterStore *params, AdamConfig config)
    : params_(params), config_(config) {
  for (const auto &[name, p] : params_->all()) {
    m_[name] = Matrix::Zero(p.value.rows(), p.value.cols());
    v_[name] = Matrix::Zero(p.value.rows(), p.value.cols());
  }
}

double Adam::Step() {
  double sq = 0.0;
  for (const auto &[name, p] : params_->all()) sq += p.grad.squaredNorm();
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm)) {
    throw NumericalError("non-finite gradient at step " + std::to_string(steps_ + 1));
  }
  if (config_.learning_rate == 0.0) {
    ++steps_;
    return norm;
  }
  const double clip =
      (config_.clip_norm > 0.0 && norm > config_.clip_norm) ? config_.clip_norm / norm : 1.0;
  ++steps_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
  for (auto &[name, p] : params_->all()) {
    Matrix &m = m_[name];
    Matrix &v = v_[name];
    if (m.size() != p.value.size()) {
      m = Matrix::Zero(p.value.rows(), p.value.cols());
      v = Matrix::Zero(p.value.rows(), p.value.cols());
    }
    const Matrix g = p.grad * clip;
    m = config_.beta1 * m + (1.0 - config_.beta1) * g;
    v = config_.beta2 * v + (1.0 - config_.beta2) * g.cwiseAbs2();
    p.value.array() -= config_.learning_rate * (m.array() / c1) /
                       ((v.array() / c2).sqrt() + config_.epsilon);
  }
  return norm;
}

std::map<std::string, Matrix> Adam::State() const {
  std::map<std::string, Matrix> out;
  for (const auto &[name, m] : m_) out[name + "/m"] = m;
  for (const auto &[name, v] : v_) out[name + "/v"] = v;
  return out;
}

void Adam::LoadState(const std::map<std::string, Matrix> &state, long steps) {
  for (auto &[name, p] : params_->all()) {
    auto mi = state.find(name + "/m"), vi = state.find(name + "/v");
    if (mi == state.end() || vi == state.end()) {
      throw DataError("optimizer state missing for parameter " + name);
    }
    if (mi->second.rows() != p.value.rows() || mi->second.cols() != p.value.cols() ||
        vi->second.rows() != p.value.rows() || vi->second.cols() != p.value.cols()) {
      throw DataError("optimizer state shape mismatch for parameter " + name);
    }
    m_[name] = mi->second;
    v_[name] = vi->second;
  }
  steps_ = steps;
}

}  // namespace n2n::nn
