// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_NN_OPTIMIZER_H_
#define N2N_NN_OPTIMIZER_H_

#include <map>
#include <string>

#include "n2n/nn/graph.h"

namespace n2n::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Global L2 gradient clipping; <= 0 disables.
  double clip_norm = 5.0;
};

class Adam {
 public:
  Adam(ParameterStore *params, AdamConfig config);

  // Applies one update from the accumulated grads and returns the global
  // gradient norm before clipping. Throws NumericalError on non-finite
  // gradients without touching parameters.
  double Step();

  long steps() const { return steps_; }
  const AdamConfig &config() const { return config_; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }

  // Moment state for checkpointing, keyed "<param>/m" and "<param>/v".
  std::map<std::string, Matrix> State() const;
  void LoadState(const std::map<std::string, Matrix> &state, long steps);

 private:
  ParameterStore *params_;
  AdamConfig config_;
  std::map<std::string, Matrix> m_, v_;
  long steps_ = 0;
};

}  // namespace n2n::nn

#endif  // N2N_NN_OPTIMIZER_H_
