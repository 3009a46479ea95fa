// Adaptive-moment optimizer with decoupled weight decay and linear warmup.
#pragma once

#include <vector>

#include "spanproto/error.hpp"
#include "spanproto/params.hpp"

namespace spanproto {

struct OptimizerConfig {
  double learning_rate = 8e-3;
  double warmup_fraction = 0.1;  // of total_steps
  int total_steps = 2000;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const {
    if (learning_rate <= 0.0) throw ConfigError("learning_rate must be > 0");
    if (warmup_fraction < 0.0 || warmup_fraction > 1.0) {
      throw ConfigError("warmup_fraction must be in [0, 1]");
    }
    if (total_steps < 1) throw ConfigError("total_steps must be >= 1");
  }
};

class AdamW {
 public:
  explicit AdamW(OptimizerConfig config) : config_(config) { config_.validate(); }

  // Learning rate ramps linearly from 0 over the first
  // warmup_fraction * total_steps step indices (0-based), constant after.
  double effective_lr(int step_index) const {
    const double warmup_steps = config_.warmup_fraction * config_.total_steps;
    if (warmup_steps > 0.0 && step_index < warmup_steps) {
      return config_.learning_rate * (step_index / warmup_steps);
    }
    return config_.learning_rate;
  }

  // Applies one update from the gradients accumulated in the registry.
  // Throws on non-finite gradients, naming the parameter.
  void step(ParameterRegistry& params, int step_index);

  const OptimizerConfig& config() const { return config_; }

 private:
  OptimizerConfig config_;
  std::vector<Mat> m_;
  std::vector<Mat> v_;
  long t_ = 0;  // moment updates applied, for bias correction
};

}  // namespace spanproto
