#pragma once

#include <vector>

#include "spectran/numkit/param_store.hpp"

namespace spectran::numkit {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // L2 term added to the gradient
};

/// First/second-moment accumulators, one pair per ParamStore entry.
struct AdamState {
  long long t = 0;
  std::vector<Matrix> m;
  std::vector<Matrix> v;

  static AdamState init(const ParamStore& params);
};

/// Bias-corrected Adam update with epsilon inside the square root:
///   theta -= lr * m_hat / sqrt(v_hat + eps)
/// Requires every parameter's gradient to have been populated by a backward
/// pass; increments t and zeroes the gradients afterwards.
void adam_step(ParamStore& params, AdamState& state, const AdamConfig& cfg);

}  // namespace spectran::numkit
