#include "spectran/numkit/adam.hpp"

#include <cmath>

#include "spectran/errors.hpp"

namespace spectran::numkit {

AdamState AdamState::init(const ParamStore& params) {
  AdamState s;
  s.m.reserve(params.entries().size());
  s.v.reserve(params.entries().size());
  for (const auto& e : params.entries()) {
    s.m.emplace_back(e.value.rows(), e.value.cols());
    s.v.emplace_back(e.value.rows(), e.value.cols());
  }
  return s;
}

void adam_step(ParamStore& params, AdamState& state, const AdamConfig& cfg) {
  if (state.m.size() != params.entries().size())
    throw ContractError("adam_step: state does not match parameter store");
  for (const auto& e : params.entries())
    if (!e.grad_populated)
      throw ContractError("adam_step: gradient not populated for '" + e.name + "'");

  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));

  for (std::size_t p = 0; p < params.entries().size(); ++p) {
    auto& e = params.entries()[p];
    Matrix& m = state.m[p];
    Matrix& v = state.v[p];
    for (std::size_t i = 0; i < e.value.size(); ++i) {
      double gi = e.grad.data()[i];
      if (cfg.weight_decay != 0.0) gi += cfg.weight_decay * e.value.data()[i];
      m.data()[i] = cfg.beta1 * m.data()[i] + (1.0 - cfg.beta1) * gi;
      v.data()[i] = cfg.beta2 * v.data()[i] + (1.0 - cfg.beta2) * gi * gi;
      const double m_hat = m.data()[i] / bc1;
      const double v_hat = v.data()[i] / bc2;
      e.value.data()[i] -= cfg.lr * m_hat / std::sqrt(v_hat + cfg.eps);
    }
  }
  params.zero_grads();
}

}  // namespace spectran::numkit
