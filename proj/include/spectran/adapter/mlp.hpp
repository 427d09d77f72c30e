#pragma once

#include <string>

#include "spectran/numkit/param_store.hpp"
#include "spectran/numkit/rng.hpp"
#include "spectran/numkit/tape.hpp"

namespace spectran::adapter {

using numkit::Matrix;

/// Adapter baseline: a learnable map from the semantic dimension l to the
/// item dimension d. hidden == 0 collapses to a single linear layer.
struct MlpConfig {
  int in_dim = 0;
  int out_dim = 0;
  int hidden = 128;
  enum class Activation { relu, tanh, identity } act = Activation::relu;
};

inline constexpr const char* kMlpW1 = "adapter.w1";
inline constexpr const char* kMlpB1 = "adapter.b1";
inline constexpr const char* kMlpW2 = "adapter.w2";
inline constexpr const char* kMlpB2 = "adapter.b2";

/// He-style init for the weights, zero biases.
void init_mlp_params(numkit::ParamStore& params, const MlpConfig& cfg, numkit::Rng& rng);

/// Plain forward: E_s = f(E_llm), shape N x d.
Matrix mlp_project(const Matrix& e_llm, const MlpConfig& cfg, const Matrix& w1, const Matrix& b1,
                   const Matrix& w2, const Matrix& b2);
/// Single-layer variant (cfg.hidden == 0).
Matrix mlp_project(const Matrix& e_llm, const MlpConfig& cfg, const Matrix& w1, const Matrix& b1);

numkit::Tape::Id mlp_project_node(numkit::Tape& tape, numkit::Tape::Id e_llm,
                                  const MlpConfig& cfg, numkit::ParamStore& params);

MlpConfig::Activation parse_activation(const std::string& name);

}  // namespace spectran::adapter
