#include "spectran/adapter/mlp.hpp"

#include <cmath>

#include "spectran/errors.hpp"

namespace spectran::adapter {

namespace {

Matrix he_init(std::size_t rows, std::size_t cols, numkit::Rng& rng) {
  Matrix w(rows, cols);
  const double std = std::sqrt(2.0 / static_cast<double>(rows));
  for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = std * rng.normal();
  return w;
}

Matrix apply_act(Matrix x, MlpConfig::Activation act) {
  switch (act) {
    case MlpConfig::Activation::relu:
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x.data()[i] < 0.0) x.data()[i] = 0.0;
      break;
    case MlpConfig::Activation::tanh:
      for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = std::tanh(x.data()[i]);
      break;
    case MlpConfig::Activation::identity:
      break;
  }
  return x;
}

Matrix linear(const Matrix& x, const Matrix& w, const Matrix& b) {
  Matrix y = numkit::matmul(x, w);
  for (std::size_t i = 0; i < y.rows(); ++i)
    for (std::size_t j = 0; j < y.cols(); ++j) y(i, j) += b(0, j);
  return y;
}

}  // namespace

void init_mlp_params(numkit::ParamStore& params, const MlpConfig& cfg, numkit::Rng& rng) {
  if (cfg.in_dim < 1 || cfg.out_dim < 1 || cfg.hidden < 0)
    throw ConfigError("mlp adapter: bad dimensions");
  if (cfg.hidden == 0) {
    params.add(kMlpW1, he_init(static_cast<std::size_t>(cfg.in_dim),
                               static_cast<std::size_t>(cfg.out_dim), rng));
    params.add(kMlpB1, Matrix(1, static_cast<std::size_t>(cfg.out_dim)));
    return;
  }
  params.add(kMlpW1, he_init(static_cast<std::size_t>(cfg.in_dim),
                             static_cast<std::size_t>(cfg.hidden), rng));
  params.add(kMlpB1, Matrix(1, static_cast<std::size_t>(cfg.hidden)));
  params.add(kMlpW2, he_init(static_cast<std::size_t>(cfg.hidden),
                             static_cast<std::size_t>(cfg.out_dim), rng));
  params.add(kMlpB2, Matrix(1, static_cast<std::size_t>(cfg.out_dim)));
}

Matrix mlp_project(const Matrix& e_llm, const MlpConfig& cfg, const Matrix& w1, const Matrix& b1,
                   const Matrix& w2, const Matrix& b2) {
  if (e_llm.cols() != w1.rows()) throw DimensionError("mlp_project: input width mismatch");
  return linear(apply_act(linear(e_llm, w1, b1), cfg.act), w2, b2);
}

Matrix mlp_project(const Matrix& e_llm, const MlpConfig& cfg, const Matrix& w1, const Matrix& b1) {
  (void)cfg;
  if (e_llm.cols() != w1.rows()) throw DimensionError("mlp_project: input width mismatch");
  return linear(e_llm, w1, b1);
}

numkit::Tape::Id mlp_project_node(numkit::Tape& tape, numkit::Tape::Id e_llm,
                                  const MlpConfig& cfg, numkit::ParamStore& params) {
  auto w1 = tape.param(params, kMlpW1);
  auto b1 = tape.param(params, kMlpB1);
  auto h = tape.add_row_broadcast(tape.matmul(e_llm, w1), b1);
  if (cfg.hidden == 0) return h;
  switch (cfg.act) {
    case MlpConfig::Activation::relu:
      h = tape.relu(h);
      break;
    case MlpConfig::Activation::tanh:
      h = tape.tanh_act(h);
      break;
    case MlpConfig::Activation::identity:
      break;
  }
  auto w2 = tape.param(params, kMlpW2);
  auto b2 = tape.param(params, kMlpB2);
  return tape.add_row_broadcast(tape.matmul(h, w2), b2);
}

MlpConfig::Activation parse_activation(const std::string& name) {
  if (name == "relu") return MlpConfig::Activation::relu;
  if (name == "tanh") return MlpConfig::Activation::tanh;
  if (name == "identity") return MlpConfig::Activation::identity;
  throw ConfigError("unknown activation: " + name);
}

}  // namespace spectran::adapter
