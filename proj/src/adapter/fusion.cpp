#include "spectran/adapter/fusion.hpp"

#include "spectran/errors.hpp"

namespace spectran::adapter {

FusionMode parse_fusion_mode(const std::string& name) {
  if (name == "add") return FusionMode::add;
  if (name == "concat_project") return FusionMode::concat_project;
  if (name == "semantic_init") return FusionMode::semantic_init;
  throw ConfigError("unknown fusion mode: " + name);
}

std::string fusion_mode_name(FusionMode mode) {
  switch (mode) {
    case FusionMode::add:
      return "add";
    case FusionMode::concat_project:
      return "concat_project";
    case FusionMode::semantic_init:
      return "semantic_init";
  }
  return "add";
}

void init_fusion_params(numkit::ParamStore& params, int d, FusionMode mode) {
  if (mode != FusionMode::concat_project) return;
  // [I; I] start: fused table begins at E_s + E_id.
  numkit::Matrix w(static_cast<std::size_t>(2 * d), static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    w(static_cast<std::size_t>(j), static_cast<std::size_t>(j)) = 1.0;
    w(static_cast<std::size_t>(d + j), static_cast<std::size_t>(j)) = 1.0;
  }
  params.add(kFusionW, std::move(w));
}

numkit::Matrix fuse_embeddings(const numkit::Matrix& e_s, const numkit::Matrix& e_id,
                               FusionMode mode, const numkit::Matrix* w_f) {
  switch (mode) {
    case FusionMode::add:
      return numkit::add(e_s, e_id);
    case FusionMode::semantic_init:
      return e_id;
    case FusionMode::concat_project: {
      if (w_f == nullptr) throw ContractError("fuse_embeddings: concat_project needs W_f");
      if (e_s.rows() != e_id.rows()) throw DimensionError("fuse_embeddings: row mismatch");
      numkit::Matrix cat(e_s.rows(), e_s.cols() + e_id.cols());
      for (std::size_t i = 0; i < cat.rows(); ++i) {
        for (std::size_t j = 0; j < e_s.cols(); ++j) cat(i, j) = e_s(i, j);
        for (std::size_t j = 0; j < e_id.cols(); ++j) cat(i, e_s.cols() + j) = e_id(i, j);
      }
      return numkit::matmul(cat, *w_f);
    }
  }
  throw ContractError("fuse_embeddings: unreachable");
}

numkit::Tape::Id fuse_embeddings_node(numkit::Tape& tape, numkit::Tape::Id e_s,
                                      numkit::Tape::Id e_id, FusionMode mode,
                                      numkit::ParamStore& params) {
  if (e_s < 0 || mode == FusionMode::semantic_init) return e_id;
  switch (mode) {
    case FusionMode::add:
      return tape.add(e_s, e_id);
    case FusionMode::concat_project: {
      auto w = tape.param(params, kFusionW);
      return tape.matmul(tape.concat_cols(e_s, e_id), w);
    }
    default:
      return e_id;
  }
}

}  // namespace spectran::adapter
