#pragma once

#include <string>

#include "spectran/numkit/param_store.hpp"
#include "spectran/numkit/tape.hpp"

namespace spectran::adapter {

/// How the transformed semantic embedding joins the ID embedding:
///   add            E_item = E_s + E_id
///   concat_project E_item = [E_s | E_id] W_f with a learnable 2d -> d map
///   semantic_init  E_id is initialized to E_s and then trained alone
enum class FusionMode { add, concat_project, semantic_init };

FusionMode parse_fusion_mode(const std::string& name);
std::string fusion_mode_name(FusionMode mode);

inline constexpr const char* kFusionW = "fusion.w";

/// Register the concat_project map (identity-on-the-left initialization, so
/// the fused table starts at E_s + E_id like additive fusion).
void init_fusion_params(numkit::ParamStore& params, int d, FusionMode mode);

/// Plain fusion of precomputed matrices (add / concat_project).
numkit::Matrix fuse_embeddings(const numkit::Matrix& e_s, const numkit::Matrix& e_id,
                               FusionMode mode, const numkit::Matrix* w_f = nullptr);

/// Tape fusion; `e_s` may be -1 for the ID-only model or semantic_init mode,
/// in which case the ID table passes through unchanged.
numkit::Tape::Id fuse_embeddings_node(numkit::Tape& tape, numkit::Tape::Id e_s,
                                      numkit::Tape::Id e_id, FusionMode mode,
                                      numkit::ParamStore& params);

}  // namespace spectran::adapter
