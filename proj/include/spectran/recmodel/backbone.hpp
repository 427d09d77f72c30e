#pragma once

#include <string>
#include <vector>

#include "spectran/numkit/param_store.hpp"
#include "spectran/numkit/rng.hpp"
#include "spectran/numkit/tape.hpp"

namespace spectran::recmodel {

using numkit::Matrix;

/// Causal self-attention backbone over item sequences: per block, masked
/// softmax attention with residual + layer norm, then a pointwise
/// feed-forward with residual + layer norm. The user representation is the
/// final-position vector.
struct BackboneConfig {
  int d = 128;
  int blocks = 2;
  int heads = 1;
  int max_len = 10;
  double dropout = 0.1;        // attention weights and feed-forward outputs
  double emb_init_std = 0.1;   // item/position embedding init scale
  double ln_eps = 1e-8;

  void validate() const;
};

/// A batch of B sequences left-padded to a fixed length, one target per
/// sequence and k sampled negatives per sequence. pad_id embeds to a zero
/// row, is masked out of attention, and never appears among candidates.
struct Batch {
  int b = 0;
  int len = 0;
  int pad_id = -1;
  std::vector<int> ids;        // b * len, left-padded
  std::vector<int> targets;    // b
  std::vector<int> negatives;  // b * k_neg
  int k_neg = 0;

  bool is_pad(int seq, int pos) const {
    return ids[static_cast<std::size_t>(seq * len + pos)] == pad_id;
  }
};

// ParamStore keys.
inline constexpr const char* kItemEmb = "backbone.item_emb";
inline constexpr const char* kPosEmb = "backbone.pos_emb";
std::string block_key(int block, const std::string& leaf);

/// Register E_id (N x d), position embeddings (max_len x d) and per-block
/// attention / feed-forward / layer-norm tensors.
void init_backbone_params(numkit::ParamStore& params, const BackboneConfig& cfg, int n_items,
                          numkit::Rng& rng);

/// Lookup + position add for a batch: rows (b*len) x d; padding rows zeroed.
numkit::Tape::Id embed_sequence(numkit::Tape& tape, const Batch& batch, numkit::Tape::Id e_item,
                                numkit::ParamStore& params);

/// Run the transformer blocks over every position, (b*len) x d.
/// `dropout_rng` supplies dropout masks and must be non-null when
/// tape.training() and cfg.dropout > 0.
numkit::Tape::Id encode_all_positions(numkit::Tape& tape, numkit::Tape::Id embedded,
                                      const Batch& batch, numkit::ParamStore& params,
                                      const BackboneConfig& cfg, numkit::Rng* dropout_rng);

/// Final-position rows of encode_all_positions, b x d.
numkit::Tape::Id encode_sequence(numkit::Tape& tape, numkit::Tape::Id embedded, const Batch& batch,
                                 numkit::ParamStore& params, const BackboneConfig& cfg,
                                 numkit::Rng* dropout_rng);

/// score(u, i) = dot(user_repr_u, E_item[i]) for each candidate list entry;
/// returns a b x per_row matrix node.
numkit::Tape::Id score_items(numkit::Tape& tape, numkit::Tape::Id user_repr,
                             numkit::Tape::Id e_item, const std::vector<int>& candidate_ids,
                             int per_row);

/// Plain scoring of every catalog item for a block of user representations.
Matrix score_all_items(const Matrix& user_repr, const Matrix& e_item);

}  // namespace spectran::recmodel
