#include "spectran/recmodel/backbone.hpp"

#include <cmath>

#include "spectran/errors.hpp"

namespace spectran::recmodel {

void BackboneConfig::validate() const {
  if (d < 1 || blocks < 1 || max_len < 1)
    throw ConfigError("backbone: d, blocks, max_len must be >= 1");
  if (heads < 1 || d % heads != 0) throw ConfigError("backbone: d must be divisible by heads");
  if (dropout < 0.0 || dropout > 0.5) throw ConfigError("backbone: dropout must be in [0, 0.5]");
}

std::string block_key(int block, const std::string& leaf) {
  return "backbone.b" + std::to_string(block) + "." + leaf;
}

namespace {

Matrix gaussian(std::size_t rows, std::size_t cols, double std, numkit::Rng& rng) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = std * rng.normal();
  return m;
}

Matrix dropout_mask(std::size_t rows, std::size_t cols, double p, numkit::Rng& rng) {
  Matrix m(rows, cols);
  const double keep = 1.0 - p;
  for (std::size_t i = 0; i < m.size(); ++i)
    m.data()[i] = rng.uniform() < keep ? 1.0 / keep : 0.0;
  return m;
}

Matrix pad_row_mask(const Batch& batch) {
  Matrix mask(static_cast<std::size_t>(batch.b * batch.len), 1);
  for (int b = 0; b < batch.b; ++b)
    for (int i = 0; i < batch.len; ++i)
      mask(static_cast<std::size_t>(b * batch.len + i), 0) = batch.is_pad(b, i) ? 0.0 : 1.0;
  return mask;
}

// allowed(b, i, j) = (j <= i) and position j of sequence b is not padding.
// With left padding a pad query row has no allowed keys and softmaxes to zero.
Matrix causal_pad_mask(const Batch& batch) {
  Matrix mask(static_cast<std::size_t>(batch.b * batch.len), static_cast<std::size_t>(batch.len));
  for (int b = 0; b < batch.b; ++b)
    for (int i = 0; i < batch.len; ++i)
      for (int j = 0; j <= i; ++j)
        if (!batch.is_pad(b, j))
          mask(static_cast<std::size_t>(b * batch.len + i), static_cast<std::size_t>(j)) = 1.0;
  return mask;
}

}  // namespace

void init_backbone_params(numkit::ParamStore& params, const BackboneConfig& cfg, int n_items,
                          numkit::Rng& rng) {
  cfg.validate();
  if (n_items < 1) throw ConfigError("backbone: empty catalog");
  const auto d = static_cast<std::size_t>(cfg.d);
  params.add(kItemEmb, gaussian(static_cast<std::size_t>(n_items), d, cfg.emb_init_std, rng));
  params.add(kPosEmb, gaussian(static_cast<std::size_t>(cfg.max_len), d, cfg.emb_init_std, rng));
  const double attn_std = 1.0 / std::sqrt(static_cast<double>(cfg.d));
  for (int b = 0; b < cfg.blocks; ++b) {
    params.add(block_key(b, "wq"), gaussian(d, d, attn_std, rng));
    params.add(block_key(b, "wk"), gaussian(d, d, attn_std, rng));
    params.add(block_key(b, "wv"), gaussian(d, d, attn_std, rng));
    params.add(block_key(b, "ffn.w1"), gaussian(d, d, attn_std, rng));
    params.add(block_key(b, "ffn.b1"), Matrix(1, d));
    params.add(block_key(b, "ffn.w2"), gaussian(d, d, attn_std, rng));
    params.add(block_key(b, "ffn.b2"), Matrix(1, d));
    params.add(block_key(b, "ln1.g"), Matrix(1, d, 1.0));
    params.add(block_key(b, "ln1.b"), Matrix(1, d));
    params.add(block_key(b, "ln2.g"), Matrix(1, d, 1.0));
    params.add(block_key(b, "ln2.b"), Matrix(1, d));
  }
}

numkit::Tape::Id embed_sequence(numkit::Tape& tape, const Batch& batch, numkit::Tape::Id e_item,
                                numkit::ParamStore& params) {
  auto x = tape.gather_rows(e_item, batch.ids, batch.pad_id);
  auto pos = tape.tile_rows(tape.param(params, kPosEmb), batch.b);
  // Zero the padding rows after the position add so pads stay inert.
  return tape.mul_mask(tape.add(x, pos), pad_row_mask(batch));
}

numkit::Tape::Id encode_all_positions(numkit::Tape& tape, numkit::Tape::Id embedded,
                                      const Batch& batch, numkit::ParamStore& params,
                                      const BackboneConfig& cfg, numkit::Rng* dropout_rng) {
  cfg.validate();
  const bool use_dropout = tape.training() && cfg.dropout > 0.0;
  if (use_dropout && dropout_rng == nullptr)
    throw ContractError("encode_sequence: dropout enabled but no rng supplied");

  const Matrix attn_mask = causal_pad_mask(batch);
  const Matrix row_mask = pad_row_mask(batch);
  const int dh = cfg.d / cfg.heads;
  const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));

  auto x = embedded;
  for (int blk = 0; blk < cfg.blocks; ++blk) {
    auto q = tape.matmul(x, tape.param(params, block_key(blk, "wq")));
    auto k = tape.matmul(x, tape.param(params, block_key(blk, "wk")));
    auto v = tape.matmul(x, tape.param(params, block_key(blk, "wv")));

    numkit::Tape::Id ctx = -1;
    for (int h = 0; h < cfg.heads; ++h) {
      auto qh = cfg.heads == 1 ? q : tape.slice_cols(q, static_cast<std::size_t>(h * dh),
                                                     static_cast<std::size_t>(dh));
      auto kh = cfg.heads == 1 ? k : tape.slice_cols(k, static_cast<std::size_t>(h * dh),
                                                     static_cast<std::size_t>(dh));
      auto vh = cfg.heads == 1 ? v : tape.slice_cols(v, static_cast<std::size_t>(h * dh),
                                                     static_cast<std::size_t>(dh));
      auto scores = tape.scale(tape.bmm_nt(qh, kh, batch.b), inv_sqrt_dh);
      auto probs = tape.masked_softmax_rows(scores, attn_mask);
      if (use_dropout)
        probs = tape.mul_mask(probs, dropout_mask(tape.val(probs).rows(), tape.val(probs).cols(),
                                                  cfg.dropout, *dropout_rng));
      auto ctx_h = tape.bmm_nn(probs, vh, batch.b);
      ctx = h == 0 ? ctx_h : tape.concat_cols(ctx, ctx_h);
    }

    x = tape.add(x, ctx);
    x = tape.add_row_broadcast(
        tape.mul_row_broadcast(tape.layer_norm_rows(x, cfg.ln_eps),
                               tape.param(params, block_key(blk, "ln1.g"))),
        tape.param(params, block_key(blk, "ln1.b")));

    auto hidden = tape.relu(
        tape.add_row_broadcast(tape.matmul(x, tape.param(params, block_key(blk, "ffn.w1"))),
                               tape.param(params, block_key(blk, "ffn.b1"))));
    auto ffn =
        tape.add_row_broadcast(tape.matmul(hidden, tape.param(params, block_key(blk, "ffn.w2"))),
                               tape.param(params, block_key(blk, "ffn.b2")));
    if (use_dropout)
      ffn = tape.mul_mask(ffn, dropout_mask(tape.val(ffn).rows(), tape.val(ffn).cols(),
                                            cfg.dropout, *dropout_rng));
    x = tape.add(x, ffn);
    x = tape.add_row_broadcast(
        tape.mul_row_broadcast(tape.layer_norm_rows(x, cfg.ln_eps),
                               tape.param(params, block_key(blk, "ln2.g"))),
        tape.param(params, block_key(blk, "ln2.b")));
    // Keep pad rows at zero; the layer-norm bias would otherwise fill them.
    x = tape.mul_mask(x, row_mask);
  }
  return x;
}

numkit::Tape::Id encode_sequence(numkit::Tape& tape, numkit::Tape::Id embedded, const Batch& batch,
                                 numkit::ParamStore& params, const BackboneConfig& cfg,
                                 numkit::Rng* dropout_rng) {
  auto x = encode_all_positions(tape, embedded, batch, params, cfg, dropout_rng);
  std::vector<int> last(static_cast<std::size_t>(batch.b));
  for (int b = 0; b < batch.b; ++b)
    last[static_cast<std::size_t>(b)] = b * batch.len + batch.len - 1;
  return tape.gather_rows(x, last);
}

numkit::Tape::Id score_items(numkit::Tape& tape, numkit::Tape::Id user_repr,
                             numkit::Tape::Id e_item, const std::vector<int>& candidate_ids,
                             int per_row) {
  const auto b = tape.val(user_repr).rows();
  if (candidate_ids.size() != b * static_cast<std::size_t>(per_row))
    throw DimensionError("score_items: candidate list size mismatch");
  auto cand = tape.gather_rows(e_item, candidate_ids);
  auto reps = per_row == 1 ? user_repr : tape.repeat_rows(user_repr, per_row);
  auto dots = tape.rows_dot(reps, cand);
  return tape.reshape(dots, b, static_cast<std::size_t>(per_row));
}

Matrix score_all_items(const Matrix& user_repr, const Matrix& e_item) {
  return numkit::matmul_nt(user_repr, e_item);
}

}  // namespace spectran::recmodel
