#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spectran/adapter/checkpoint.hpp"
#include "spectran/adapter/fusion.hpp"
#include "spectran/adapter/mlp.hpp"
#include "spectran/adapter/spectran.hpp"
#include "spectran/cli/config.hpp"
#include "spectran/dataio/split.hpp"
#include "spectran/evalkit/metrics.hpp"
#include "spectran/numkit/adam.hpp"
#include "spectran/recmodel/backbone.hpp"

namespace spectran::cli {

enum class Transform { spectran, mlp, svd_truncate, svd_identity, none };

Transform parse_transform(const std::string& name);
std::string transform_name(Transform t);

/// Everything needed to run forward passes: parameters, static data and the
/// resolved sub-configurations. Built once per training or evaluation run.
struct ModelContext {
  Transform transform = Transform::none;
  adapter::FusionMode fusion = adapter::FusionMode::add;
  recmodel::BackboneConfig backbone;
  adapter::SpecTranConfig spectran_cfg;
  adapter::MlpConfig mlp_cfg;
  double tau = 1.0;
  int n_items = 0;

  numkit::ParamStore params;
  std::optional<spectral::SvdFactors> svd;  // spectral transforms only
  numkit::Matrix e_llm;                     // mlp input (dense item order)
  numkit::Matrix e_s_static;                // svd_truncate / svd_identity

  /// Transformed semantic embedding node, or -1 when the model is ID-only.
  numkit::Tape::Id e_s_node(numkit::Tape& tape);
  /// Fused item embedding table node (N x d).
  numkit::Tape::Id e_item_node(numkit::Tape& tape);
  /// Plain fused table for inference (cached by callers per evaluation).
  numkit::Matrix e_item_plain() const;
  /// Plain transformed semantic embedding (diagnostics); empty for ID-only.
  numkit::Matrix e_s_plain() const;
};

/// Assemble parameters and static transforms. `e_dense` holds one semantic
/// embedding row per dense item id; it may be empty for transform none.
ModelContext build_model(const RunConfig& cfg, int n_items, const numkit::Matrix& e_dense);

struct TrainOutcome {
  int epochs_run = 0;
  int best_epoch = 0;
  double best_valid_ndcg20 = 0.0;
  long long trainable_params = 0;
  double train_seconds = 0.0;
  double mean_eval_seconds = 0.0;
  adapter::Checkpoint best_checkpoint;
  std::vector<std::string> log_lines;  // JSON object per epoch
};

/// Full training loop: InfoNCE over sampled negatives, Adam updates, per-epoch
/// validation NDCG@20 with early stopping, best-checkpoint tracking.
TrainOutcome train_model(const RunConfig& cfg, const dataio::SplitDataset& ds,
                         const numkit::Matrix& e_dense);

/// Score every catalog item for the given user rows against a fixed item
/// table (inference path shared by validation and test evaluation).
numkit::Matrix score_users(ModelContext& model, const dataio::SplitDataset& ds,
                           const std::vector<int>& user_rows, const numkit::Matrix& e_item);

evalkit::MetricsRow evaluate_partition(ModelContext& model, const dataio::SplitDataset& ds,
                                       dataio::Partition part, bool exclude_history);

/// Rebuild a model from a checkpoint (shapes from meta, values restored).
ModelContext model_from_checkpoint(const adapter::Checkpoint& ckpt, const RunConfig& cfg,
                                   const dataio::SplitDataset& ds, const numkit::Matrix& e_dense);

/// Meta tensors stored alongside parameters in every checkpoint.
void attach_meta(adapter::Checkpoint& ckpt, const ModelContext& model, const RunConfig& cfg);

}  // namespace spectran::cli
