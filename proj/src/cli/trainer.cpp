#include "spectran/cli/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "spectran/errors.hpp"
#include "spectran/evalkit/earlystop.hpp"
#include "spectran/recmodel/batch.hpp"
#include "spectran/recmodel/loss.hpp"

namespace spectran::cli {

using numkit::Matrix;

Transform parse_transform(const std::string& name) {
  if (name == "spectran") return Transform::spectran;
  if (name == "mlp") return Transform::mlp;
  if (name == "svd_truncate") return Transform::svd_truncate;
  if (name == "svd_identity") return Transform::svd_identity;
  if (name == "none") return Transform::none;
  throw ConfigError("unknown transform: " + name);
}

std::string transform_name(Transform t) {
  switch (t) {
    case Transform::spectran:
      return "spectran";
    case Transform::mlp:
      return "mlp";
    case Transform::svd_truncate:
      return "svd_truncate";
    case Transform::svd_identity:
      return "svd_identity";
    case Transform::none:
      return "none";
  }
  return "none";
}

numkit::Tape::Id ModelContext::e_s_node(numkit::Tape& tape) {
  if (fusion == adapter::FusionMode::semantic_init) return -1;
  switch (transform) {
    case Transform::none:
      return -1;
    case Transform::spectran: {
      auto u = tape.constant(svd->u);
      return adapter::spectran_project_node(tape, u, svd->sigma, params, spectran_cfg.d);
    }
    case Transform::mlp: {
      auto e = tape.constant(e_llm);
      return adapter::mlp_project_node(tape, e, mlp_cfg, params);
    }
    case Transform::svd_truncate:
    case Transform::svd_identity:
      return tape.constant(e_s_static);
  }
  return -1;
}

numkit::Tape::Id ModelContext::e_item_node(numkit::Tape& tape) {
  auto e_id = tape.param(params, recmodel::kItemEmb);
  return adapter::fuse_embeddings_node(tape, e_s_node(tape), e_id, fusion, params);
}

Matrix ModelContext::e_s_plain() const {
  switch (transform) {
    case Transform::none:
      return Matrix();
    case Transform::spectran:
      return adapter::spectran_project(
          *svd, params.value(adapter::kSpectranQ), params.value(adapter::kSpectranK),
          std::vector<double>(params.value(adapter::kSpectranAlpha).data(),
                              params.value(adapter::kSpectranAlpha).data() +
                                  params.value(adapter::kSpectranAlpha).size()),
          params.value(adapter::kSpectranLambda)(0, 0));
    case Transform::mlp:
      if (mlp_cfg.hidden == 0)
        return adapter::mlp_project(e_llm, mlp_cfg, params.value(adapter::kMlpW1),
                                    params.value(adapter::kMlpB1));
      return adapter::mlp_project(e_llm, mlp_cfg, params.value(adapter::kMlpW1),
                                  params.value(adapter::kMlpB1), params.value(adapter::kMlpW2),
                                  params.value(adapter::kMlpB2));
    case Transform::svd_truncate:
    case Transform::svd_identity:
      return e_s_static;
  }
  return Matrix();
}

Matrix ModelContext::e_item_plain() const {
  const Matrix& e_id = params.value(recmodel::kItemEmb);
  if (transform == Transform::none || fusion == adapter::FusionMode::semantic_init) return e_id;
  const Matrix e_s = e_s_plain();
  const Matrix* w_f =
      fusion == adapter::FusionMode::concat_project ? &params.value(adapter::kFusionW) : nullptr;
  return adapter::fuse_embeddings(e_s, e_id, fusion, w_f);
}

ModelContext build_model(const RunConfig& cfg, int n_items, const Matrix& e_dense) {
  cfg.validate();
  ModelContext model;
  model.transform = parse_transform(cfg.transform);
  model.fusion = adapter::parse_fusion_mode(cfg.fusion);
  model.tau = cfg.tau;
  model.n_items = n_items;
  model.backbone.d = cfg.d;
  model.backbone.blocks = cfg.blocks;
  model.backbone.heads = cfg.heads;
  model.backbone.max_len = cfg.max_len;
  model.backbone.dropout = cfg.dropout;
  model.backbone.emb_init_std = cfg.emb_init_std;
  model.spectran_cfg = adapter::SpecTranConfig{cfg.d, cfg.m, cfg.taylor_n};
  model.mlp_cfg.out_dim = cfg.d;
  model.mlp_cfg.hidden = cfg.mlp_hidden;
  model.mlp_cfg.act = adapter::parse_activation(cfg.mlp_activation);

  const bool needs_embeddings = model.transform != Transform::none;
  if (needs_embeddings) {
    if (e_dense.rows() != static_cast<std::size_t>(n_items))
      throw ConfigError("embedding matrix has " + std::to_string(e_dense.rows()) +
                        " rows for " + std::to_string(n_items) + " items");
    model.mlp_cfg.in_dim = static_cast<int>(e_dense.cols());
  }

  if (model.transform == Transform::spectran || model.transform == Transform::svd_truncate ||
      model.transform == Transform::svd_identity) {
    model.svd = spectral::svd_decompose(e_dense);
    if (model.svd->rank() < cfg.d)
      throw ConfigError("semantic rank " + std::to_string(model.svd->rank()) +
                        " is below model.d = " + std::to_string(cfg.d));
    if (model.transform == Transform::svd_truncate)
      model.e_s_static = spectral::truncate_project(*model.svd, cfg.d);
    else if (model.transform == Transform::svd_identity)
      model.e_s_static = spectral::identity_project(*model.svd, cfg.d);
  }
  if (model.transform == Transform::mlp) model.e_llm = e_dense;

  numkit::Rng backbone_rng = numkit::Rng::stream(cfg.seed, "init.backbone");
  init_backbone_params(model.params, model.backbone, n_items, backbone_rng);

  numkit::Rng adapter_rng = numkit::Rng::stream(cfg.seed, "init.adapter");
  const bool train_adapter = model.fusion != adapter::FusionMode::semantic_init;
  if (model.transform == Transform::spectran) {
    if (train_adapter) {
      init_spectran_params(model.params, model.spectran_cfg, model.svd->rank(), adapter_rng);
    } else {
      numkit::ParamStore init_only;
      init_spectran_params(init_only, model.spectran_cfg, model.svd->rank(), adapter_rng);
      const Matrix& alpha = init_only.value(adapter::kSpectranAlpha);
      model.params.value(recmodel::kItemEmb) = adapter::spectran_project(
          *model.svd, init_only.value(adapter::kSpectranQ), init_only.value(adapter::kSpectranK),
          std::vector<double>(alpha.data(), alpha.data() + alpha.size()),
          init_only.value(adapter::kSpectranLambda)(0, 0));
    }
  } else if (model.transform == Transform::mlp) {
    if (train_adapter) {
      init_mlp_params(model.params, model.mlp_cfg, adapter_rng);
    } else {
      numkit::ParamStore init_only;
      init_mlp_params(init_only, model.mlp_cfg, adapter_rng);
      model.params.value(recmodel::kItemEmb) =
          model.mlp_cfg.hidden == 0
              ? adapter::mlp_project(model.e_llm, model.mlp_cfg, init_only.value(adapter::kMlpW1),
                                     init_only.value(adapter::kMlpB1))
              : adapter::mlp_project(model.e_llm, model.mlp_cfg, init_only.value(adapter::kMlpW1),
                                     init_only.value(adapter::kMlpB1),
                                     init_only.value(adapter::kMlpW2),
                                     init_only.value(adapter::kMlpB2));
    }
  } else if (model.transform == Transform::svd_truncate ||
             model.transform == Transform::svd_identity) {
    if (!train_adapter) model.params.value(recmodel::kItemEmb) = model.e_s_static;
  }

  if (model.transform != Transform::none && model.fusion == adapter::FusionMode::concat_project)
    init_fusion_params(model.params, cfg.d, model.fusion);
  return model;
}

Matrix score_users(ModelContext& model, const dataio::SplitDataset& ds,
                   const std::vector<int>& user_rows, const Matrix& e_item) {
  const recmodel::Batch batch = recmodel::make_eval_batch(ds, user_rows);
  numkit::Tape tape(false);
  auto e_item_node = tape.constant(e_item);
  auto embedded = recmodel::embed_sequence(tape, batch, e_item_node, model.params);
  auto user = recmodel::encode_sequence(tape, embedded, batch, model.params, model.backbone,
                                        nullptr);
  return recmodel::score_all_items(tape.val(user), e_item);
}

evalkit::MetricsRow evaluate_partition(ModelContext& model, const dataio::SplitDataset& ds,
                                       dataio::Partition part, bool exclude_history) {
  const Matrix e_item = model.e_item_plain();
  return evalkit::evaluate_split(
      ds, part,
      [&](const std::vector<int>& rows) { return score_users(model, ds, rows, e_item); },
      exclude_history);
}

void attach_meta(adapter::Checkpoint& ckpt, const ModelContext& model, const RunConfig& cfg) {
  ckpt.set_meta("meta.transform", static_cast<double>(static_cast<int>(model.transform)));
  ckpt.set_meta("meta.fusion", static_cast<double>(static_cast<int>(model.fusion)));
  ckpt.set_meta("meta.d", cfg.d);
  ckpt.set_meta("meta.m", model.spectran_cfg.inner());
  ckpt.set_meta("meta.taylor_n", cfg.taylor_n);
  ckpt.set_meta("meta.mlp_hidden", cfg.mlp_hidden);
  ckpt.set_meta("meta.mlp_activation",
                static_cast<double>(static_cast<int>(model.mlp_cfg.act)));
  ckpt.set_meta("meta.blocks", cfg.blocks);
  ckpt.set_meta("meta.heads", cfg.heads);
  ckpt.set_meta("meta.max_len", cfg.max_len);
  ckpt.set_meta("meta.n_items", model.n_items);
  ckpt.set_meta("meta.tau", model.tau);
}

ModelContext model_from_checkpoint(const adapter::Checkpoint& ckpt, const RunConfig& cfg,
                                   const dataio::SplitDataset& ds, const Matrix& e_dense) {
  const int meta_d = static_cast<int>(ckpt.meta("meta.d"));
  if (meta_d != cfg.d)
    throw ConfigError("checkpoint was trained with d = " + std::to_string(meta_d) +
                      " but the config requests d = " + std::to_string(cfg.d));
  if (static_cast<int>(ckpt.meta("meta.n_items")) != ds.n_items)
    throw ConfigError("checkpoint item count does not match the split dataset");

  RunConfig resolved = cfg;
  resolved.transform =
      transform_name(static_cast<Transform>(static_cast<int>(ckpt.meta("meta.transform"))));
  const auto fusion_idx = static_cast<int>(ckpt.meta("meta.fusion"));
  resolved.fusion = adapter::fusion_mode_name(static_cast<adapter::FusionMode>(fusion_idx));
  resolved.m = static_cast<int>(ckpt.meta("meta.m"));
  resolved.taylor_n = static_cast<int>(ckpt.meta("meta.taylor_n"));
  resolved.mlp_hidden = static_cast<int>(ckpt.meta("meta.mlp_hidden"));
  resolved.blocks = static_cast<int>(ckpt.meta("meta.blocks"));
  resolved.heads = static_cast<int>(ckpt.meta("meta.heads"));
  resolved.max_len = static_cast<int>(ckpt.meta("meta.max_len"));
  resolved.tau = ckpt.meta("meta.tau");

  ModelContext model = build_model(resolved, ds.n_items, e_dense);
  ckpt.restore_params(model.params);
  return model;
}

namespace {

void dump_diagnostics(const std::string& out_dir, int epoch, int batch_index, double loss,
                      const numkit::ParamStore& params) {
  std::filesystem::create_directories(out_dir);
  std::ofstream dump(out_dir + "/diagnostic.txt", std::ios::trunc);
  dump << "non-finite loss " << loss << " at epoch " << epoch << " batch " << batch_index << "\n";
  for (const auto& e : params.entries())
    dump << e.name << " norm=" << e.value.frobenius_norm() << " grad_norm=" << e.grad.frobenius_norm()
         << "\n";
}

}  // namespace

TrainOutcome train_model(const RunConfig& cfg, const dataio::SplitDataset& ds,
                         const Matrix& e_dense) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();

  ModelContext model = build_model(cfg, ds.n_items, e_dense);
  numkit::AdamState adam = numkit::AdamState::init(model.params);
  numkit::AdamConfig adam_cfg;
  adam_cfg.lr = cfg.lr;
  adam_cfg.weight_decay = cfg.weight_decay;

  numkit::Rng shuffle_rng = numkit::Rng::stream(cfg.seed, "shuffle");
  numkit::Rng neg_rng = numkit::Rng::stream(cfg.seed, "negatives");
  numkit::Rng dropout_rng = numkit::Rng::stream(cfg.seed, "dropout");

  std::vector<int> train_rows = ds.users_in(dataio::Partition::train);
  if (train_rows.empty()) throw DataError("train_model: empty train partition");

  TrainOutcome out;
  out.trainable_params = model.params.scalar_count();

  evalkit::EarlyStopState stop_state;
  stop_state.patience = cfg.patience;
  double eval_seconds_total = 0.0;
  int eval_count = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    // Fisher-Yates shuffle from the dedicated stream.
    for (std::size_t i = train_rows.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(shuffle_rng.uniform_int(i));
      std::swap(train_rows[i - 1], train_rows[j]);
    }

    double loss_sum = 0.0;
    int batch_count = 0;
    for (std::size_t start = 0; start < train_rows.size();
         start += static_cast<std::size_t>(cfg.batch)) {
      const std::size_t stop = std::min(train_rows.size(), start + static_cast<std::size_t>(cfg.batch));
      const std::vector<int> rows(train_rows.begin() + static_cast<std::ptrdiff_t>(start),
                                  train_rows.begin() + static_cast<std::ptrdiff_t>(stop));
      const recmodel::Batch batch =
          recmodel::make_batch(ds, rows, cfg.neg_k, neg_rng, cfg.exclude_history_negatives);

      numkit::Tape tape(true);
      auto e_item = model.e_item_node(tape);
      auto embedded = recmodel::embed_sequence(tape, batch, e_item, model.params);
      auto user = recmodel::encode_sequence(tape, embedded, batch, model.params, model.backbone,
                                            &dropout_rng);
      auto pos = recmodel::score_items(tape, user, e_item, batch.targets, 1);
      auto neg = recmodel::score_items(tape, user, e_item, batch.negatives, batch.k_neg);
      auto loss = recmodel::infonce_loss_node(tape, pos, neg, model.tau);

      const double loss_value = tape.val(loss)(0, 0);
      if (!std::isfinite(loss_value)) {
        dump_diagnostics(cfg.out, epoch, batch_count, loss_value, model.params);
        throw NumericError("train_model: non-finite loss at epoch " + std::to_string(epoch));
      }
      tape.backward(loss);
      numkit::adam_step(model.params, adam, adam_cfg);
      loss_sum += loss_value;
      ++batch_count;
    }

    const auto ev0 = clock::now();
    const evalkit::MetricsRow valid = evaluate_partition(model, ds, dataio::Partition::valid,
                                                         cfg.exclude_history_eval);
    eval_seconds_total += std::chrono::duration<double>(clock::now() - ev0).count();
    ++eval_count;

    out.epochs_run = epoch;
    const auto decision = evalkit::early_stop_update(stop_state, valid.ndcg20, epoch);
    if (decision.improved) {
      out.best_checkpoint = adapter::Checkpoint::from_params(model.params);
      attach_meta(out.best_checkpoint, model, cfg);
      out.best_checkpoint.set_meta("meta.best_epoch", epoch);
      out.best_epoch = epoch;
      out.best_valid_ndcg20 = valid.ndcg20;
    }

    char line[256];
    std::snprintf(line, sizeof(line),
                  "{\"epoch\": %d, \"train_loss\": %.10g, \"valid_ndcg20\": %.10g, "
                  "\"wall_clock_s\": %.3f, \"trainable_params\": %lld}",
                  epoch, loss_sum / std::max(1, batch_count), valid.ndcg20,
                  std::chrono::duration<double>(clock::now() - t0).count(), out.trainable_params);
    out.log_lines.emplace_back(line);

    if (decision.stop) break;
  }

  // Report the best model, not the last epoch.
  out.best_checkpoint.restore_params(model.params);
  out.train_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  out.mean_eval_seconds = eval_count > 0 ? eval_seconds_total / eval_count : 0.0;
  return out;
}

}  // namespace spectran::cli
