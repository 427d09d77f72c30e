#include "spectran/cli/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "spectran/adapter/checkpoint.hpp"
#include "spectran/cli/trainer.hpp"
#include "spectran/dataio/formats.hpp"
#include "spectran/dataio/interactions.hpp"
#include "spectran/dataio/split.hpp"
#include "spectran/dataio/synth.hpp"
#include "spectran/errors.hpp"
#include "spectran/evalkit/metrics.hpp"
#include "spectran/spectral/spectrum.hpp"

namespace spectran::cli {

namespace fs = std::filesystem;

void EfficiencyReport::write_json(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "{\"trainable_params\": %lld, \"train_seconds\": %.6f, "
                "\"mean_eval_seconds\": %.6f}\n",
                trainable_params, train_seconds, mean_eval_seconds);
  out << buf;
}

namespace {

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw ConfigError("missing " + what + " path in configuration");
  if (!fs::exists(path)) throw ConfigError(what + " path does not exist: " + path);
}

/// Dense semantic matrix aligned with the split's item ids.
numkit::Matrix dense_embeddings(const dataio::SplitDataset& ds, const std::string& path) {
  const numkit::Matrix raw = dataio::load_embedding_matrix(path);
  numkit::Matrix dense(static_cast<std::size_t>(ds.n_items), raw.cols());
  for (int i = 0; i < ds.n_items; ++i) {
    const int orig = ds.item_map[static_cast<std::size_t>(i)];
    if (orig < 0 || static_cast<std::size_t>(orig) >= raw.rows())
      throw DataError("item id " + std::to_string(orig) + " has no embedding row (matrix has " +
                      std::to_string(raw.rows()) + " rows)");
    for (std::size_t j = 0; j < raw.cols(); ++j)
      dense(static_cast<std::size_t>(i), j) = raw(static_cast<std::size_t>(orig), j);
  }
  return dense;
}

}  // namespace

void cmd_preprocess(const RunConfig& cfg) {
  cfg.validate();
  require_file(cfg.interactions, "interactions");
  fs::create_directories(cfg.out);
  cfg.write_echo(cfg.out);

  const dataio::InteractionLog log = dataio::load_interactions(cfg.interactions,
                                                               cfg.min_interactions);
  const dataio::SplitDataset ds =
      dataio::chronological_split(log, cfg.train_ratio, cfg.valid_ratio, cfg.max_len);
  dataio::save_split(cfg.out + "/splits.bin", ds);

  const auto interactions = log.total_interactions();
  const double density =
      log.n_users > 0 && log.n_items > 0
          ? static_cast<double>(interactions) /
                (static_cast<double>(log.n_users) * static_cast<double>(log.n_items))
          : 0.0;
  std::ofstream stats(cfg.out + "/stats.csv", std::ios::trunc);
  if (!stats) throw DataError("cannot write stats.csv");
  char buf[160];
  std::snprintf(buf, sizeof(buf), "users,items,interactions,density\n%d,%d,%zu,%.6e\n",
                log.n_users, log.n_items, interactions, density);
  stats << buf;
}

void cmd_train(const RunConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.out);
  cfg.write_echo(cfg.out);

  const std::string split_path = cfg.out + "/splits.bin";
  if (!fs::exists(split_path))
    throw ConfigError("missing " + split_path + " (run the preprocess command first)");
  const dataio::SplitDataset ds = dataio::load_split(split_path);

  numkit::Matrix e_dense;
  if (cfg.transform != "none") {
    require_file(cfg.embeddings, "embeddings");
    e_dense = dense_embeddings(ds, cfg.embeddings);
  }

  const TrainOutcome outcome = train_model(cfg, ds, e_dense);

  adapter::save_checkpoint(cfg.out + "/checkpoint.bin", outcome.best_checkpoint);
  std::ofstream log(cfg.out + "/train_log.jsonl", std::ios::trunc);
  if (!log) throw DataError("cannot write train_log.jsonl");
  for (const auto& line : outcome.log_lines) log << line << "\n";

  EfficiencyReport eff;
  eff.trainable_params = outcome.trainable_params;
  eff.train_seconds = outcome.train_seconds;
  eff.mean_eval_seconds = outcome.mean_eval_seconds;
  eff.write_json(cfg.out + "/efficiency.json");
}

void cmd_evaluate(const RunConfig& cfg, const std::string& checkpoint_path) {
  cfg.validate();
  require_file(checkpoint_path, "checkpoint");
  fs::create_directories(cfg.out);
  cfg.write_echo(cfg.out);

  const std::string split_path = cfg.out + "/splits.bin";
  if (!fs::exists(split_path))
    throw ConfigError("missing " + split_path + " (run the preprocess command first)");
  const dataio::SplitDataset ds = dataio::load_split(split_path);

  const adapter::Checkpoint ckpt = adapter::load_checkpoint(checkpoint_path);
  numkit::Matrix e_dense;
  if (static_cast<Transform>(static_cast<int>(ckpt.meta("meta.transform"))) != Transform::none) {
    require_file(cfg.embeddings, "embeddings");
    e_dense = dense_embeddings(ds, cfg.embeddings);
  }
  ModelContext model = model_from_checkpoint(ckpt, cfg, ds, e_dense);

  const evalkit::MetricsRow metrics =
      evaluate_partition(model, ds, dataio::Partition::test, cfg.exclude_history_eval);
  std::ofstream csv(cfg.out + "/metrics.csv", std::ios::trunc);
  if (!csv) throw DataError("cannot write metrics.csv");
  metrics.write_csv(csv);
  std::ofstream json(cfg.out + "/metrics.json", std::ios::trunc);
  if (!json) throw DataError("cannot write metrics.json");
  metrics.write_json(json);
}

void cmd_diagnose(const RunConfig& cfg, const std::string& checkpoint_path, bool want_weights) {
  cfg.validate();
  require_file(cfg.embeddings, "embeddings");
  fs::create_directories(cfg.out);
  cfg.write_echo(cfg.out);

  const numkit::Matrix raw = dataio::load_embedding_matrix(cfg.embeddings);
  const int top_k = static_cast<int>(std::min<std::size_t>(raw.cols(), 64));
  {
    const spectral::SpectrumReport rep = spectral::cumulative_spectrum(raw, top_k);
    std::ofstream csv(cfg.out + "/spectrum.csv", std::ios::trunc);
    if (!csv) throw DataError("cannot write spectrum.csv");
    rep.write_csv(csv);
  }

  if (checkpoint_path.empty()) {
    if (want_weights)
      throw ConfigError("weight report requested but no checkpoint was given");
    return;
  }
  require_file(checkpoint_path, "checkpoint");

  const std::string split_path = cfg.out + "/splits.bin";
  if (!fs::exists(split_path))
    throw ConfigError("missing " + split_path + " (run the preprocess command first)");
  const dataio::SplitDataset ds = dataio::load_split(split_path);
  const adapter::Checkpoint ckpt = adapter::load_checkpoint(checkpoint_path);
  const auto kind = static_cast<Transform>(static_cast<int>(ckpt.meta("meta.transform")));
  if (want_weights && kind != Transform::spectran)
    throw ConfigError("spectral weight report is only defined for spectran checkpoints, got " +
                      transform_name(kind));

  const numkit::Matrix e_dense = dense_embeddings(ds, cfg.embeddings);
  RunConfig eval_cfg = cfg;
  eval_cfg.d = static_cast<int>(ckpt.meta("meta.d"));
  ModelContext model = model_from_checkpoint(ckpt, eval_cfg, ds, e_dense);

  const numkit::Matrix e_s = model.e_s_plain();
  if (!e_s.empty()) {
    const int proj_top_k = static_cast<int>(std::min<std::size_t>(e_s.cols(), 64));
    const spectral::SpectrumReport rep = spectral::cumulative_spectrum(e_s, proj_top_k);
    std::ofstream csv(cfg.out + "/spectrum_projected.csv", std::ios::trunc);
    if (!csv) throw DataError("cannot write spectrum_projected.csv");
    rep.write_csv(csv);
  }

  if (kind == Transform::spectran) {
    const numkit::Matrix& alpha = model.params.value(adapter::kSpectranAlpha);
    const adapter::SpectralWeightReport rep = adapter::spectral_weight_report(
        *model.svd, model.params.value(adapter::kSpectranQ),
        model.params.value(adapter::kSpectranK),
        std::vector<double>(alpha.data(), alpha.data() + alpha.size()),
        model.params.value(adapter::kSpectranLambda)(0, 0), model.spectran_cfg.d);
    std::ofstream csv(cfg.out + "/weights.csv", std::ios::trunc);
    if (!csv) throw DataError("cannot write weights.csv");
    char buf[160];
    std::snprintf(buf, sizeof(buf), "name,principal_total,subordinate_total\n%s,%.17g,%.17g\n",
                  "checkpoint", rep.principal_total, rep.subordinate_total);
    csv << buf;
  }
}

void cmd_synth(const RunConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.out);
  cfg.write_echo(cfg.out);
  dataio::SynthConfig synth_cfg = cfg.synth;
  synth_cfg.seed = cfg.seed;
  const dataio::SynthResult result = dataio::synth_generate(synth_cfg);
  dataio::write_emb1(cfg.out + "/embeddings.bin", result.embeddings);
  dataio::write_interactions_tsv(cfg.out + "/interactions.tsv", result.log);
}

}  // namespace spectran::cli
