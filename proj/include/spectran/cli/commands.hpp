#pragma once

#include <string>

#include "spectran/cli/config.hpp"

namespace spectran::cli {

/// Trainable parameter count plus wall-clock accounting for a training run.
struct EfficiencyReport {
  long long trainable_params = 0;
  double train_seconds = 0.0;
  double mean_eval_seconds = 0.0;

  void write_json(const std::string& path) const;
};

// Subcommands. Each writes fixed filenames under cfg.out and echoes the
// resolved configuration to <out>/config_echo.toml. Errors are thrown as the
// typed exceptions from errors.hpp; the binary maps them to exit codes.

/// splits.bin + stats.csv from the interaction log.
void cmd_preprocess(const RunConfig& cfg);

/// checkpoint.bin + train_log.jsonl + efficiency.json.
void cmd_train(const RunConfig& cfg);

/// metrics.csv + metrics.json for the test partition of the split.
void cmd_evaluate(const RunConfig& cfg, const std::string& checkpoint_path);

/// spectrum.csv for the raw embeddings; with a checkpoint also
/// spectrum_projected.csv and, for spectral-attention checkpoints,
/// weights.csv. `want_weights` forces the weight report and errors on
/// checkpoints of any other transform.
void cmd_diagnose(const RunConfig& cfg, const std::string& checkpoint_path, bool want_weights);

/// embeddings.bin + interactions.tsv from the [synth] section.
void cmd_synth(const RunConfig& cfg);

}  // namespace spectran::cli
