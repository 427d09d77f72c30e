#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "spectran/dataio/synth.hpp"

namespace spectran::cli {

/// Minimal TOML-subset reader: [section] headers, key = value lines with
/// quoted strings, numbers, booleans, bare tokens and flat numeric arrays.
class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_array(const std::string& key, std::vector<double> fallback) const;

 private:
  std::map<std::string, std::string> values_;  // "section.key" -> raw value
  std::string origin_;
};

/// Resolved run configuration with every protocol default pre-filled; flat
/// [run]/[model]/[train] (+[synth]) layout in files and in the echo.
struct RunConfig {
  // [run]
  std::string embeddings;
  std::string interactions;
  std::string out = "out";
  std::uint64_t seed = 1;
  bool deterministic = true;
  double train_ratio = 0.8;
  double valid_ratio = 0.1;
  int max_len = 10;
  int min_interactions = 5;

  // [model]
  std::string transform = "spectran";  // spectran | mlp | svd_truncate | svd_identity | none
  std::string fusion = "add";          // add | concat_project | semantic_init
  int d = 128;
  int m = 0;  // spectral attention inner dim; 0 means m = d
  int taylor_n = 3;
  double tau = 1.0;
  int mlp_hidden = 128;
  std::string mlp_activation = "relu";
  int blocks = 2;
  int heads = 1;

  // [train]
  double lr = 0.001;
  int batch = 256;
  double weight_decay = 0.0;
  double dropout = 0.1;
  int epochs = 200;
  int patience = 10;
  int neg_k = 64;
  bool exclude_history_eval = true;
  bool exclude_history_negatives = false;
  double emb_init_std = 0.1;

  // [synth]
  dataio::SynthConfig synth;

  static RunConfig from_file(const std::string& path);
  static RunConfig from_config(const ConfigFile& file);
  void validate() const;
  void echo_toml(std::ostream& os) const;
  void write_echo(const std::string& dir) const;  // <dir>/config_echo.toml
};

}  // namespace spectran::cli
