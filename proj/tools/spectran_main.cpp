#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "spectran/cli/commands.hpp"
#include "spectran/errors.hpp"

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out;
  long long seed = -1;
  bool deterministic = false;
  bool non_deterministic = false;
};

spectran::cli::RunConfig resolve_config(const GlobalArgs& args) {
  spectran::cli::RunConfig cfg;
  if (!args.config_path.empty())
    cfg = spectran::cli::RunConfig::from_file(args.config_path);
  if (args.seed >= 0) {
    cfg.seed = static_cast<std::uint64_t>(args.seed);
    cfg.synth.seed = cfg.seed;
  }
  if (!args.out.empty()) cfg.out = args.out;
  if (args.deterministic) cfg.deterministic = true;
  if (args.non_deterministic) cfg.deterministic = false;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral-aware semantic embedding adapter for sequential recommendation"};
  app.require_subcommand(1);

  GlobalArgs args;
  app.add_option("--config", args.config_path, "Run configuration file (TOML)");
  app.add_option("--out", args.out, "Output directory (overrides the config)");
  app.add_option("--seed", args.seed, "Master seed (overrides the config)");
  app.add_flag("--deterministic", args.deterministic, "Force single-threaded deterministic mode");
  app.add_flag("--no-deterministic", args.non_deterministic, "Allow non-deterministic execution");

  auto* preprocess = app.add_subcommand("preprocess", "Build leave-one-out splits from a TSV log");
  auto* train = app.add_subcommand("train", "Train the configured transform and backbone");
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a checkpoint on the test partition");
  auto* diagnose = app.add_subcommand("diagnose", "Spectrum and spectral-weight diagnostics");
  auto* synth = app.add_subcommand("synth", "Generate a synthetic benchmark dataset");

  std::string checkpoint_path;
  evaluate->add_option("--checkpoint", checkpoint_path, "Checkpoint file to evaluate");
  std::string diag_checkpoint;
  bool want_weights = false;
  diagnose->add_option("--checkpoint", diag_checkpoint, "Optional checkpoint to project");
  diagnose->add_flag("--weights", want_weights, "Emit the spectral weight report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    const spectran::cli::RunConfig cfg = resolve_config(args);
    if (preprocess->parsed()) {
      spectran::cli::cmd_preprocess(cfg);
    } else if (train->parsed()) {
      spectran::cli::cmd_train(cfg);
    } else if (evaluate->parsed()) {
      if (checkpoint_path.empty()) checkpoint_path = cfg.out + "/checkpoint.bin";
      spectran::cli::cmd_evaluate(cfg, checkpoint_path);
    } else if (diagnose->parsed()) {
      spectran::cli::cmd_diagnose(cfg, diag_checkpoint, want_weights);
    } else if (synth->parsed()) {
      spectran::cli::cmd_synth(cfg);
    }
  } catch (const spectran::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const spectran::DimensionError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const spectran::ContractError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const spectran::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const spectran::NumericError& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
