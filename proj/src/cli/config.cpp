#include "spectran/cli/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spectran/errors.hpp"

namespace spectran::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  std::size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

}  // namespace

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
  ConfigFile cf;
  cf.origin_ = origin;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key or value");
    cf.values_[(section.empty() ? key : section + "." + key)] = value;
  }
  return cf;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::string v = it->second;
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(origin_ + ": key '" + key + "' is not a number: " + it->second);
  }
}

std::int64_t ConfigFile::get_int(const std::string& key, std::int64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const std::int64_t v = std::stoll(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(origin_ + ": key '" + key + "' is not an integer: " + it->second);
  }
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true") return true;
  if (it->second == "false") return false;
  throw ConfigError(origin_ + ": key '" + key + "' is not a boolean: " + it->second);
}

std::vector<double> ConfigFile::get_array(const std::string& key,
                                          std::vector<double> fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& v = it->second;
  if (v.size() < 2 || v.front() != '[' || v.back() != ']')
    throw ConfigError(origin_ + ": key '" + key + "' is not an array: " + v);
  std::vector<double> out;
  std::stringstream ss(v.substr(1, v.size() - 2));
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    cell = trim(cell);
    if (cell.empty()) continue;
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw ConfigError(origin_ + ": bad array element '" + cell + "' for key '" + key + "'");
    }
  }
  return out;
}

RunConfig RunConfig::from_config(const ConfigFile& f) {
  RunConfig c;
  c.embeddings = f.get_string("run.embeddings", c.embeddings);
  c.interactions = f.get_string("run.interactions", c.interactions);
  c.out = f.get_string("run.out", c.out);
  c.seed = static_cast<std::uint64_t>(f.get_int("run.seed", static_cast<std::int64_t>(c.seed)));
  c.deterministic = f.get_bool("run.deterministic", c.deterministic);
  const auto ratios = f.get_array("run.split_ratios", {c.train_ratio, c.valid_ratio,
                                                       1.0 - c.train_ratio - c.valid_ratio});
  if (ratios.size() != 3) throw ConfigError("run.split_ratios must have 3 entries");
  c.train_ratio = ratios[0];
  c.valid_ratio = ratios[1];
  c.max_len = static_cast<int>(f.get_int("run.max_len", c.max_len));
  c.min_interactions = static_cast<int>(f.get_int("run.min_interactions", c.min_interactions));

  c.transform = f.get_string("model.transform", c.transform);
  c.fusion = f.get_string("model.fusion", c.fusion);
  c.d = static_cast<int>(f.get_int("model.d", c.d));
  c.m = static_cast<int>(f.get_int("model.m", c.m));
  c.taylor_n = static_cast<int>(f.get_int("model.taylor_n", c.taylor_n));
  c.tau = f.get_double("model.tau", c.tau);
  c.mlp_hidden = static_cast<int>(f.get_int("model.mlp_hidden", c.mlp_hidden));
  c.mlp_activation = f.get_string("model.mlp_activation", c.mlp_activation);
  c.blocks = static_cast<int>(f.get_int("model.blocks", c.blocks));
  c.heads = static_cast<int>(f.get_int("model.heads", c.heads));

  c.lr = f.get_double("train.lr", c.lr);
  c.batch = static_cast<int>(f.get_int("train.batch", c.batch));
  c.weight_decay = f.get_double("train.weight_decay", c.weight_decay);
  c.dropout = f.get_double("train.dropout", c.dropout);
  c.epochs = static_cast<int>(f.get_int("train.epochs", c.epochs));
  c.patience = static_cast<int>(f.get_int("train.patience", c.patience));
  c.neg_k = static_cast<int>(f.get_int("train.negatives", c.neg_k));
  c.exclude_history_eval = f.get_bool("train.exclude_history_eval", c.exclude_history_eval);
  c.exclude_history_negatives =
      f.get_bool("train.exclude_history_negatives", c.exclude_history_negatives);
  c.emb_init_std = f.get_double("train.emb_init_std", c.emb_init_std);

  c.synth.n_items = static_cast<int>(f.get_int("synth.n_items", c.synth.n_items));
  c.synth.n_users = static_cast<int>(f.get_int("synth.n_users", c.synth.n_users));
  c.synth.sem_dim = static_cast<int>(f.get_int("synth.sem_dim", c.synth.sem_dim));
  c.synth.latent_rank = static_cast<int>(f.get_int("synth.latent_rank", c.synth.latent_rank));
  c.synth.sigma1 = f.get_double("synth.sigma1", c.synth.sigma1);
  c.synth.decay = f.get_double("synth.decay", c.synth.decay);
  c.synth.noise = f.get_double("synth.noise", c.synth.noise);
  c.synth.factor_scale = f.get_double("synth.factor_scale", c.synth.factor_scale);
  c.synth.min_seq = static_cast<int>(f.get_int("synth.min_seq", c.synth.min_seq));
  c.synth.max_seq = static_cast<int>(f.get_int("synth.max_seq", c.synth.max_seq));
  c.synth.seed = c.seed;
  return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
  return from_config(ConfigFile::parse_file(path));
}

void RunConfig::validate() const {
  if (d < 1) throw ConfigError("model.d must be >= 1");
  if (max_len < 1) throw ConfigError("run.max_len must be >= 1");
  if (!(tau > 0.0)) throw ConfigError("model.tau must be > 0");
  if (batch < 1) throw ConfigError("train.batch must be >= 1");
  if (neg_k < 1) throw ConfigError("train.negatives must be >= 1");
  if (epochs < 1 || patience < 1) throw ConfigError("train.epochs and train.patience must be >= 1");
  if (taylor_n < 0 || taylor_n > 8) throw ConfigError("model.taylor_n must be in [0, 8]");
  if (!(train_ratio > 0.0) || !(valid_ratio >= 0.0) || train_ratio + valid_ratio >= 1.0)
    throw ConfigError("split ratios must leave room for a test partition");
  if (transform != "spectran" && transform != "mlp" && transform != "svd_truncate" &&
      transform != "svd_identity" && transform != "none")
    throw ConfigError("unknown model.transform: " + transform);
  if (fusion != "add" && fusion != "concat_project" && fusion != "semantic_init")
    throw ConfigError("unknown model.fusion: " + fusion);
}

void RunConfig::echo_toml(std::ostream& os) const {
  char buf[256];
  os << "[run]\n";
  os << "embeddings = \"" << embeddings << "\"\n";
  os << "interactions = \"" << interactions << "\"\n";
  os << "out = \"" << out << "\"\n";
  os << "seed = " << seed << "\n";
  os << "deterministic = " << (deterministic ? "true" : "false") << "\n";
  std::snprintf(buf, sizeof(buf), "split_ratios = [%g, %g, %g]\n", train_ratio, valid_ratio,
                1.0 - train_ratio - valid_ratio);
  os << buf;
  os << "max_len = " << max_len << "\n";
  os << "min_interactions = " << min_interactions << "\n\n";

  os << "[model]\n";
  os << "transform = \"" << transform << "\"\n";
  os << "fusion = \"" << fusion << "\"\n";
  os << "d = " << d << "\n";
  os << "m = " << (m > 0 ? m : d) << "\n";
  os << "taylor_n = " << taylor_n << "\n";
  std::snprintf(buf, sizeof(buf), "tau = %g\n", tau);
  os << buf;
  os << "mlp_hidden = " << mlp_hidden << "\n";
  os << "mlp_activation = \"" << mlp_activation << "\"\n";
  os << "blocks = " << blocks << "\n";
  os << "heads = " << heads << "\n\n";

  os << "[train]\n";
  std::snprintf(buf, sizeof(buf), "lr = %g\n", lr);
  os << buf;
  os << "batch = " << batch << "\n";
  std::snprintf(buf, sizeof(buf), "weight_decay = %g\ndropout = %g\n", weight_decay, dropout);
  os << buf;
  os << "epochs = " << epochs << "\n";
  os << "patience = " << patience << "\n";
  os << "negatives = " << neg_k << "\n";
  os << "exclude_history_eval = " << (exclude_history_eval ? "true" : "false") << "\n";
  os << "exclude_history_negatives = " << (exclude_history_negatives ? "true" : "false") << "\n";
  std::snprintf(buf, sizeof(buf), "emb_init_std = %g\n", emb_init_std);
  os << buf;
  os << "\n[synth]\n";
  os << "n_items = " << synth.n_items << "\n";
  os << "n_users = " << synth.n_users << "\n";
  os << "sem_dim = " << synth.sem_dim << "\n";
  os << "latent_rank = " << synth.latent_rank << "\n";
  std::snprintf(buf, sizeof(buf), "sigma1 = %g\ndecay = %g\nnoise = %g\nfactor_scale = %g\n",
                synth.sigma1, synth.decay, synth.noise, synth.factor_scale);
  os << buf;
  os << "min_seq = " << synth.min_seq << "\n";
  os << "max_seq = " << synth.max_seq << "\n";
}

void RunConfig::write_echo(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  std::ofstream out_file(dir + "/config_echo.toml", std::ios::trunc);
  if (!out_file) throw DataError("cannot write config echo in " + dir);
  echo_toml(out_file);
}

}  // namespace spectran::cli
