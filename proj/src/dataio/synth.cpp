#include "spectran/dataio/synth.hpp"

#include <algorithm>
#include <cmath>

#include "spectran/errors.hpp"
#include "spectran/numkit/rng.hpp"

namespace spectran::dataio {

using numkit::Matrix;
using numkit::Rng;

namespace {

// Random matrix with orthonormal columns via modified Gram-Schmidt.
Matrix random_orthonormal(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix q(rows, cols);
  for (std::size_t j = 0; j < cols; ++j) {
    std::vector<double> v(rows);
    for (auto& x : v) x = rng.normal();
    for (std::size_t p = 0; p < j; ++p) {
      double dot = 0.0;
      for (std::size_t i = 0; i < rows; ++i) dot += q(i, p) * v[i];
      for (std::size_t i = 0; i < rows; ++i) v[i] -= dot * q(i, p);
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-12) throw NumericError("random_orthonormal: degenerate column");
    for (std::size_t i = 0; i < rows; ++i) q(i, j) = v[i] / norm;
  }
  return q;
}

}  // namespace

SynthResult synth_generate(const SynthConfig& cfg) {
  const int n = cfg.n_items, m = cfg.n_users, l = cfg.sem_dim, k = cfg.latent_rank;
  if (k < 1 || k > std::min(n, l))
    throw ConfigError("synth_generate: latent_rank must be in [1, min(n_items, sem_dim)]");
  if (!(cfg.decay > 0.0) || cfg.decay > 1.0)
    throw ConfigError("synth_generate: decay must be in (0, 1]");
  if (cfg.noise < 0.0) throw ConfigError("synth_generate: noise must be >= 0");
  if (cfg.min_seq < 3 || cfg.max_seq < cfg.min_seq)
    throw ConfigError("synth_generate: need 3 <= min_seq <= max_seq");
  if (cfg.max_seq > n) throw ConfigError("synth_generate: max_seq exceeds item count");
  if (!(cfg.sigma1 > 0.0)) throw ConfigError("synth_generate: sigma1 must be > 0");

  Rng rng = Rng::stream(cfg.seed, "synth");

  const Matrix u0 = random_orthonormal(static_cast<std::size_t>(n), static_cast<std::size_t>(k), rng);
  const Matrix v0 = random_orthonormal(static_cast<std::size_t>(l), static_cast<std::size_t>(k), rng);

  std::vector<double> s(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) s[static_cast<std::size_t>(i)] = cfg.sigma1 * std::pow(cfg.decay, i);

  Matrix e(static_cast<std::size_t>(n), static_cast<std::size_t>(l));
  for (std::size_t i = 0; i < e.rows(); ++i)
    for (std::size_t j = 0; j < e.cols(); ++j) {
      double acc = 0.0;
      for (int t = 0; t < k; ++t)
        acc += u0(i, static_cast<std::size_t>(t)) * s[static_cast<std::size_t>(t)] *
               v0(j, static_cast<std::size_t>(t));
      e(i, j) = acc;
    }
  if (cfg.noise > 0.0)
    for (std::size_t i = 0; i < e.size(); ++i) e.data()[i] += cfg.noise * rng.normal();

  // Item factors are the planted left singular directions, scaled so the
  // user-item logits have standard deviation ~factor_scale at temperature 1:
  // rows of sqrt(N/k) U0 have unit norm in expectation and w ~ N(0, I_k).
  const double factor_scale =
      cfg.factor_scale * std::sqrt(static_cast<double>(n) / static_cast<double>(k));
  Matrix z(static_cast<std::size_t>(n), static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t j = 0; j < z.cols(); ++j) z(i, j) = factor_scale * u0(i, j);

  SynthResult out;
  out.embeddings = std::move(e);

  std::vector<double> logits(static_cast<std::size_t>(n));
  std::vector<char> used(static_cast<std::size_t>(n));
  for (int u = 0; u < m; ++u) {
    std::vector<double> w(static_cast<std::size_t>(k));
    for (auto& x : w) x = rng.normal();
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int t = 0; t < k; ++t)
        acc += z(static_cast<std::size_t>(i), static_cast<std::size_t>(t)) *
               w[static_cast<std::size_t>(t)];
      logits[static_cast<std::size_t>(i)] = acc;
    }
    const int len = cfg.min_seq +
                    static_cast<int>(rng.uniform_int(
                        static_cast<std::uint64_t>(cfg.max_seq - cfg.min_seq + 1)));
    const std::int64_t base = static_cast<std::int64_t>(rng.uniform_int(1000000));
    std::fill(used.begin(), used.end(), 0);
    double mx = *std::max_element(logits.begin(), logits.end());
    for (int j = 0; j < len; ++j) {
      // Sample from the softmax over unused items (without replacement).
      double total = 0.0;
      for (int i = 0; i < n; ++i)
        if (!used[static_cast<std::size_t>(i)])
          total += std::exp(logits[static_cast<std::size_t>(i)] - mx);
      double r = rng.uniform() * total;
      int pick = -1;
      for (int i = 0; i < n; ++i) {
        if (used[static_cast<std::size_t>(i)]) continue;
        r -= std::exp(logits[static_cast<std::size_t>(i)] - mx);
        if (r <= 0.0) {
          pick = i;
          break;
        }
      }
      if (pick < 0)  // numerical leftover; take the last unused item
        for (int i = n - 1; i >= 0; --i)
          if (!used[static_cast<std::size_t>(i)]) {
            pick = i;
            break;
          }
      used[static_cast<std::size_t>(pick)] = 1;
      out.log.push_back({u, pick, base + j});
    }
  }
  return out;
}

}  // namespace spectran::dataio
