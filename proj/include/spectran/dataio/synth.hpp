#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "spectran/dataio/interactions.hpp"
#include "spectran/numkit/matrix.hpp"

namespace spectran::dataio {

/// Desk-scale benchmark generator: a semantic matrix with a planted geometric
/// singular spectrum, and interaction sequences drawn from a latent-factor
/// preference model whose item factors are the planted left singular
/// directions, so semantic content genuinely predicts behavior.
struct SynthConfig {
  int n_items = 500;
  int n_users = 200;
  int sem_dim = 64;      // l
  int latent_rank = 8;   // k <= min(n_items, sem_dim)
  double sigma1 = 25.0;  // leading singular value
  double decay = 0.9;    // geometric profile: sigma_i = sigma1 * decay^i
  double noise = 0.0;    // iid Gaussian noise scale added to the matrix
  double factor_scale = 1.0;  // preference sharpness: scales the item factors
  int min_seq = 5;
  int max_seq = 20;
  std::uint64_t seed = 1;
};

struct SynthResult {
  numkit::Matrix embeddings;          // n_items x sem_dim
  std::vector<Interaction> log;       // unfiltered raw interactions
};

SynthResult synth_generate(const SynthConfig& cfg);

}  // namespace spectran::dataio
