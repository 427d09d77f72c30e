#pragma once

#include <span>
#include <vector>

#include "spectran/numkit/rng.hpp"
#include "spectran/numkit/tape.hpp"

namespace spectran::recmodel {

/// Contrastive next-item loss for a single sequence:
///   -log( exp(s+/tau) / (exp(s+/tau) + sum_j exp(s_j/tau)) )
/// stabilized by max-subtraction. temperature must be > 0.
double infonce_loss(double pos_score, std::span<const double> neg_scores, double temperature);

/// Batched tape version; pos is b x 1, neg is b x k; returns the 1x1 mean.
numkit::Tape::Id infonce_loss_node(numkit::Tape& tape, numkit::Tape::Id pos, numkit::Tape::Id neg,
                                   double temperature);

/// k ids drawn uniformly with replacement from [0, n_items) \ {target}.
/// The optional exclusion set additionally rejects a user's history items.
std::vector<int> sample_negatives(numkit::Rng& rng, int target, int n_items, int k,
                                  const std::vector<int>* exclude_sorted = nullptr);

}  // namespace spectran::recmodel
