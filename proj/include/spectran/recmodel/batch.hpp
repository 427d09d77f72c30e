#pragma once

#include <vector>

#include "spectran/dataio/split.hpp"
#include "spectran/numkit/rng.hpp"
#include "spectran/recmodel/backbone.hpp"

namespace spectran::recmodel {

/// Assemble a left-padded batch for the given user rows of a split dataset.
/// Negatives are drawn per sequence (k per positive); when
/// exclude_history is set the user's stored history is rejected as well.
Batch make_batch(const dataio::SplitDataset& ds, const std::vector<int>& user_rows, int k_neg,
                 numkit::Rng& neg_rng, bool exclude_history = false);

/// History-only batch for evaluation (no targets drawn, no negatives).
Batch make_eval_batch(const dataio::SplitDataset& ds, const std::vector<int>& user_rows);

}  // namespace spectran::recmodel
