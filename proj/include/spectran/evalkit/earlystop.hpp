#pragma once

#include <limits>

namespace spectran::evalkit {

/// Early stopping on validation NDCG@20: a strict improvement resets the
/// counter and marks a new best checkpoint; `patience` non-improving epochs
/// in a row stop training.
struct EarlyStopState {
  double best = -std::numeric_limits<double>::infinity();
  int epochs_since = 0;
  int patience = 10;
  int best_epoch = 0;
};

struct EarlyStopDecision {
  bool improved = false;
  bool stop = false;
};

inline EarlyStopDecision early_stop_update(EarlyStopState& state, double ndcg20, int epoch) {
  EarlyStopDecision d;
  if (ndcg20 > state.best) {
    state.best = ndcg20;
    state.best_epoch = epoch;
    state.epochs_since = 0;
    d.improved = true;
  } else {
    ++state.epochs_since;
    if (state.epochs_since >= state.patience) d.stop = true;
  }
  return d;
}

}  // namespace spectran::evalkit
