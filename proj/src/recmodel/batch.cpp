#include "spectran/recmodel/batch.hpp"

#include <algorithm>

#include "spectran/errors.hpp"
#include "spectran/recmodel/loss.hpp"

namespace spectran::recmodel {

namespace {

Batch base_batch(const dataio::SplitDataset& ds, const std::vector<int>& user_rows) {
  if (user_rows.empty()) throw ContractError("make_batch: empty user list");
  Batch batch;
  batch.b = static_cast<int>(user_rows.size());
  batch.len = ds.max_len;
  batch.pad_id = ds.n_items;
  batch.ids.assign(static_cast<std::size_t>(batch.b * batch.len), batch.pad_id);
  batch.targets.resize(static_cast<std::size_t>(batch.b));
  for (int b = 0; b < batch.b; ++b) {
    const auto& u = ds.users[static_cast<std::size_t>(user_rows[static_cast<std::size_t>(b)])];
    const int h = static_cast<int>(u.history.size());
    const int start = batch.len - h;
    for (int i = 0; i < h; ++i)
      batch.ids[static_cast<std::size_t>(b * batch.len + start + i)] =
          u.history[static_cast<std::size_t>(i)];
    batch.targets[static_cast<std::size_t>(b)] = u.target;
  }
  return batch;
}

}  // namespace

Batch make_batch(const dataio::SplitDataset& ds, const std::vector<int>& user_rows, int k_neg,
                 numkit::Rng& neg_rng, bool exclude_history) {
  Batch batch = base_batch(ds, user_rows);
  batch.k_neg = k_neg;
  batch.negatives.reserve(static_cast<std::size_t>(batch.b * k_neg));
  for (int b = 0; b < batch.b; ++b) {
    const auto& u = ds.users[static_cast<std::size_t>(user_rows[static_cast<std::size_t>(b)])];
    std::vector<int> exclude;
    if (exclude_history) {
      exclude = u.history;
      std::sort(exclude.begin(), exclude.end());
      exclude.erase(std::unique(exclude.begin(), exclude.end()), exclude.end());
    }
    const auto negs = sample_negatives(neg_rng, u.target, ds.n_items, k_neg,
                                       exclude_history ? &exclude : nullptr);
    batch.negatives.insert(batch.negatives.end(), negs.begin(), negs.end());
  }
  return batch;
}

Batch make_eval_batch(const dataio::SplitDataset& ds, const std::vector<int>& user_rows) {
  return base_batch(ds, user_rows);
}

}  // namespace spectran::recmodel
