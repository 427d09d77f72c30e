#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "spectran/dataio/split.hpp"
#include "spectran/numkit/matrix.hpp"

namespace spectran::evalkit {

/// Leave-one-out ranking metrics, means over the evaluated users.
struct MetricsRow {
  double hr10 = 0.0;
  double hr20 = 0.0;
  double ndcg10 = 0.0;
  double ndcg20 = 0.0;
  int users = 0;

  void write_csv(std::ostream& os) const;   // header hr10,hr20,ndcg10,ndcg20,users
  void write_json(std::ostream& os) const;
};

/// 1-based rank of the target among all catalog items by descending score.
/// Excluded ids are removed from the candidate set; passing the target inside
/// the exclusion set is a contract error. Ties break by ascending item id.
int rank_target(std::span<const double> scores, int target, const std::vector<int>& exclude);

/// Convenience overload scoring dot(user_repr, E_item[i]) per item.
int rank_target(const numkit::Matrix& user_repr_row, const numkit::Matrix& e_item, int target,
                const std::vector<int>& exclude);

int hr_at_k(int rank, int k);        // 1 if rank <= k else 0
double ndcg_at_k(int rank, int k);   // 1/log2(rank+1) if rank <= k else 0

MetricsRow aggregate_ranks(const std::vector<int>& ranks);

/// Scorer: given user rows of the dataset, return a (#users x N) score matrix.
using BatchScorer = std::function<numkit::Matrix(const std::vector<int>& user_rows)>;

/// Evaluate one partition: rank each user's held-out target over the full
/// catalog (history minus target excluded when exclude_history is set) and
/// average the per-user metrics. Deterministic for a fixed model.
MetricsRow evaluate_split(const dataio::SplitDataset& ds, dataio::Partition part,
                          const BatchScorer& scorer, bool exclude_history = true,
                          int eval_batch = 256);

}  // namespace spectran::evalkit
