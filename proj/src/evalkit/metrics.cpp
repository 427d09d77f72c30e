#include "spectran/evalkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "spectran/numkit/format.hpp"

#include "spectran/errors.hpp"

namespace spectran::evalkit {

void MetricsRow::write_csv(std::ostream& os) const {
  using numkit::fmt_double;
  os << "hr10,hr20,ndcg10,ndcg20,users\n"
     << fmt_double(hr10) << ',' << fmt_double(hr20) << ',' << fmt_double(ndcg10) << ','
     << fmt_double(ndcg20) << ',' << users << '\n';
}

void MetricsRow::write_json(std::ostream& os) const {
  using numkit::fmt_double;
  os << "{\"hr10\": " << fmt_double(hr10) << ", \"hr20\": " << fmt_double(hr20)
     << ", \"ndcg10\": " << fmt_double(ndcg10) << ", \"ndcg20\": " << fmt_double(ndcg20)
     << ", \"users\": " << users << "}\n";
}

int rank_target(std::span<const double> scores, int target, const std::vector<int>& exclude) {
  if (target < 0 || static_cast<std::size_t>(target) >= scores.size())
    throw ContractError("rank_target: target out of range");
  for (int e : exclude)
    if (e == target) throw ContractError("rank_target: target is in the excluded set");
  std::vector<char> removed(scores.size(), 0);
  for (int e : exclude)
    if (e >= 0 && static_cast<std::size_t>(e) < scores.size())
      removed[static_cast<std::size_t>(e)] = 1;
  const double st = scores[static_cast<std::size_t>(target)];
  int rank = 1;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (removed[j] || static_cast<int>(j) == target) continue;
    if (scores[j] > st || (scores[j] == st && static_cast<int>(j) < target)) ++rank;
  }
  return rank;
}

int rank_target(const numkit::Matrix& user_repr_row, const numkit::Matrix& e_item, int target,
                const std::vector<int>& exclude) {
  if (user_repr_row.rows() != 1 || user_repr_row.cols() != e_item.cols())
    throw DimensionError("rank_target: user representation must be 1 x d");
  std::vector<double> scores(e_item.rows());
  for (std::size_t i = 0; i < e_item.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < e_item.cols(); ++j) s += user_repr_row(0, j) * e_item(i, j);
    scores[i] = s;
  }
  return rank_target(std::span<const double>(scores), target, exclude);
}

int hr_at_k(int rank, int k) {
  if (rank < 1) throw ContractError("hr_at_k: rank must be >= 1");
  return rank <= k ? 1 : 0;
}

double ndcg_at_k(int rank, int k) {
  if (rank < 1) throw ContractError("ndcg_at_k: rank must be >= 1");
  if (rank > k) return 0.0;
  return 1.0 / std::log2(static_cast<double>(rank) + 1.0);
}

MetricsRow aggregate_ranks(const std::vector<int>& ranks) {
  if (ranks.empty()) throw ContractError("aggregate_ranks: no users evaluated");
  MetricsRow row;
  row.users = static_cast<int>(ranks.size());
  for (int r : ranks) {
    row.hr10 += hr_at_k(r, 10);
    row.hr20 += hr_at_k(r, 20);
    row.ndcg10 += ndcg_at_k(r, 10);
    row.ndcg20 += ndcg_at_k(r, 20);
  }
  const double inv = 1.0 / static_cast<double>(row.users);
  row.hr10 *= inv;
  row.hr20 *= inv;
  row.ndcg10 *= inv;
  row.ndcg20 *= inv;
  return row;
}

MetricsRow evaluate_split(const dataio::SplitDataset& ds, dataio::Partition part,
                          const BatchScorer& scorer, bool exclude_history, int eval_batch) {
  const std::vector<int> rows = ds.users_in(part);
  if (rows.empty()) throw ContractError("evaluate_split: empty partition");
  std::vector<int> ranks;
  ranks.reserve(rows.size());
  for (std::size_t start = 0; start < rows.size(); start += static_cast<std::size_t>(eval_batch)) {
    const std::size_t stop = std::min(rows.size(), start + static_cast<std::size_t>(eval_batch));
    const std::vector<int> chunk(rows.begin() + static_cast<std::ptrdiff_t>(start),
                                 rows.begin() + static_cast<std::ptrdiff_t>(stop));
    const numkit::Matrix scores = scorer(chunk);
    if (scores.rows() != chunk.size() || scores.cols() != static_cast<std::size_t>(ds.n_items))
      throw DimensionError("evaluate_split: scorer returned wrong shape");
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      const auto& u = ds.users[static_cast<std::size_t>(chunk[i])];
      std::vector<int> exclude;
      if (exclude_history) {
        for (int h : u.history)
          if (h != u.target) exclude.push_back(h);
      }
      ranks.push_back(rank_target(
          std::span<const double>(scores.row(i), static_cast<std::size_t>(ds.n_items)), u.target,
          exclude));
    }
  }
  return aggregate_ranks(ranks);
}

}  // namespace spectran::evalkit
