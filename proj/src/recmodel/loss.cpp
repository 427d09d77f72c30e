#include "spectran/recmodel/loss.hpp"

#include <algorithm>
#include <cmath>

#include "spectran/errors.hpp"

namespace spectran::recmodel {

double infonce_loss(double pos_score, std::span<const double> neg_scores, double temperature) {
  if (!(temperature > 0.0)) throw ContractError("infonce_loss: temperature must be > 0");
  const double zp = pos_score / temperature;
  double mx = zp;
  for (double s : neg_scores) mx = std::max(mx, s / temperature);
  double denom = std::exp(zp - mx);
  for (double s : neg_scores) denom += std::exp(s / temperature - mx);
  return -(zp - mx - std::log(denom));
}

numkit::Tape::Id infonce_loss_node(numkit::Tape& tape, numkit::Tape::Id pos, numkit::Tape::Id neg,
                                   double temperature) {
  if (!(temperature > 0.0)) throw ContractError("infonce_loss: temperature must be > 0");
  const double inv_tau = 1.0 / temperature;
  auto zp = tape.scale(pos, inv_tau);
  auto zn = tape.scale(neg, inv_tau);
  auto lse = tape.logsumexp_rows(tape.concat_cols(zp, zn));
  return tape.mean_all(tape.sub(lse, zp));
}

std::vector<int> sample_negatives(numkit::Rng& rng, int target, int n_items, int k,
                                  const std::vector<int>* exclude_sorted) {
  if (n_items < 2) throw ContractError("sample_negatives: need at least 2 items");
  if (target < 0 || target >= n_items) throw ContractError("sample_negatives: bad target id");
  if (exclude_sorted != nullptr && static_cast<int>(exclude_sorted->size()) >= n_items - 1)
    throw ContractError("sample_negatives: exclusion set leaves no candidates");
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(k));
  while (static_cast<int>(out.size()) < k) {
    // Uniform over [0, n_items) minus the target.
    int x = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_items - 1)));
    if (x >= target) ++x;
    if (exclude_sorted != nullptr &&
        std::binary_search(exclude_sorted->begin(), exclude_sorted->end(), x))
      continue;
    out.push_back(x);
  }
  return out;
}

}  // namespace spectran::recmodel
