#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "spectran/errors.hpp"
#include "spectran/evalkit/earlystop.hpp"
#include "spectran/evalkit/metrics.hpp"

using namespace spectran;
using numkit::Matrix;
using numkit::Rng;

TEST_CASE("rank_target basics and tie-breaks") {
  const std::vector<double> scores{0.1, 0.9, 0.3, 0.9};
  CHECK(evalkit::rank_target(scores, 1, {}) == 1);  // highest score, lowest id among ties
  CHECK(evalkit::rank_target(scores, 3, {}) == 2);  // tied but larger id
  CHECK(evalkit::rank_target(scores, 0, {}) == 4);
  CHECK(evalkit::rank_target(scores, 0, {1, 3}) == 2);  // exclusions shrink the pool

  const std::vector<double> flat(5, 1.0);
  CHECK(evalkit::rank_target(flat, 0, {}) == 1);  // smallest id wins every tie
  CHECK(evalkit::rank_target(flat, 4, {}) == 5);

  CHECK_THROWS_AS(evalkit::rank_target(scores, 1, {1}), ContractError);
  CHECK_THROWS_AS(evalkit::rank_target(scores, 9, {}), ContractError);
}

TEST_CASE("rank_target matches the full-sort oracle on random instances") {
  Rng rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 20;
    std::vector<double> scores(static_cast<std::size_t>(n));
    for (auto& s : scores) s = std::round(rng.normal() * 4.0) / 4.0;  // force some ties
    const int target = static_cast<int>(rng.uniform_int(n));
    std::vector<char> removed(static_cast<std::size_t>(n), 0);
    std::vector<int> exclude;
    for (int j = 0; j < n; ++j)
      if (j != target && rng.uniform() < 0.2) {
        removed[static_cast<std::size_t>(j)] = 1;
        exclude.push_back(j);
      }
    CHECK(evalkit::rank_target(scores, target, exclude) ==
          oracles::sort_rank(scores, target, removed));
  }
}

TEST_CASE("hr and ndcg pointwise values") {
  CHECK(evalkit::hr_at_k(4, 10) == 1);
  CHECK(evalkit::hr_at_k(11, 10) == 0);
  CHECK(evalkit::hr_at_k(10, 10) == 1);

  CHECK(evalkit::ndcg_at_k(1, 10) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(evalkit::ndcg_at_k(4, 10) ==
        doctest::Approx(1.0 / std::log2(5.0)).epsilon(1e-9));  // 0.430677...
  CHECK(evalkit::ndcg_at_k(21, 20) == 0.0);
  CHECK_THROWS_AS(evalkit::ndcg_at_k(0, 10), ContractError);

  // ndcg <= hr pointwise.
  for (int rank = 1; rank <= 30; ++rank) {
    CHECK(evalkit::ndcg_at_k(rank, 10) <= evalkit::hr_at_k(rank, 10));
    CHECK(evalkit::ndcg_at_k(rank, 20) <= evalkit::hr_at_k(rank, 20));
  }
}

TEST_CASE("aggregation of per-user ranks") {
  {
    const auto row = evalkit::aggregate_ranks({1});
    CHECK(row.hr10 == 1.0);
    CHECK(row.hr20 == 1.0);
    CHECK(row.ndcg10 == 1.0);
    CHECK(row.ndcg20 == 1.0);
    CHECK(row.users == 1);
  }
  {
    const auto row = evalkit::aggregate_ranks({1, 21});
    CHECK(row.hr20 == 0.5);
    CHECK(row.ndcg20 == 0.5);
    CHECK(row.hr10 == 0.5);
  }
  {
    // MetricsRow inequalities hold after aggregation.
    const auto row = evalkit::aggregate_ranks({1, 3, 12, 19, 25, 7});
    CHECK(row.hr10 <= row.hr20);
    CHECK(row.ndcg10 <= row.ndcg20);
    CHECK(row.ndcg10 <= row.hr10);
    CHECK(row.ndcg20 <= row.hr20);
  }
  CHECK_THROWS_AS(evalkit::aggregate_ranks({}), ContractError);
}

namespace {

dataio::SplitDataset tiny_split(int n_items, const std::vector<std::vector<int>>& histories,
                                const std::vector<int>& targets) {
  dataio::SplitDataset ds;
  ds.n_items = n_items;
  ds.max_len = 10;
  ds.item_map.resize(static_cast<std::size_t>(n_items));
  for (int i = 0; i < n_items; ++i) ds.item_map[static_cast<std::size_t>(i)] = i;
  for (std::size_t u = 0; u < histories.size(); ++u) {
    dataio::SplitDataset::UserSeq seq;
    seq.user = static_cast<int>(u);
    seq.history = histories[u];
    seq.target = targets[u];
    seq.part = dataio::Partition::test;
    ds.users.push_back(seq);
  }
  return ds;
}

}  // namespace

TEST_CASE("evaluate_split aggregates per-user evaluations") {
  // Deterministic scorer: item score = -(item id) except each user's target
  // gets a controlled boost.
  const auto ds = tiny_split(30, {{1, 2}, {3, 4}, {5, 6}}, {7, 8, 9});
  const std::vector<int> boosts{30, 0, 15};  // ranks 1, 9, 1 by construction

  auto scorer = [&](const std::vector<int>& rows) {
    Matrix scores(rows.size(), 30);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (int j = 0; j < 30; ++j) {
        scores(i, static_cast<std::size_t>(j)) = -static_cast<double>(j);
        if (j == ds.users[static_cast<std::size_t>(rows[i])].target)
          scores(i, static_cast<std::size_t>(j)) +=
              boosts[static_cast<std::size_t>(rows[i])];
      }
    return scores;
  };

  const auto row = evalkit::evaluate_split(ds, dataio::Partition::test, scorer, true);
  CHECK(row.users == 3);
  // Ranks: user0 target 7 with +30 -> top; user1 target 8 with no boost ->
  // score -8, better: ids 0..7 minus history {3,4} = 6 -> rank 7; user2
  // target 9 with +15 -> score 6 > everything else.
  const std::vector<int> expected_ranks{1, 7, 1};
  const auto want = evalkit::aggregate_ranks(expected_ranks);
  CHECK(row.hr10 == doctest::Approx(want.hr10).epsilon(1e-12));
  CHECK(row.ndcg20 == doctest::Approx(want.ndcg20).epsilon(1e-12));

  // Mean-of-singles equality within 1e-12.
  double sum_ndcg20 = 0.0;
  for (int u = 0; u < 3; ++u) {
    dataio::SplitDataset one = ds;
    one.users = {ds.users[static_cast<std::size_t>(u)]};
    auto single_scorer = [&](const std::vector<int>& rows) {
      Matrix scores(rows.size(), 30);
      for (int j = 0; j < 30; ++j) {
        scores(0, static_cast<std::size_t>(j)) = -static_cast<double>(j);
        if (j == one.users[0].target)
          scores(0, static_cast<std::size_t>(j)) += boosts[static_cast<std::size_t>(u)];
      }
      return scores;
    };
    sum_ndcg20 += evalkit::evaluate_split(one, dataio::Partition::test, single_scorer, true).ndcg20;
  }
  CHECK(std::abs(row.ndcg20 - sum_ndcg20 / 3.0) <= 1e-12);

  // Determinism: same model, same metrics, bitwise.
  const auto again = evalkit::evaluate_split(ds, dataio::Partition::test, scorer, true);
  CHECK(again.hr10 == row.hr10);
  CHECK(again.ndcg10 == row.ndcg10);

  dataio::SplitDataset empty = ds;
  for (auto& u : empty.users) u.part = dataio::Partition::train;
  CHECK_THROWS_AS(evalkit::evaluate_split(empty, dataio::Partition::test, scorer, true),
                  ContractError);

  // Invariant under user processing order.
  dataio::SplitDataset reversed = ds;
  std::reverse(reversed.users.begin(), reversed.users.end());
  auto rev_scorer = [&](const std::vector<int>& rows) {
    Matrix scores(rows.size(), 30);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (int j = 0; j < 30; ++j) {
        scores(i, static_cast<std::size_t>(j)) = -static_cast<double>(j);
        const auto& u = reversed.users[static_cast<std::size_t>(rows[i])];
        if (j == u.target)
          scores(i, static_cast<std::size_t>(j)) += boosts[static_cast<std::size_t>(u.user)];
      }
    return scores;
  };
  const auto rev = evalkit::evaluate_split(reversed, dataio::Partition::test, rev_scorer, true);
  CHECK(std::abs(rev.ndcg20 - row.ndcg20) <= 1e-12);
  CHECK(std::abs(rev.hr10 - row.hr10) <= 1e-12);
}

TEST_CASE("metrics CSV and JSON serialization") {
  evalkit::MetricsRow row;
  row.hr10 = 0.5;
  row.hr20 = 0.75;
  row.ndcg10 = 0.25;
  row.ndcg20 = 0.3;
  row.users = 4;
  std::ostringstream csv;
  row.write_csv(csv);
  CHECK(csv.str() == "hr10,hr20,ndcg10,ndcg20,users\n0.5,0.75,0.25,0.3,4\n");
  std::ostringstream json;
  row.write_json(json);
  CHECK(json.str().find("\"ndcg20\": 0.3") != std::string::npos);
}

TEST_CASE("early stopping protocol") {
  {
    evalkit::EarlyStopState st;
    auto d1 = evalkit::early_stop_update(st, 0.1, 1);
    CHECK(d1.improved);
    auto d2 = evalkit::early_stop_update(st, 0.2, 2);
    CHECK(d2.improved);
    CHECK(st.epochs_since == 0);
    CHECK(st.best_epoch == 2);
  }
  {
    // Ten consecutive non-improvements stop the run; equal values count as
    // non-improvement.
    evalkit::EarlyStopState st;
    evalkit::early_stop_update(st, 0.5, 1);
    for (int e = 2; e <= 10; ++e) {
      const auto d = evalkit::early_stop_update(st, 0.5, e);
      CHECK(!d.improved);
      CHECK(!d.stop);
    }
    const auto d11 = evalkit::early_stop_update(st, 0.5, 11);
    CHECK(d11.stop);
    CHECK(st.best_epoch == 1);
    CHECK(st.epochs_since == 10);
  }
}
