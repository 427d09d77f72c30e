#include "spectran/dataio/split.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "spectran/errors.hpp"

namespace spectran::dataio {

SplitDataset chronological_split(const InteractionLog& log, double r_train, double r_valid,
                                 int max_len) {
  if (log.n_users < 10) throw DataError("chronological_split: need at least 10 users, have " +
                                        std::to_string(log.n_users));
  if (!(r_train > 0.0) || !(r_valid >= 0.0) || r_train + r_valid >= 1.0 + 1e-12)
    throw ContractError("chronological_split: invalid ratios");
  if (max_len < 1) throw ContractError("chronological_split: max_len must be >= 1");

  const int m = log.n_users;
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto ta = log.sequences[static_cast<std::size_t>(a)].back().ts;
    const auto tb = log.sequences[static_cast<std::size_t>(b)].back().ts;
    if (ta != tb) return ta < tb;
    return a < b;
  });

  const int n_train = static_cast<int>(std::llround(r_train * m));
  const int n_valid = static_cast<int>(std::llround(r_valid * m));
  if (n_train <= 0 || n_valid < 0 || n_train + n_valid >= m)
    throw ContractError("chronological_split: ratios leave an empty partition");

  SplitDataset ds;
  ds.n_items = log.n_items;
  ds.max_len = max_len;
  ds.item_map = log.item_map;
  ds.users.resize(static_cast<std::size_t>(m));
  for (int rank = 0; rank < m; ++rank) {
    const int uid = order[static_cast<std::size_t>(rank)];
    const auto& seq = log.sequences[static_cast<std::size_t>(uid)];
    auto& u = ds.users[static_cast<std::size_t>(uid)];
    u.user = uid;
    u.target = seq.back().item;
    const std::size_t hist_len = seq.size() - 1;
    const std::size_t keep = std::min<std::size_t>(hist_len, static_cast<std::size_t>(max_len));
    u.history.reserve(keep);
    for (std::size_t i = hist_len - keep; i < hist_len; ++i) u.history.push_back(seq[i].item);
    u.part = rank < n_train ? Partition::train
                            : (rank < n_train + n_valid ? Partition::valid : Partition::test);
  }
  return ds;
}

void save_split(const std::string& path, const SplitDataset& ds) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write split file: " + path);
  out << "SPL1 " << ds.n_items << ' ' << ds.users.size() << ' ' << ds.max_len << '\n';
  out << "itemmap";
  for (int orig : ds.item_map) out << ' ' << orig;
  out << '\n';
  for (const auto& u : ds.users) {
    out << "user " << u.user << ' ' << static_cast<int>(u.part) << ' ' << u.target << ' '
        << u.history.size();
    for (int it : u.history) out << ' ' << it;
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

SplitDataset load_split(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open split file: " + path);
  std::string tag;
  SplitDataset ds;
  std::size_t n_users = 0;
  in >> tag >> ds.n_items >> n_users >> ds.max_len;
  if (!in || tag != "SPL1") throw DataError(path + ": bad split header");
  in >> tag;
  if (tag != "itemmap") throw DataError(path + ": missing itemmap");
  ds.item_map.resize(static_cast<std::size_t>(ds.n_items));
  for (auto& v : ds.item_map) in >> v;
  ds.users.resize(n_users);
  for (auto& u : ds.users) {
    int part = 0;
    std::size_t hist = 0;
    in >> tag >> u.user >> part >> u.target >> hist;
    if (!in || tag != "user" || part < 0 || part > 2)
      throw DataError(path + ": malformed user record");
    u.part = static_cast<Partition>(part);
    u.history.resize(hist);
    for (auto& h : u.history) in >> h;
  }
  if (!in) throw DataError(path + ": truncated split file");
  return ds;
}

}  // namespace spectran::dataio
