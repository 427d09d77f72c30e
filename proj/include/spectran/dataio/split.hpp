#pragma once

#include <string>
#include <vector>

#include "spectran/dataio/interactions.hpp"

namespace spectran::dataio {

enum class Partition : int { train = 0, valid = 1, test = 2 };

/// Leave-one-out dataset: per user, the final item is the prediction target
/// and the preceding (truncated) items are history. Users are partitioned
/// into train/valid/test by the timestamp of their final interaction.
struct SplitDataset {
  int n_items = 0;
  int max_len = 0;
  std::vector<int> item_map;  // dense iid -> original item id
  struct UserSeq {
    int user = 0;               // dense uid
    std::vector<int> history;   // chronological, most recent last, <= max_len
    int target = 0;
    Partition part = Partition::train;
  };
  std::vector<UserSeq> users;

  std::vector<int> users_in(Partition p) const {
    std::vector<int> idx;
    for (std::size_t i = 0; i < users.size(); ++i)
      if (users[i].part == p) idx.push_back(static_cast<int>(i));
    return idx;
  }
};

/// Order users by final-interaction timestamp (ties broken by dense user id),
/// then assign the first r_train fraction to train, the next r_valid to
/// valid, the rest to test. Requires at least 10 users.
SplitDataset chronological_split(const InteractionLog& log, double r_train = 0.8,
                                 double r_valid = 0.1, int max_len = 10);

// Plain-text persistence (fixed filename splits.bin in CLI output).
void save_split(const std::string& path, const SplitDataset& ds);
SplitDataset load_split(const std::string& path);

}  // namespace spectran::dataio
