#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace spectran::dataio {

struct Interaction {
  int user = 0;
  int item = 0;
  std::int64_t ts = 0;
};

/// Filtered, densely re-indexed interaction log. Per-user sequences are
/// sorted by timestamp (stable on ties) and every retained user has at least
/// 3 interactions.
struct InteractionLog {
  int n_users = 0;
  int n_items = 0;
  std::vector<int> user_map;  // dense uid -> original user id
  std::vector<int> item_map;  // dense iid -> original item id
  struct Event {
    std::int64_t ts;
    int item;
  };
  std::vector<std::vector<Event>> sequences;  // indexed by dense uid

  std::size_t total_interactions() const {
    std::size_t n = 0;
    for (const auto& s : sequences) n += s.size();
    return n;
  }
};

/// Drop items with fewer than min_interactions occurrences, then users whose
/// remaining sequence is shorter than max(min_interactions, 3); one pass
/// each, not iterated. Ids are densified in ascending original order.
InteractionLog build_log(const std::vector<Interaction>& raw, int min_interactions);

/// Parse TSV lines "user<TAB>item<TAB>timestamp" and build the filtered log.
/// Malformed lines raise a data error naming the line number.
InteractionLog load_interactions(const std::string& path, int min_interactions = 5);

/// Raw parse without filtering or densification (used by tests and stats).
std::vector<Interaction> parse_interactions_tsv(const std::string& path);

void write_interactions_tsv(const std::string& path, const std::vector<Interaction>& rows);

}  // namespace spectran::dataio
