#include "spectran/dataio/interactions.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "spectran/errors.hpp"

namespace spectran::dataio {

std::vector<Interaction> parse_interactions_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open interaction file: " + path);
  std::vector<Interaction> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f0, f1, f2, extra;
    if (!std::getline(ss, f0, '\t') || !std::getline(ss, f1, '\t') || !std::getline(ss, f2, '\t'))
      throw DataError(path + ": parse error at line " + std::to_string(lineno) +
                      " (expected user<TAB>item<TAB>timestamp)");
    if (std::getline(ss, extra, '\t'))
      throw DataError(path + ": parse error at line " + std::to_string(lineno) +
                      " (too many fields)");
    Interaction r;
    try {
      r.user = std::stoi(f0);
      r.item = std::stoi(f1);
      r.ts = std::stoll(f2);
    } catch (const std::exception&) {
      throw DataError(path + ": parse error at line " + std::to_string(lineno) +
                      " (non-numeric field)");
    }
    if (r.user < 0 || r.item < 0)
      throw DataError(path + ": parse error at line " + std::to_string(lineno) +
                      " (negative id)");
    rows.push_back(r);
  }
  return rows;
}

void write_interactions_tsv(const std::string& path, const std::vector<Interaction>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write interaction file: " + path);
  for (const auto& r : rows) out << r.user << '\t' << r.item << '\t' << r.ts << '\n';
  if (!out) throw DataError("write failed: " + path);
}

InteractionLog build_log(const std::vector<Interaction>& raw, int min_interactions) {
  if (min_interactions < 1) throw ContractError("build_log: min_interactions must be >= 1");
  const int user_min = std::max(min_interactions, 3);

  std::map<int, int> item_counts;
  for (const auto& r : raw) ++item_counts[r.item];

  std::map<int, int> item_dense;
  std::vector<int> item_map;
  for (const auto& [item, count] : item_counts) {
    if (count >= min_interactions) {
      item_dense[item] = static_cast<int>(item_map.size());
      item_map.push_back(item);
    }
  }

  std::map<int, std::vector<InteractionLog::Event>> per_user;
  for (const auto& r : raw) {
    auto it = item_dense.find(r.item);
    if (it == item_dense.end()) continue;
    per_user[r.user].push_back({r.ts, it->second});
  }

  InteractionLog log;
  log.item_map = std::move(item_map);
  log.n_items = static_cast<int>(log.item_map.size());
  for (auto& [user, events] : per_user) {
    if (static_cast<int>(events.size()) < user_min) continue;
    std::stable_sort(events.begin(), events.end(),
                     [](const auto& a, const auto& b) { return a.ts < b.ts; });
    log.user_map.push_back(user);
    log.sequences.push_back(std::move(events));
  }
  log.n_users = static_cast<int>(log.user_map.size());
  return log;
}

InteractionLog load_interactions(const std::string& path, int min_interactions) {
  return build_log(parse_interactions_tsv(path), min_interactions);
}

}  // namespace spectran::dataio
