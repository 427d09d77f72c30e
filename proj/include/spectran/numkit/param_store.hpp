#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "spectran/errors.hpp"
#include "spectran/numkit/matrix.hpp"

namespace spectran::numkit {

/// Named parameter tensors with per-parameter gradient accumulators of
/// identical shape. Owned by exactly one training loop at a time.
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Matrix value;
    Matrix grad;
    bool grad_populated = false;  // set by Tape::backward, consumed by adam_step
  };

  int add(const std::string& name, Matrix init) {
    if (index_.count(name)) throw ContractError("ParamStore: duplicate parameter '" + name + "'");
    Entry e;
    e.name = name;
    e.grad = Matrix(init.rows(), init.cols());
    e.value = std::move(init);
    entries_.push_back(std::move(e));
    index_[name] = static_cast<int>(entries_.size()) - 1;
    return index_[name];
  }

  bool has(const std::string& name) const { return index_.count(name) != 0; }

  int index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ContractError("ParamStore: unknown parameter '" + name + "'");
    return it->second;
  }

  Entry& entry(int i) { return entries_[static_cast<std::size_t>(i)]; }
  const Entry& entry(int i) const { return entries_[static_cast<std::size_t>(i)]; }

  Matrix& value(const std::string& name) { return entries_[index_of(name)].value; }
  const Matrix& value(const std::string& name) const { return entries_[index_of(name)].value; }
  Matrix& grad(const std::string& name) { return entries_[index_of(name)].grad; }

  int count() const { return static_cast<int>(entries_.size()); }

  /// Total number of trainable scalars; feeds the efficiency report.
  long long scalar_count() const {
    long long n = 0;
    for (const auto& e : entries_) n += static_cast<long long>(e.value.size());
    return n;
  }

  void zero_grads() {
    for (auto& e : entries_) {
      e.grad = Matrix(e.value.rows(), e.value.cols());
      e.grad_populated = false;
    }
  }

  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace spectran::numkit
