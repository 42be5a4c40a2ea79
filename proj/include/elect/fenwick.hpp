#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace elect {

/// Binary indexed tree over non-negative integer weights with weighted index
/// lookup. Used for O(log S) district draws proportional to running counts.
class FenwickTree {
 public:
  FenwickTree() = default;
  explicit FenwickTree(std::size_t n) : tree_(n + 1, 0), values_(n, 0) {
    top_ = 1;
    while (top_ * 2 <= n) top_ *= 2;
  }

  std::size_t size() const { return values_.size(); }
  std::int64_t total() const { return total_; }
  std::int64_t value(std::size_t i) const { return values_[i]; }

  void add(std::size_t i, std::int64_t delta) {
    values_[i] += delta;
    total_ += delta;
    for (std::size_t j = i + 1; j < tree_.size(); j += j & (~j + 1)) tree_[j] += delta;
  }

  void set(std::size_t i, std::int64_t value) { add(i, value - values_[i]); }

  /// Smallest index i with prefix_sum(0..i) > target, for 0 <= target < total().
  std::size_t find(std::int64_t target) const {
    std::size_t pos = 0;
    for (std::size_t step = top_; step > 0; step >>= 1) {
      const std::size_t next = pos + step;
      if (next < tree_.size() && tree_[next] <= target) {
        pos = next;
        target -= tree_[next];
      }
    }
    return pos;
  }

 private:
  std::vector<std::int64_t> tree_;
  std::vector<std::int64_t> values_;
  std::int64_t total_ = 0;
  std::size_t top_ = 0;
};

/// Indices [0, n) with O(1) uniform draw and removal.
class ActiveSet {
 public:
  explicit ActiveSet(std::size_t n) : items_(n), where_(n) {
    for (std::size_t i = 0; i < n; ++i) items_[i] = where_[i] = i;
  }

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  std::size_t operator[](std::size_t j) const { return items_[j]; }
  bool contains(std::size_t i) const { return where_[i] != npos; }

  void remove(std::size_t i) {
    const std::size_t j = where_[i];
    const std::size_t last = items_.back();
    items_[j] = last;
    where_[last] = j;
    items_.pop_back();
    where_[i] = npos;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> items_;
  std::vector<std::size_t> where_;
};

}  // namespace elect
