#pragma once

#include <cstddef>
#include <vector>

#include "svoter/rng.hpp"

namespace svoter {

/// Complete binary tree of partial sums over non-negative leaf rates.
///
/// Each update recomputes the ancestors from their children rather than
/// adding a delta, so the root never drifts from the true total however
/// many updates are applied.
class SumTree {
 public:
  explicit SumTree(std::size_t n) : leaves_(1) {
    while (leaves_ < n) leaves_ <<= 1;
    node_.assign(2 * leaves_, 0.0);
    size_ = n;
  }

  std::size_t size() const noexcept { return size_; }
  double total() const noexcept { return node_[1]; }
  double get(std::size_t i) const noexcept { return node_[leaves_ + i]; }

  void set(std::size_t i, double value) noexcept {
    std::size_t k = leaves_ + i;
    node_[k] = value;
    for (k >>= 1; k >= 1; k >>= 1) node_[k] = node_[2 * k] + node_[2 * k + 1];
  }

  /// Index i with prefix(i) <= u < prefix(i+1), for u in [0, total()).
  std::size_t find(double u) const noexcept {
    std::size_t k = 1;
    while (k < leaves_) {
      const double left = node_[2 * k];
      if (u < left) {
        k = 2 * k;
      } else {
        u -= left;
        k = 2 * k + 1;
      }
    }
    std::size_t i = k - leaves_;
    // Rounding in the descent can land on an empty leaf; step back to a live one.
    while (i > 0 && node_[leaves_ + i] == 0.0) --i;
    return i;
  }

  std::size_t sample(Stream& rng) const noexcept { return find(rng.uniform() * total()); }

 private:
  std::size_t leaves_;
  std::size_t size_;
  std::vector<double> node_;
};

}  // namespace svoter
