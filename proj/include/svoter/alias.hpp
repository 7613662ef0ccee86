#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "svoter/rng.hpp"

namespace svoter {

/// Walker/Vose alias table for O(1) draws from a fixed discrete law.
class AliasTable {
 public:
  AliasTable() = default;
  /// Weights need not be normalized; they must be non-negative with positive sum.
  explicit AliasTable(std::span<const double> weights);

  std::uint32_t sample(Stream& rng) const noexcept {
    const std::uint32_t i = rng.uniform_index(static_cast<std::uint32_t>(prob_.size()));
    return rng.uniform() < prob_[i] ? i : alias_[i];
  }
  std::size_t size() const noexcept { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace svoter
