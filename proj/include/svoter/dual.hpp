#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "svoter/env.hpp"
#include "svoter/rng.hpp"

namespace svoter::dual {

struct CoalescenceRecord {
  double time = 0.0;
  std::uint32_t site = 0;  ///< where the merge happened
  std::uint32_t count_after = 0;
};

/// Occupied-site set of a coalescing walk system.
struct ParticleSystem {
  std::vector<std::uint32_t> occupied;  ///< sorted
  std::size_t count = 0;
  double clock = 0.0;
  std::uint64_t jumps = 0;  ///< clock rings, lazy self-jumps included
  std::vector<CoalescenceRecord> coalescence_log;
};

struct CoalescenceTiming {
  std::size_t m_from = 0;
  std::size_t m_to = 0;
  double tau = 0.0;
};

struct JumpCountPath {
  std::vector<double> times;           ///< times[k] = time of the k-th jump, times[0] = 0
  std::vector<std::uint64_t> counts;   ///< counts[k] = k
  std::uint64_t count_at(double t) const;
};

inline constexpr double kDefaultJumpCap = 1e9;

struct StopRule {
  double horizon = std::numeric_limits<double>::infinity();
  std::size_t stop_at_count = 0;  ///< stop once count <= this (0: never)
  double max_events = kDefaultJumpCap;
  bool record_jump_times = false;
};

/// Coalescing walks on [n] where a particle at x jumps at rate 1/means[x] to
/// a uniform site of [n] (self included); a particle landing on an occupied
/// site merges with it. `init` may contain repeated sites (already merged).
/// Exceeding `rule.max_events` raises SizingError.
ParticleSystem evolve_coalescing(std::span<const double> means, std::span<const std::uint32_t> init,
                                 Stream& rng, const StopRule& rule,
                                 std::vector<double>* jump_times = nullptr);

/// Convenience form with a plain horizon.
ParticleSystem evolve_coalescing(std::span<const double> means, std::span<const std::uint32_t> init,
                                 double horizon, Stream& rng, double max_events = kDefaultJumpCap);

/// First coalescence time of m + 1 particles started on sites 1..m+1 of the
/// truncated limit environment on [n_trunc].
CoalescenceTiming coalescence_time_sample(const env::LimitEnvironment& xi, std::size_t n_trunc,
                                          std::size_t m, Stream& rng);
/// Same with an explicit initial placement (degenerate starts give tau = 0).
CoalescenceTiming coalescence_time_from(std::span<const double> means,
                                        std::span<const std::uint32_t> init, Stream& rng);

/// Time for the fully occupied truncation [n_trunc] to coalesce to one particle.
double tau_infinity_to_one(const env::LimitEnvironment& xi, std::size_t n_trunc, Stream& rng);

/// Jump-count path of the comparison walk X' on {m+1, ..., n_trunc} (1-based)
/// started at m+1: holding mean xi_x, next site y > m+1 with probability
/// 1/n_trunc each and m+1 with probability (m+1)/n_trunc.
JumpCountPath lower_bound_jump_process(const env::LimitEnvironment& xi, std::size_t n_trunc,
                                       std::size_t m, double horizon, Stream& rng);

/// Total jump-count path of the m + 1 particle system up to its first
/// coalescence or the horizon. `coalesced` reports whether the first merge
/// happened at or before the horizon.
JumpCountPath coalescing_jump_counts(const env::LimitEnvironment& xi, std::size_t n_trunc,
                                     std::size_t m, double horizon, Stream& rng, bool& coalesced);

/// sup_i xi_i i^{1/alpha} over the first n_trunc entries.
double regularity_constant(const env::LimitEnvironment& xi, std::size_t n_trunc);

/// Threshold n_trunc m^{1/alpha - 1} t / (4 (1 + C)).
double chernoff_threshold(const env::LimitEnvironment& xi, std::size_t n_trunc, std::size_t m, double t);
/// exp(-t / (4 xi_{m+1})), bounding P(J'_t < chernoff_threshold).
double chernoff_jump_bound(const env::LimitEnvironment& xi, std::size_t n_trunc, std::size_t m, double t);

}  // namespace svoter::dual
