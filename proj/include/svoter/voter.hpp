#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "svoter/alias.hpp"
#include "svoter/env.hpp"
#include "svoter/rng.hpp"

namespace svoter::voter {

/// Binary opinion configuration with its count of ones and, when an
/// environment is attached, the weighted mass sum_x eta(x) w_x.
class OpinionState {
 public:
  OpinionState() = default;
  explicit OpinionState(std::vector<std::uint8_t> bits);
  OpinionState(std::vector<std::uint8_t> bits, const env::Environment& env);

  static OpinionState constant(std::size_t n, bool value);
  static OpinionState indicator(std::size_t n, std::size_t site);

  std::size_t size() const noexcept { return bits_.size(); }
  std::uint8_t operator[](std::size_t x) const noexcept { return bits_[x]; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::size_t ones() const noexcept { return ones_; }
  double weighted_ones() const noexcept { return weighted_ones_; }
  bool has_weights() const noexcept { return static_cast<bool>(weights_); }
  bool is_consensus() const noexcept { return ones_ == 0 || ones_ == bits_.size(); }
  /// True iff eta == 1 on every site of `sites`.
  bool all_ones_on(std::span<const std::uint32_t> sites) const;

  void set(std::size_t x, std::uint8_t value) noexcept {
    if (bits_[x] == value) return;
    bits_[x] = value;
    if (value) {
      ++ones_;
      if (weights_) weighted_ones_ += (*weights_)[x];
    } else {
      --ones_;
      if (weights_) weighted_ones_ -= (*weights_)[x];
    }
  }
  /// Recomputes ones and the weighted mass from scratch.
  void recompute() noexcept;
  /// Attaches (or replaces) the weights used for the weighted mass.
  void attach(const env::Environment& env);
  OpinionState flipped() const;

  bool operator==(const OpinionState& other) const noexcept { return bits_ == other.bits_; }

 private:
  std::vector<std::uint8_t> bits_;
  std::size_t ones_ = 0;
  double weighted_ones_ = 0.0;
  std::shared_ptr<const std::vector<double>> weights_;
};

struct ConsensusResult {
  int outcome = 0;
  double tau = 0.0;
  std::uint64_t events_used = 0;
};

/// Event selection strategy.
///  - Alias: every clock ring is drawn (site by alias table, target uniform);
///    the total rate is state independent, so the absorption time is drawn
///    once as Gamma(events, 1/R) after the jump chain absorbs.
///  - Active: only opinion-changing events are drawn, from per-opinion sum
///    trees; the holding time is drawn per event. Far cheaper when most
///    rings are self-agreeing copies (near-consensus configurations).
/// Both produce the same law; each is exactly symmetric under a global
/// bit flip of the initial state on the same stream.
enum class Kernel { Alias, Active };

inline constexpr std::uint64_t kDefaultMaxEvents = 1'000'000'000ULL;
inline constexpr std::uint64_t kRecomputeInterval = 1ULL << 20;

class Simulator {
 public:
  explicit Simulator(const env::Environment& env, Kernel kernel = Kernel::Alias);

  ConsensusResult to_consensus(OpinionState eta, Stream& rng,
                               std::uint64_t max_events = kDefaultMaxEvents) const;
  /// State at time t.
  OpinionState run_for(OpinionState eta, double t, Stream& rng) const;

  const env::Environment& environment() const noexcept { return env_; }
  double total_rate() const noexcept { return total_rate_; }
  Kernel kernel() const noexcept { return kernel_; }

 private:
  ConsensusResult alias_to_consensus(OpinionState& eta, Stream& rng, std::uint64_t max_events) const;
  ConsensusResult active_run(OpinionState& eta, Stream& rng, std::uint64_t max_events, double horizon,
                             bool stop_at_horizon) const;

  env::Environment env_;
  Kernel kernel_;
  std::vector<double> rates_;
  double total_rate_ = 0.0;
  AliasTable alias_;
};

ConsensusResult simulate_to_consensus(const env::Environment& env, const OpinionState& eta0,
                                      Stream& rng, std::uint64_t max_events = kDefaultMaxEvents);
OpinionState simulate_for(const env::Environment& env, const OpinionState& eta0, double t,
                          Stream& rng);

/// sum_x eta0(x) w_x / sum_x w_x.
double consensus_probability_formula(const env::Environment& env, const OpinionState& eta0);

/// weighted_ones / total.
double weighted_fraction(const OpinionState& state, const env::Environment& env);

struct ReplicaOutcome {
  bool absorbed = false;
  ConsensusResult result;
};

struct ConsensusEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t replicas = 0;
  std::uint64_t failures = 0;  ///< NonAbsorbed replicas (excluded from the estimate)
  std::vector<ReplicaOutcome> per_replica;
};

/// Monte Carlo estimate of P(outcome = 1) over independent replicas, replica
/// r using family.at(r). Throws NonAbsorbed when more than 0.1% of the
/// replicas fail to absorb within max_events.
ConsensusEstimate estimate_consensus_probability(const env::Environment& env,
                                                 const OpinionState& eta0, std::uint64_t replicas,
                                                 const StreamFamily& family, unsigned threads = 1,
                                                 Kernel kernel = Kernel::Alias,
                                                 std::uint64_t max_events = kDefaultMaxEvents);

}  // namespace svoter::voter
