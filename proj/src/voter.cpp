#include "svoter/voter.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "svoter/errors.hpp"
#include "svoter/parallel.hpp"
#include "svoter/stats.hpp"
#include "svoter/sumtree.hpp"

namespace svoter::voter {

OpinionState::OpinionState(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) b = b ? 1 : 0;
  recompute();
}

OpinionState::OpinionState(std::vector<std::uint8_t> bits, const env::Environment& env)
    : OpinionState(std::move(bits)) {
  attach(env);
}

OpinionState OpinionState::constant(std::size_t n, bool value) {
  return OpinionState(std::vector<std::uint8_t>(n, value ? 1 : 0));
}

OpinionState OpinionState::indicator(std::size_t n, std::size_t site) {
  if (site >= n) throw std::invalid_argument("indicator: site out of range");
  std::vector<std::uint8_t> bits(n, 0);
  bits[site] = 1;
  return OpinionState(std::move(bits));
}

bool OpinionState::all_ones_on(std::span<const std::uint32_t> sites) const {
  for (std::uint32_t x : sites) {
    if (x >= bits_.size()) throw std::out_of_range("site outside the configuration");
    if (!bits_[x]) return false;
  }
  return true;
}

void OpinionState::recompute() noexcept {
  ones_ = 0;
  std::vector<double> mass;
  if (weights_) mass.reserve(bits_.size());
  for (std::size_t x = 0; x < bits_.size(); ++x) {
    ones_ += bits_[x];
    if (weights_ && bits_[x]) mass.push_back((*weights_)[x]);
  }
  weighted_ones_ = weights_ ? stats::pairwise_sum(mass) : 0.0;
}

void OpinionState::attach(const env::Environment& env) {
  if (env.n != bits_.size()) throw std::invalid_argument("opinion state and environment differ in size");
  weights_ = std::make_shared<const std::vector<double>>(env.weights);
  recompute();
}

OpinionState OpinionState::flipped() const {
  OpinionState out = *this;
  for (auto& b : out.bits_) b ^= 1;
  out.recompute();
  return out;
}

Simulator::Simulator(const env::Environment& env, Kernel kernel)
    : env_(env), kernel_(kernel), rates_(env.rates()) {
  if (env.n == 0) throw std::invalid_argument("simulator needs a non-empty environment");
  if (env.n > 0xffffffffULL) throw SizingError("simulator: too many sites");
  total_rate_ = stats::pairwise_sum(rates_);
  alias_ = AliasTable(rates_);
}

ConsensusResult Simulator::to_consensus(OpinionState eta, Stream& rng,
                                        std::uint64_t max_events) const {
  if (max_events < 1) throw std::invalid_argument("max_events must be >= 1");
  if (eta.size() != env_.n) throw std::invalid_argument("opinion state and environment differ in size");
  if (eta.is_consensus()) return {eta.ones() == eta.size() ? 1 : 0, 0.0, 0};
  if (kernel_ == Kernel::Alias) return alias_to_consensus(eta, rng, max_events);
  return active_run(eta, rng, max_events, 0.0, false);
}

ConsensusResult Simulator::alias_to_consensus(OpinionState& eta, Stream& rng,
                                              std::uint64_t max_events) const {
  const auto n = static_cast<std::uint32_t>(env_.n);
  std::uint64_t k = 0;
  for (;;) {
    if (k == max_events) {
      throw NonAbsorbed("no consensus within " + std::to_string(max_events) + " events", k);
    }
    const std::uint32_t x = alias_.sample(rng);
    const std::uint32_t y = rng.uniform_index(n);
    ++k;
    if (eta[x] != eta[y]) {
      eta.set(x, eta[y]);
      if (eta.is_consensus()) break;
    }
    if (k % kRecomputeInterval == 0) eta.recompute();
  }
  // Holding times are i.i.d. Exp(R) and independent of the jump chain.
  const double tau = rng.gamma(static_cast<double>(k), 1.0 / total_rate_);
  return {eta.ones() == eta.size() ? 1 : 0, tau, k};
}

ConsensusResult Simulator::active_run(OpinionState& eta, Stream& rng, std::uint64_t max_events,
                                      double horizon, bool stop_at_horizon) const {
  const std::size_t n = env_.n;
  const double nd = static_cast<double>(n);
  SumTree tree[2] = {SumTree(n), SumTree(n)};
  std::vector<std::uint32_t> members[2];
  std::vector<std::uint32_t> pos(n);
  for (std::size_t x = 0; x < n; ++x) {
    const int b = eta[x];
    tree[b].set(x, rates_[x]);
    pos[x] = static_cast<std::uint32_t>(members[b].size());
    members[b].push_back(static_cast<std::uint32_t>(x));
  }
  // Segments are ordered by the initial class of site 0 so that a global
  // bit flip of the state leaves every draw unchanged.
  const int lead = eta[0];
  double t = 0.0;
  std::uint64_t k = 0;
  while (!eta.is_consensus()) {
    const double seg[2] = {tree[lead].total() * static_cast<double>(members[1 - lead].size()) / nd,
                           tree[1 - lead].total() * static_cast<double>(members[lead].size()) / nd};
    const double total = seg[0] + seg[1];
    const double dt = rng.exponential(1.0 / total);
    if (stop_at_horizon && t + dt > horizon) break;
    if (k == max_events) {
      throw NonAbsorbed("no consensus within " + std::to_string(max_events) + " events", k);
    }
    t += dt;
    ++k;
    double u = rng.uniform() * total;
    int b;
    if (u < seg[0]) {
      b = lead;
    } else {
      b = 1 - lead;
      u -= seg[0];
    }
    const double others = static_cast<double>(members[1 - b].size());
    const auto x = static_cast<std::uint32_t>(tree[b].find(std::min(u * nd / others, tree[b].total())));
    // x copies some disagreeing site; which one does not affect the state.
    tree[b].set(x, 0.0);
    tree[1 - b].set(x, rates_[x]);
    const std::uint32_t last = members[b].back();
    members[b][pos[x]] = last;
    pos[last] = pos[x];
    members[b].pop_back();
    pos[x] = static_cast<std::uint32_t>(members[1 - b].size());
    members[1 - b].push_back(x);
    eta.set(x, static_cast<std::uint8_t>(1 - b));
    if (k % kRecomputeInterval == 0) eta.recompute();
  }
  return {eta.ones() == eta.size() ? 1 : 0, t, k};
}

OpinionState Simulator::run_for(OpinionState eta, double t, Stream& rng) const {
  if (!(t >= 0.0)) throw std::invalid_argument("run_for: t must be >= 0");
  if (eta.size() != env_.n) throw std::invalid_argument("opinion state and environment differ in size");
  if (eta.is_consensus() || t == 0.0) return eta;
  if (kernel_ == Kernel::Active) {
    active_run(eta, rng, ~std::uint64_t{0}, t, true);
    return eta;
  }
  const auto n = static_cast<std::uint32_t>(env_.n);
  const std::uint64_t events = rng.poisson(total_rate_ * t);
  for (std::uint64_t k = 1; k <= events; ++k) {
    const std::uint32_t x = alias_.sample(rng);
    const std::uint32_t y = rng.uniform_index(n);
    if (eta[x] != eta[y]) {
      eta.set(x, eta[y]);
      if (eta.is_consensus()) break;
    }
    if (k % kRecomputeInterval == 0) eta.recompute();
  }
  return eta;
}

ConsensusResult simulate_to_consensus(const env::Environment& env, const OpinionState& eta0,
                                      Stream& rng, std::uint64_t max_events) {
  return Simulator(env).to_consensus(eta0, rng, max_events);
}

OpinionState simulate_for(const env::Environment& env, const OpinionState& eta0, double t,
                          Stream& rng) {
  return Simulator(env).run_for(eta0, t, rng);
}

double consensus_probability_formula(const env::Environment& env, const OpinionState& eta0) {
  if (eta0.size() != env.n) throw std::invalid_argument("opinion state and environment differ in size");
  std::vector<double> mass;
  for (std::size_t x = 0; x < env.n; ++x) {
    if (eta0[x]) mass.push_back(env.weights[x]);
  }
  return stats::pairwise_sum(mass) / env.total;
}

double weighted_fraction(const OpinionState& state, const env::Environment& env) {
  if (state.size() != env.n) throw std::invalid_argument("opinion state and environment differ in size");
  if (state.has_weights()) return state.weighted_ones() / env.total;
  return consensus_probability_formula(env, state);
}

ConsensusEstimate estimate_consensus_probability(const env::Environment& env,
                                                 const OpinionState& eta0, std::uint64_t replicas,
                                                 const StreamFamily& family, unsigned threads,
                                                 Kernel kernel, std::uint64_t max_events) {
  if (replicas < 2) throw std::invalid_argument("estimate_consensus_probability: replicas must be >= 2");
  const Simulator sim(env, kernel);
  ConsensusEstimate est;
  est.replicas = replicas;
  est.per_replica = parallel_map(replicas, threads, [&](std::size_t r) {
    Stream rng = family.at(r);
    ReplicaOutcome out;
    try {
      out.result = sim.to_consensus(eta0, rng, max_events);
      out.absorbed = true;
    } catch (const NonAbsorbed& e) {
      out.result.events_used = e.events_used();
    }
    return out;
  });
  std::uint64_t ones = 0, absorbed = 0;
  for (const auto& r : est.per_replica) {
    if (!r.absorbed) {
      ++est.failures;
      continue;
    }
    ++absorbed;
    ones += static_cast<std::uint64_t>(r.result.outcome);
  }
  if (static_cast<double>(est.failures) > 0.001 * static_cast<double>(replicas)) {
    throw NonAbsorbed(std::to_string(est.failures) + " of " + std::to_string(replicas) +
                          " replicas did not absorb (limit 0.1%)",
                      max_events);
  }
  const auto b = stats::binomial(ones, absorbed);
  est.estimate = b.mean;
  est.std_error = b.se;
  return est;
}

}  // namespace svoter::voter
