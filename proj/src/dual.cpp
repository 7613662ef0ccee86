#include "svoter/dual.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "svoter/errors.hpp"
#include "svoter/sumtree.hpp"

namespace svoter::dual {

std::uint64_t JumpCountPath::count_at(double t) const {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  return static_cast<std::uint64_t>(it - times.begin()) - 1;
}

ParticleSystem evolve_coalescing(std::span<const double> means, std::span<const std::uint32_t> init,
                                 Stream& rng, const StopRule& rule, std::vector<double>* jump_times) {
  const std::size_t n = means.size();
  if (n == 0 || n > 0xffffffffULL) throw std::invalid_argument("evolve_coalescing: bad site count");
  if (init.empty()) throw std::invalid_argument("evolve_coalescing: empty initial configuration");
  if (!(rule.horizon > 0.0)) throw std::invalid_argument("evolve_coalescing: horizon must be > 0");
  if (std::isinf(rule.horizon) && rule.stop_at_count == 0) {
    throw std::invalid_argument("evolve_coalescing: an infinite horizon needs a count stop");
  }
  SumTree tree(n);
  std::vector<std::uint8_t> occ(n, 0);
  ParticleSystem ps;
  for (std::uint32_t x : init) {
    if (x >= n) throw std::invalid_argument("evolve_coalescing: initial site out of range");
    if (!occ[x]) {
      occ[x] = 1;
      tree.set(x, 1.0 / means[x]);
      ++ps.count;
    }
  }
  const auto nn = static_cast<std::uint32_t>(n);
  for (;;) {
    if (rule.stop_at_count > 0 && ps.count <= rule.stop_at_count) break;
    const double dt = rng.exponential(1.0 / tree.total());
    if (ps.clock + dt > rule.horizon) {
      ps.clock = rule.horizon;
      break;
    }
    if (static_cast<double>(ps.jumps) >= rule.max_events) {
      throw SizingError("evolve_coalescing: jump count exceeds the configured cap");
    }
    ps.clock += dt;
    ++ps.jumps;
    if (jump_times) jump_times->push_back(ps.clock);
    const auto x = static_cast<std::uint32_t>(tree.sample(rng));
    const std::uint32_t y = rng.uniform_index(nn);
    if (y == x) continue;
    tree.set(x, 0.0);
    occ[x] = 0;
    if (occ[y]) {
      --ps.count;
      ps.coalescence_log.push_back({ps.clock, y, static_cast<std::uint32_t>(ps.count)});
    } else {
      occ[y] = 1;
      tree.set(y, 1.0 / means[y]);
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (occ[x]) ps.occupied.push_back(static_cast<std::uint32_t>(x));
  }
  return ps;
}

ParticleSystem evolve_coalescing(std::span<const double> means, std::span<const std::uint32_t> init,
                                 double horizon, Stream& rng, double max_events) {
  StopRule rule;
  rule.horizon = horizon;
  rule.max_events = max_events;
  return evolve_coalescing(means, init, rng, rule);
}

CoalescenceTiming coalescence_time_from(std::span<const double> means,
                                        std::span<const std::uint32_t> init, Stream& rng) {
  if (init.size() < 2) throw std::invalid_argument("coalescence_time_from: need at least two particles");
  CoalescenceTiming out{init.size(), init.size() - 1, 0.0};
  std::vector<std::uint32_t> sorted(init.begin(), init.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return out;
  StopRule rule;
  rule.stop_at_count = init.size() - 1;
  const ParticleSystem ps = evolve_coalescing(means, init, rng, rule);
  out.tau = ps.coalescence_log.front().time;
  return out;
}

CoalescenceTiming coalescence_time_sample(const env::LimitEnvironment& xi, std::size_t n_trunc,
                                          std::size_t m, Stream& rng) {
  if (m < 1 || m + 1 > n_trunc) throw std::invalid_argument("coalescence_time_sample: need 1 <= m < n_trunc");
  std::vector<std::uint32_t> init(m + 1);
  for (std::size_t i = 0; i <= m; ++i) init[i] = static_cast<std::uint32_t>(i);
  return coalescence_time_from(xi.head(n_trunc), init, rng);
}

double tau_infinity_to_one(const env::LimitEnvironment& xi, std::size_t n_trunc, Stream& rng) {
  if (n_trunc < 1) throw std::invalid_argument("tau_infinity_to_one: n_trunc must be >= 1");
  if (n_trunc == 1) return 0.0;
  std::vector<std::uint32_t> init(n_trunc);
  for (std::size_t i = 0; i < n_trunc; ++i) init[i] = static_cast<std::uint32_t>(i);
  StopRule rule;
  rule.stop_at_count = 1;
  return evolve_coalescing(xi.head(n_trunc), init, rng, rule).clock;
}

JumpCountPath lower_bound_jump_process(const env::LimitEnvironment& xi, std::size_t n_trunc,
                                       std::size_t m, double horizon, Stream& rng) {
  if (!(m + 1 < n_trunc)) throw std::invalid_argument("lower_bound_jump_process: need m + 1 < n_trunc");
  if (!(horizon >= 0.0)) throw std::invalid_argument("lower_bound_jump_process: horizon must be >= 0");
  const auto means = xi.head(n_trunc);
  JumpCountPath path;
  path.times.push_back(0.0);
  path.counts.push_back(0);
  const auto nn = static_cast<std::uint32_t>(n_trunc);
  std::size_t x = m;  // 0-based index of site m+1
  double t = 0.0;
  for (;;) {
    t += rng.exponential(means[x]);
    if (t > horizon) break;
    path.counts.push_back(path.counts.back() + 1);
    path.times.push_back(t);
    const std::uint32_t u = rng.uniform_index(nn);
    x = u <= m ? m : u;
  }
  return path;
}

JumpCountPath coalescing_jump_counts(const env::LimitEnvironment& xi, std::size_t n_trunc,
                                     std::size_t m, double horizon, Stream& rng, bool& coalesced) {
  if (m < 1 || m + 1 > n_trunc) throw std::invalid_argument("coalescing_jump_counts: need 1 <= m < n_trunc");
  std::vector<std::uint32_t> init(m + 1);
  for (std::size_t i = 0; i <= m; ++i) init[i] = static_cast<std::uint32_t>(i);
  StopRule rule;
  rule.horizon = horizon;
  rule.stop_at_count = m;
  std::vector<double> times;
  const ParticleSystem ps = evolve_coalescing(xi.head(n_trunc), init, rng, rule, &times);
  coalesced = !ps.coalescence_log.empty();
  JumpCountPath path;
  path.times.reserve(times.size() + 1);
  path.times.push_back(0.0);
  path.counts.push_back(0);
  for (double s : times) {
    path.times.push_back(s);
    path.counts.push_back(path.counts.back() + 1);
  }
  return path;
}

double regularity_constant(const env::LimitEnvironment& xi, std::size_t n_trunc) {
  const auto head = xi.head(n_trunc);
  double c = 0.0;
  for (std::size_t i = 0; i < head.size(); ++i) {
    c = std::max(c, head[i] * std::pow(static_cast<double>(i + 1), 1.0 / xi.alpha));
  }
  return c;
}

double chernoff_threshold(const env::LimitEnvironment& xi, std::size_t n_trunc, std::size_t m, double t) {
  const double c = regularity_constant(xi, n_trunc);
  return static_cast<double>(n_trunc) * std::pow(static_cast<double>(m), 1.0 / xi.alpha - 1.0) * t /
         (4.0 * (1.0 + c));
}

double chernoff_jump_bound(const env::LimitEnvironment& xi, std::size_t n_trunc, std::size_t m, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("chernoff_jump_bound: t must be >= 0");
  if (m + 1 > n_trunc) throw std::invalid_argument("chernoff_jump_bound: need m < n_trunc");
  return std::exp(-t / (4.0 * xi.xi[m]));
}

}  // namespace svoter::dual
