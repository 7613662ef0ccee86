#include "svoter/graphical.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "svoter/alias.hpp"
#include "svoter/errors.hpp"
#include "svoter/stats.hpp"

namespace svoter::graphical {

namespace {

constexpr std::uint16_t kMagic = 0x5653;  // bytes 'S','V' little-endian
constexpr std::uint16_t kVersion = 1;

void check_sites(const SiteSet& s, std::size_t n) {
  for (std::uint32_t x : s) {
    if (x >= n) throw std::invalid_argument("site set exceeds the log dimension");
  }
}

template <class T>
void put_le(std::ostream& out, T value) {
  unsigned char buf[sizeof(T)];
  std::uint64_t bits = 0;
  if constexpr (sizeof(T) == 8) {
    bits = std::bit_cast<std::uint64_t>(value);
  } else {
    bits = static_cast<std::uint64_t>(value);
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) throw std::runtime_error("event log: truncated input");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  if constexpr (sizeof(T) == 8 && std::is_floating_point_v<T>) {
    return std::bit_cast<T>(bits);
  } else {
    return static_cast<T>(bits);
  }
}

}  // namespace

EventLog generate_log(const env::Environment& env, double horizon, Stream& rng,
                      double max_expected_events) {
  if (!(horizon > 0.0)) throw std::invalid_argument("generate_log: horizon must be > 0");
  if (env.n == 0 || env.n > 0xffffffffULL) throw std::invalid_argument("generate_log: bad site count");
  EventLog log;
  log.n = env.n;
  log.horizon = horizon;
  log.rates = env.rates();
  const double total = stats::pairwise_sum(log.rates);
  if (total * horizon > max_expected_events) {
    throw SizingError("generate_log: expected event count exceeds the configured cap");
  }
  const AliasTable alias(log.rates);
  const auto n = static_cast<std::uint32_t>(env.n);
  log.events.reserve(static_cast<std::size_t>(total * horizon + 6.0 * std::sqrt(total * horizon) + 16));
  double t = 0.0;
  for (;;) {
    t += rng.exponential(1.0 / total);
    if (t > horizon) break;
    const std::uint32_t site = alias.sample(rng);
    const std::uint32_t target = rng.uniform_index(n);
    log.events.push_back({t, site, target});
  }
  return log;
}

void apply_events(const EventLog& log, voter::OpinionState& eta, double t0, double t1) {
  if (eta.size() != log.n) throw std::invalid_argument("opinion state and log differ in size");
  auto it = std::upper_bound(log.events.begin(), log.events.end(), t0,
                             [](double t, const UpdateEvent& e) { return t < e.time; });
  for (; it != log.events.end() && it->time <= t1; ++it) eta.set(it->site, eta[it->target]);
}

voter::OpinionState forward_voter(const EventLog& log, const voter::OpinionState& eta0) {
  return forward_voter_at(log, eta0, log.horizon);
}

voter::OpinionState forward_voter_at(const EventLog& log, const voter::OpinionState& eta0, double t) {
  if (eta0.size() != log.n) throw std::invalid_argument("opinion state and log differ in size");
  voter::OpinionState eta = eta0;
  for (const auto& e : log.events) {
    if (e.time > t) break;
    eta.set(e.site, eta[e.target]);
  }
  return eta;
}

SiteSet backward_dual(const EventLog& log, const SiteSet& support, double t) {
  if (t > log.horizon) throw std::invalid_argument("backward_dual: t exceeds the horizon");
  check_sites(support, log.n);
  std::vector<std::uint8_t> occupied(log.n, 0);
  for (std::uint32_t x : support) occupied[x] = 1;
  auto end = std::upper_bound(log.events.begin(), log.events.end(), t,
                              [](double s, const UpdateEvent& e) { return s < e.time; });
  for (auto it = std::make_reverse_iterator(end); it != log.events.rend(); ++it) {
    if (occupied[it->site] && it->site != it->target) {
      occupied[it->site] = 0;
      occupied[it->target] = 1;
    }
  }
  SiteSet out;
  for (std::size_t x = 0; x < log.n; ++x) {
    if (occupied[x]) out.push_back(static_cast<std::uint32_t>(x));
  }
  return out;
}

std::pair<bool, bool> duality_indicator_pair(const EventLog& log, const voter::OpinionState& eta0,
                                             const SiteSet& a, double t) {
  check_sites(a, log.n);
  const voter::OpinionState eta_t = forward_voter_at(log, eta0, t);
  const SiteSet traced = backward_dual(log, a, t);
  return {eta_t.all_ones_on(a), eta0.all_ones_on(traced)};
}

std::vector<std::uint64_t> site_counts(const EventLog& log) {
  std::vector<std::uint64_t> c(log.n, 0);
  for (const auto& e : log.events) ++c[e.site];
  return c;
}

void write_binary(const EventLog& log, std::ostream& out) {
  put_le<std::uint16_t>(out, kMagic);
  put_le<std::uint16_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(log.n));
  put_le<double>(out, log.horizon);
  for (const auto& e : log.events) {
    put_le<double>(out, e.time);
    put_le<std::uint32_t>(out, e.site);
    put_le<std::uint32_t>(out, e.target);
  }
}

EventLog read_binary(std::istream& in) {
  if (get_le<std::uint16_t>(in) != kMagic) throw std::runtime_error("event log: bad magic");
  if (get_le<std::uint16_t>(in) != kVersion) throw std::runtime_error("event log: unsupported version");
  EventLog log;
  log.n = get_le<std::uint32_t>(in);
  log.horizon = get_le<double>(in);
  while (in.peek() != std::char_traits<char>::eof()) {
    UpdateEvent e;
    e.time = get_le<double>(in);
    e.site = get_le<std::uint32_t>(in);
    e.target = get_le<std::uint32_t>(in);
    if (e.site >= log.n || e.target >= log.n) throw std::runtime_error("event log: site out of range");
    log.events.push_back(e);
  }
  return log;
}

}  // namespace svoter::graphical
