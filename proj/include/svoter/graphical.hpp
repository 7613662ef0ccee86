#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "svoter/env.hpp"
#include "svoter/rng.hpp"
#include "svoter/voter.hpp"

namespace svoter::graphical {

/// At `time`, voter `site` copies the opinion of `target`.
struct UpdateEvent {
  double time = 0.0;
  std::uint32_t site = 0;
  std::uint32_t target = 0;
};

/// Materialized Poisson field of update events on [0, horizon].
struct EventLog {
  std::size_t n = 0;
  double horizon = 0.0;
  std::vector<UpdateEvent> events;  ///< non-decreasing times; generation order breaks ties
  std::vector<double> rates;        ///< 1 / w_x
};

using SiteSet = std::vector<std::uint32_t>;  ///< sorted, duplicate free

inline constexpr double kDefaultEventCap = 5e7;

/// Total rate R = sum 1/w_x; sites drawn with probability (1/w_x)/R and
/// targets uniform on [n] (self included). Throws SizingError when R * horizon
/// exceeds `max_expected_events`.
EventLog generate_log(const env::Environment& env, double horizon, Stream& rng,
                      double max_expected_events = kDefaultEventCap);

/// Applies the events with t0 < time <= t1 in order.
void apply_events(const EventLog& log, voter::OpinionState& eta, double t0, double t1);

/// Opinion state at the horizon.
voter::OpinionState forward_voter(const EventLog& log, const voter::OpinionState& eta0);
/// Opinion state at time t <= horizon.
voter::OpinionState forward_voter_at(const EventLog& log, const voter::OpinionState& eta0, double t);

/// Traces the lineages of `support` from time t back to 0 through the events
/// with time <= t (the same events forward_voter_at applies); returns the
/// occupied set at time 0.
SiteSet backward_dual(const EventLog& log, const SiteSet& support, double t);

/// (1{eta_t == 1 on A}, 1{eta_0 == 1 on backward_dual(A)}).
std::pair<bool, bool> duality_indicator_pair(const EventLog& log, const voter::OpinionState& eta0,
                                             const SiteSet& a, double t);

/// Number of events per site.
std::vector<std::uint64_t> site_counts(const EventLog& log);

/// Little-endian dump: 16-byte header (u16 magic "SV", u16 version, u32 n,
/// f64 horizon) followed by (f64 time, u32 site, u32 target) records.
void write_binary(const EventLog& log, std::ostream& out);
EventLog read_binary(std::istream& in);

}  // namespace svoter::graphical
