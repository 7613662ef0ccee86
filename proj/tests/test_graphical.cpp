#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "svoter/errors.hpp"
#include "svoter/graphical.hpp"
#include "svoter/stats.hpp"

using namespace svoter;
using namespace svoter::graphical;
using voter::OpinionState;

namespace {

EventLog hand_log(std::size_t n, double horizon, std::vector<UpdateEvent> events) {
  EventLog log;
  log.n = n;
  log.horizon = horizon;
  log.events = std::move(events);
  log.rates.assign(n, 1.0);
  return log;
}

OpinionState random_state(std::size_t n, Stream& rng) {
  std::vector<std::uint8_t> bits(n);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.uniform_index(2));
  return OpinionState(std::move(bits));
}

SiteSet random_set(std::size_t n, Stream& rng) {
  SiteSet a;
  for (std::uint32_t x = 0; x < n; ++x) {
    if (rng.uniform_index(3) == 0) a.push_back(x);
  }
  if (a.empty()) a.push_back(rng.uniform_index(static_cast<std::uint32_t>(n)));
  return a;
}

}  // namespace

TEST_CASE("a log with no events") {
  const auto log = hand_log(3, 1.0, {});
  const OpinionState eta({1, 0, 1});
  CHECK(forward_voter(log, eta) == eta);
  CHECK(backward_dual(log, {0, 2}, 1.0) == SiteSet{0, 2});

  // A tiny horizon on a slow environment almost surely produces no events.
  Stream rng(1, 1);
  const auto e = env::Environment::from_weights({1e12, 1e12}, 1.0);
  const auto g = generate_log(e, 1e-9, rng);
  CHECK(g.events.empty());
  CHECK(g.n == 2);
}

TEST_CASE("one copy event, forward and backward") {
  // Site 2 copies site 1 (0-based: 1 copies 0).
  const auto log = hand_log(2, 1.0, {{0.5, 1, 0}});
  CHECK(forward_voter(log, OpinionState({1, 0})) == OpinionState({1, 1}));
  CHECK(backward_dual(log, {1}, 1.0) == SiteSet{0});
  CHECK(backward_dual(log, {0, 1}, 1.0) == SiteSet{0});
  // Before the event nothing moves.
  CHECK(backward_dual(log, {1}, 0.25) == SiteSet{1});
  CHECK(forward_voter_at(log, OpinionState({1, 0}), 0.25) == OpinionState({1, 0}));
}

TEST_CASE("consensus states are absorbing for any log") {
  Stream rng(2, 2);
  const auto e = env::sample_weights(env::TailLaw::pareto(0.5), 16, rng);
  const auto log = generate_log(e, 50.0, rng);
  CHECK(forward_voter(log, OpinionState::constant(16, true)) == OpinionState::constant(16, true));
  CHECK(forward_voter(log, OpinionState::constant(16, false)) == OpinionState::constant(16, false));
}

TEST_CASE("trivial duality pairs") {
  Stream rng(3, 3);
  const auto e = env::sample_weights(env::TailLaw::pareto(0.5), 16, rng);
  const auto log = generate_log(e, 10.0, rng);
  for (int k = 0; k < 20; ++k) {
    const auto a = random_set(16, rng);
    CHECK(duality_indicator_pair(log, OpinionState::constant(16, true), a, 10.0) == std::pair{true, true});
    CHECK(duality_indicator_pair(log, OpinionState::constant(16, false), a, 10.0) == std::pair{false, false});
  }
}

TEST_CASE("pathwise duality on random logs") {
  int mismatches = 0;
  for (std::uint64_t r = 0; r < 1000; ++r) {
    Stream rng(4, r);
    const auto e = env::sample_weights(env::TailLaw::pareto(0.5), 16, rng);
    const double horizon = 5.0 * rng.uniform_pos();
    const auto log = generate_log(e, horizon, rng);
    const auto eta = random_state(16, rng);
    const auto a = random_set(16, rng);
    const double t = horizon * rng.uniform();
    const auto [lhs, rhs] = duality_indicator_pair(log, eta, a, t);
    mismatches += lhs != rhs;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("forward evolution splits over a prefix") {
  Stream rng(5, 5);
  const auto e = env::sample_weights(env::TailLaw::pareto(0.5), 24, rng);
  const auto log = generate_log(e, 20.0, rng);
  for (int k = 0; k < 50; ++k) {
    const auto eta = random_state(24, rng);
    const double s = 20.0 * rng.uniform();
    auto split = forward_voter_at(log, eta, s);
    apply_events(log, split, s, 20.0);
    CHECK(split == forward_voter(log, eta));
  }
}

TEST_CASE("backward dual is monotone and never grows") {
  Stream rng(6, 6);
  const auto e = env::sample_weights(env::TailLaw::pareto(0.5), 20, rng);
  const auto log = generate_log(e, 30.0, rng);
  for (int k = 0; k < 100; ++k) {
    auto b = random_set(20, rng);
    SiteSet a;
    for (auto x : b) {
      if (rng.uniform_index(2)) a.push_back(x);
    }
    const double t = 30.0 * rng.uniform();
    const auto da = backward_dual(log, a, t);
    const auto db = backward_dual(log, b, t);
    CHECK(std::includes(db.begin(), db.end(), da.begin(), da.end()));
    CHECK(db.size() <= b.size());
  }
}

TEST_CASE("per-site event counts are Poisson(T / w_x)") {
  Stream rng(7, 7);
  const auto e = env::Environment::from_weights({1.0, 2.0, 4.0, 8.0}, 1.0);
  const double horizon = 400.0;
  // Chi-square of the count vector of one site over independent logs.
  std::vector<std::vector<double>> counts(4);
  for (int r = 0; r < 400; ++r) {
    const auto c = site_counts(generate_log(e, horizon, rng));
    for (std::size_t x = 0; x < 4; ++x) counts[x].push_back(double(c[x]));
  }
  for (std::size_t x = 0; x < 4; ++x) {
    const double mean = horizon / e.weights[x];
    const auto m = stats::mean_se(counts[x]);
    CHECK(std::fabs(m.mean - mean) <= 4.0 * std::sqrt(mean / 400.0));
    CHECK(m.sd * m.sd == doctest::Approx(mean).epsilon(0.25));
  }
}

TEST_CASE("event times increase and sites stay in range") {
  Stream rng(8, 8);
  const auto e = env::sample_weights(env::TailLaw::pareto(0.5), 10, rng);
  const auto log = generate_log(e, 100.0, rng);
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    REQUIRE(log.events[i].site < 10u);
    REQUIRE(log.events[i].target < 10u);
    REQUIRE(log.events[i].time <= 100.0);
    if (i) REQUIRE(log.events[i].time > log.events[i - 1].time);
  }
}

TEST_CASE("binary dump round trip") {
  Stream rng(9, 9);
  const auto e = env::sample_weights(env::TailLaw::pareto(0.5), 12, rng);
  const auto log = generate_log(e, 10.0, rng);
  std::stringstream buf;
  write_binary(log, buf);
  CHECK(buf.str().size() == 16 + 16 * log.events.size());
  const auto back = read_binary(buf);
  CHECK(back.n == log.n);
  CHECK(back.horizon == log.horizon);
  REQUIRE(back.events.size() == log.events.size());
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    CHECK(back.events[i].time == log.events[i].time);
    CHECK(back.events[i].site == log.events[i].site);
    CHECK(back.events[i].target == log.events[i].target);
  }
}

TEST_CASE("oversized logs are refused") {
  Stream rng(10, 10);
  const auto e = env::Environment::from_weights({1.0, 1.0}, 1.0);
  CHECK_THROWS_AS(generate_log(e, 1e6, rng, 1e5), SizingError);
}
