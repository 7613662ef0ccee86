#include <doctest.h>

#include <Eigen/Dense>
#include <bit>
#include <cmath>

#include "svoter/dual.hpp"
#include "svoter/errors.hpp"
#include "svoter/stats.hpp"

using namespace svoter;
using namespace svoter::dual;

namespace {

// Mean hitting time of {|S| <= stop} for the occupied-set chain of
// coalescing walks on [n] (rate 1/xi_x per particle, uniform lazy target).
double exact_mean_time(const std::vector<double>& xi, unsigned start, int stop) {
  const unsigned n = static_cast<unsigned>(xi.size()), states = 1u << n;
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(states, states);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(states);
  for (unsigned s = 1; s < states; ++s) {
    if (std::popcount(s) <= stop) continue;
    double out = 0.0;
    a(s, s) = 0.0;
    for (unsigned x = 0; x < n; ++x) {
      if (!((s >> x) & 1u)) continue;
      for (unsigned y = 0; y < n; ++y) {
        if (y == x) continue;
        const double rate = 1.0 / (xi[x] * n);
        const unsigned t = (s & ~(1u << x)) | (1u << y);
        a(s, t) -= rate;
        out += rate;
      }
    }
    a(s, s) += out;
    b(s) = 1.0;
  }
  return a.fullPivLu().solve(b)(start);
}

}  // namespace

TEST_CASE("a single particle never coalesces") {
  const std::vector<double> means{1.0, 0.5, 0.25};
  const std::vector<std::uint32_t> init{1};
  Stream rng(1, 1);
  const auto ps = evolve_coalescing(means, init, 50.0, rng);
  CHECK(ps.count == 1);
  CHECK(ps.occupied.size() == 1);
  CHECK(ps.coalescence_log.empty());
  CHECK(ps.jumps > 0);
}

TEST_CASE("a full start shrinks monotonically") {
  Stream rng(2, 2);
  const auto lim = env::sample_limit_environment(0.5, 64, rng);
  std::vector<std::uint32_t> init(64);
  for (std::uint32_t i = 0; i < 64; ++i) init[i] = i;
  const auto ps = evolve_coalescing(lim.head(64), init, 5.0, rng);
  CHECK(ps.count >= 1);
  CHECK(ps.count == ps.occupied.size());
  CHECK(ps.coalescence_log.size() == 64 - ps.count);
  std::uint32_t prev = 64;
  double prev_t = 0.0;
  for (const auto& c : ps.coalescence_log) {
    CHECK(c.count_after == prev - 1);
    CHECK(c.time >= prev_t);
    CHECK(std::binary_search(init.begin(), init.end(), c.site));
    prev = c.count_after;
    prev_t = c.time;
  }
}

TEST_CASE("two unit sites coalesce at rate one") {
  const auto lim = env::LimitEnvironment::from_xi({1.0, 1.0});
  std::vector<double> tau(100000), inf(100000);
  for (std::size_t r = 0; r < tau.size(); ++r) {
    Stream rng(3, r);
    tau[r] = coalescence_time_sample(lim, 2, 1, rng).tau;
    inf[r] = tau_infinity_to_one(lim, 2, rng);
    REQUIRE(tau[r] > 0.0);
  }
  const auto m = stats::mean_se(tau);
  CHECK(std::fabs(m.mean - 1.0) <= 4.0 * m.se);
  const auto mi = stats::mean_se(inf);
  CHECK(std::fabs(mi.mean - 1.0) <= 4.0 * mi.se);
}

TEST_CASE("degenerate starts") {
  const std::vector<double> means{1.0, 1.0, 1.0};
  const std::vector<std::uint32_t> init{1, 1};
  Stream rng(4, 4);
  const auto t = coalescence_time_from(means, init, rng);
  CHECK(t.tau == 0.0);
  CHECK(t.m_from == 2);
  CHECK(t.m_to == 1);
  const auto lim = env::LimitEnvironment::from_xi({2.0});
  CHECK(tau_infinity_to_one(lim, 1, rng) == 0.0);
}

TEST_CASE("first coalescence time matches the exact subset chain") {
  Stream env_rng(5, 0);
  const auto lim = env::sample_limit_environment(0.5, 7, env_rng);
  const std::vector<double> xi(lim.xi.begin(), lim.xi.end());
  for (std::size_t m : {1u, 2u, 4u}) {
    const unsigned start = (1u << (m + 1)) - 1;
    const double exact = exact_mean_time(xi, start, static_cast<int>(m));
    std::vector<double> tau(40000);
    for (std::size_t r = 0; r < tau.size(); ++r) {
      Stream rng(5, 1000 * m + r);
      tau[r] = coalescence_time_sample(lim, 7, m, rng).tau;
    }
    const auto est = stats::mean_se(tau);
    CHECK(std::fabs(est.mean - exact) <= 4.0 * est.se);
  }
}

TEST_CASE("coming down to one particle matches the exact subset chain") {
  Stream env_rng(6, 0);
  const auto lim = env::sample_limit_environment(0.5, 6, env_rng);
  const std::vector<double> xi(lim.xi.begin(), lim.xi.end());
  const double exact = exact_mean_time(xi, (1u << 6) - 1, 1);
  std::vector<double> tau(40000);
  for (std::size_t r = 0; r < tau.size(); ++r) {
    Stream rng(6, r + 1);
    tau[r] = tau_infinity_to_one(lim, 6, rng);
  }
  const auto est = stats::mean_se(tau);
  CHECK(std::fabs(est.mean - exact) <= 4.0 * est.se);
}

TEST_CASE("relabelling sites with equal rates leaves the law unchanged") {
  const std::vector<double> means{1.0, 1.0, 1.0, 1.0, 0.3, 0.3, 0.1, 0.1};
  const std::vector<std::uint32_t> a{0, 1, 4}, b{2, 3, 5};
  std::vector<double> ta(30000), tb(30000);
  for (std::size_t r = 0; r < ta.size(); ++r) {
    Stream ra(7, 2 * r), rb(7, 2 * r + 1);
    ta[r] = coalescence_time_from(means, a, ra).tau;
    tb[r] = coalescence_time_from(means, b, rb).tau;
  }
  const auto ma = stats::mean_se(ta), mb = stats::mean_se(tb);
  CHECK(std::fabs(ma.mean - mb.mean) <= 4.0 * std::hypot(ma.se, mb.se));
  // Two-sample Kolmogorov-Smirnov.
  std::sort(ta.begin(), ta.end());
  std::sort(tb.begin(), tb.end());
  double d = 0.0;
  for (double v : ta) {
    const double fa = double(std::upper_bound(ta.begin(), ta.end(), v) - ta.begin()) / double(ta.size());
    const double fb = double(std::upper_bound(tb.begin(), tb.end(), v) - tb.begin()) / double(tb.size());
    d = std::max(d, std::fabs(fa - fb));
  }
  CHECK(stats::kolmogorov_sf(d * std::sqrt(ta.size() / 2.0)) > 0.01);
}

TEST_CASE("lower-bound jump process") {
  const auto lim = env::LimitEnvironment::from_xi(std::vector<double>(10, 1.0));
  Stream rng(8, 8);
  const auto p0 = lower_bound_jump_process(lim, 10, 2, 0.0, rng);
  CHECK(p0.times == std::vector<double>{0.0});
  CHECK(p0.counts == std::vector<std::uint64_t>{0});
  CHECK(p0.count_at(0.0) == 0);

  // With constant holding means the jump count is Poisson(t / xi).
  const double t = 3.0;
  const int cells = 12, draws = 20000;
  std::vector<double> obs(cells, 0.0), exp(cells, 0.0);
  for (int r = 0; r < draws; ++r) {
    const auto p = lower_bound_jump_process(lim, 10, 2, t, rng);
    obs[std::min<std::uint64_t>(p.count_at(t), cells - 1)] += 1.0;
    REQUIRE(p.counts.back() == p.counts.size() - 1);
  }
  double tail = 1.0;
  for (int k = 0; k < cells - 1; ++k) {
    const double pk = std::exp(k * std::log(t) - t - std::lgamma(k + 1.0));
    exp[k] = pk * draws;
    tail -= pk;
  }
  exp[cells - 1] = tail * draws;
  CHECK(stats::chi_square(obs, exp).p_value > 0.001);
}

TEST_CASE("Chernoff bound") {
  Stream rng(9, 9);
  const auto lim = env::sample_limit_environment(0.5, 256, rng);
  CHECK(chernoff_jump_bound(lim, 256, 16, 0.0) == 1.0);
  double prev = 1.0;
  for (int k = 1; k <= 20; ++k) {
    const double b = chernoff_jump_bound(lim, 256, 16, 0.01 * k);
    CHECK(b < prev);
    prev = b;
  }
  CHECK(regularity_constant(lim, 256) >= lim.xi[0]);
  CHECK(chernoff_threshold(lim, 256, 16, 0.0) == 0.0);
}

TEST_CASE("coalescing jump counts stop at the first merge") {
  Stream rng(10, 10);
  const auto lim = env::sample_limit_environment(0.5, 64, rng);
  for (int k = 0; k < 50; ++k) {
    bool coalesced = false;
    const auto p = coalescing_jump_counts(lim, 64, 4, 0.01, rng, coalesced);
    CHECK(p.times.front() == 0.0);
    CHECK(std::is_sorted(p.times.begin(), p.times.end()));
    CHECK(p.times.back() <= 0.01);
  }
}

TEST_CASE("jump budget") {
  const std::vector<double> means(4, 1e-3);
  const std::vector<std::uint32_t> init{0};
  Stream rng(11, 11);
  CHECK_THROWS_AS(evolve_coalescing(means, init, 1e3, rng, 100.0), SizingError);
}
