#include <doctest.h>

#include <cmath>
#include <unordered_set>

#include "svoter/rng.hpp"
#include "svoter/stats.hpp"

using namespace svoter;

namespace {

Philox4x32::Counter block(Philox4x32::Counter c, Philox4x32::Key k) { return Philox4x32::block(c, k); }

}  // namespace

TEST_CASE("Philox4x32-10 known-answer vectors") {
  CHECK(block({0, 0, 0, 0}, {0, 0}) == Philox4x32::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        Philox4x32::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        Philox4x32::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("derived streams are deterministic") {
  const SeedDerivation s{20261016, "suite/label", 7};
  Stream a = derive_stream(s), b = derive_stream(s);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("neighbouring replicas and labels differ") {
  CHECK(derive_stream({1, "x", 0}).next_u64() != derive_stream({1, "x", 1}).next_u64());
  CHECK(derive_stream({1, "x", 0}).next_u64() != derive_stream({1, "y", 0}).next_u64());
  CHECK(derive_stream({1, "x", 0}).next_u64() != derive_stream({2, "x", 0}).next_u64());
}

TEST_CASE("no duplicate initial 128-bit outputs over 10^6 derivations") {
  struct Hash {
    std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& p) const noexcept {
      return static_cast<std::size_t>(splitmix64_mix(p.first ^ splitmix64_mix(p.second)));
    }
  };
  std::unordered_set<std::pair<std::uint64_t, std::uint64_t>, Hash> seen;
  seen.reserve(1'100'000);
  const char* labels[] = {"a", "b", "consensus/alpha=0.5", "coupling/marginal/t=1/x=3"};
  std::size_t total = 0;
  for (const char* label : labels) {
    for (std::uint64_t r = 0; r < 250'000; ++r) {
      Stream s = derive_stream({20261016, label, r});
      const std::uint64_t hi = s.next_u64();
      seen.emplace(hi, s.next_u64());
      ++total;
    }
  }
  CHECK(total == 1'000'000);
  CHECK(seen.size() == total);
}

TEST_CASE("stream family provenance and children") {
  const StreamFamily f{5, "root"};
  CHECK(f.child("leaf").label == "root/leaf");
  CHECK(f.provenance(0) != f.provenance(1));
  Stream a = f.at(3), b = derive_stream({5, "root", 3});
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform variates stay in range") {
  Stream s(1, 2);
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    const double v = s.uniform_pos();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(v > 0.0);
    REQUIRE(v <= 1.0);
    REQUIRE(s.uniform_index(7) < 7u);
  }
  CHECK(s.uniform_index(1) == 0u);
}

TEST_CASE("uniform_index is uniform") {
  Stream s(3, 4);
  const int n = 10, draws = 200000;
  std::vector<double> obs(n, 0.0), exp(n, draws / double(n));
  for (int i = 0; i < draws; ++i) obs[s.uniform_index(n)] += 1.0;
  CHECK(stats::chi_square(obs, exp).p_value > 0.001);
}

TEST_CASE("variate means match their laws") {
  Stream s(11, 12);
  const int n = 200000;
  auto check_mean = [&](auto draw, double mean, double sd) {
    std::vector<double> x(n);
    for (auto& v : x) v = draw();
    const auto m = stats::mean_se(x);
    CHECK(std::fabs(m.mean - mean) <= 4.0 * sd / std::sqrt(double(n)));
  };
  check_mean([&] { return s.exponential(2.5); }, 2.5, 2.5);
  check_mean([&] { return s.normal(); }, 0.0, 1.0);
  check_mean([&] { return s.gamma(0.4, 2.0); }, 0.8, std::sqrt(0.4) * 2.0);
  check_mean([&] { return s.gamma(7.5, 1.0); }, 7.5, std::sqrt(7.5));
  check_mean([&] { return double(s.poisson(3.2)); }, 3.2, std::sqrt(3.2));
  check_mean([&] { return double(s.poisson(250.0)); }, 250.0, std::sqrt(250.0));
}

TEST_CASE("exponential variates pass a KS test") {
  Stream s(21, 22);
  std::vector<double> x(20000);
  for (auto& v : x) v = s.exponential(1.0);
  CHECK(stats::ks_test(x, [](double t) { return -std::expm1(-t); }).p_value > 0.01);
}

TEST_CASE("poisson variates match the pmf") {
  for (double mean : {0.7, 4.0, 40.0}) {
    Stream s(31, static_cast<std::uint64_t>(mean * 10));
    const int draws = 100000, cells = static_cast<int>(mean * 3 + 10);
    std::vector<double> obs(cells, 0.0), exp(cells, 0.0);
    for (int i = 0; i < draws; ++i) {
      const auto k = s.poisson(mean);
      obs[std::min<std::uint64_t>(k, cells - 1)] += 1.0;
    }
    double tail = 1.0;
    for (int k = 0; k < cells - 1; ++k) {
      const double p = std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
      exp[k] = p * draws;
      tail -= p;
    }
    exp[cells - 1] = std::max(tail, 0.0) * draws;
    CHECK(stats::chi_square(obs, exp).p_value > 0.001);
  }
}
