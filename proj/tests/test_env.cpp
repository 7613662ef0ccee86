#include <doctest.h>

#include <cmath>
#include <numeric>

#include "svoter/env.hpp"
#include "svoter/errors.hpp"
#include "svoter/stats.hpp"

using namespace svoter;
using namespace svoter::env;

TEST_CASE("inverse-CDF arithmetic for exact Pareto") {
  const auto law = TailLaw::pareto(0.5);
  CHECK(law.inverse_survival(0.25) == doctest::Approx(16.0).epsilon(1e-15));
  CHECK(law.inverse_survival(1.0) == 1.0);
  CHECK(law.survival(0.5) == 1.0);
  CHECK(law.survival(16.0) == doctest::Approx(0.25));
}

TEST_CASE("a single weight") {
  Stream rng(1, 1);
  const auto e = sample_weights(TailLaw::pareto(0.5), 1, rng);
  REQUIRE(e.weights.size() == 1);
  CHECK(e.total == e.weights[0]);
}

TEST_CASE("scale constant") {
  CHECK(scale_constant(TailLaw::pareto(0.5), 4) == doctest::Approx(16.0).epsilon(1e-15));
  CHECK(scale_constant(TailLaw::pareto(0.5), 1) == doctest::Approx(1.0).epsilon(1e-15));
  for (double alpha : {0.2, 0.5, 0.9}) {
    for (std::size_t n : {1u, 7u, 1000u, 123456u}) {
      const double a = scale_constant(TailLaw::pareto(alpha), n);
      CHECK(double(n) * std::pow(a, -alpha) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  // Direct substitution into n a^{-1/2} log(e + a) = 1.
  const double a = scale_constant(TailLaw::log_perturbed(0.5, 1.0), 100);
  CHECK(std::fabs(100.0 * std::pow(a, -0.5) * std::log(std::exp(1.0) + a) - 1.0) <= 1e-10);
}

TEST_CASE("log-perturbed law is a valid survival function") {
  const auto law = TailLaw::log_perturbed(0.5, 1.0);
  CHECK(law.survival(law.xmin) == doctest::Approx(1.0).epsilon(1e-12));
  double prev = 1.0;
  for (double t = law.xmin; t < 1e8; t *= 1.7) {
    const double s = law.survival(t);
    CHECK(s <= prev);
    prev = s;
    CHECK(law.inverse_survival(s) == doctest::Approx(t).epsilon(1e-9));
  }
}

TEST_CASE("limit environment from a constant stream") {
  const std::vector<double> ones(3, 1.0);
  const auto lim = limit_environment_from_chi(0.5, ones, 3);
  REQUIRE(lim.xi.size() == 3);
  CHECK(lim.xi[0] == doctest::Approx(1.0));
  CHECK(lim.xi[1] == doctest::Approx(0.25));
  CHECK(lim.xi[2] == doctest::Approx(1.0 / 9.0));
  CHECK(lim.partial_mass == doctest::Approx(1.0 + 0.25 + 1.0 / 9.0));

  const std::vector<double> one{0.3};
  CHECK(limit_environment_from_chi(0.5, one, 1).xi[0] == doctest::Approx(std::pow(0.3, -2.0)));
}

TEST_CASE("limit environments are strictly decreasing") {
  for (std::uint64_t r = 0; r < 20; ++r) {
    Stream rng(7, r);
    const auto lim = sample_limit_environment(0.3 + 0.03 * double(r), 4096, rng);
    for (std::size_t i = 1; i < lim.depth; ++i) REQUIRE(lim.xi[i] < lim.xi[i - 1]);
  }
}

TEST_CASE("limit environment decays like i^{-1/alpha}") {
  Stream rng(11, 0);
  const auto lim = sample_limit_environment(0.5, 10000, rng);
  std::vector<double> x, y;
  for (std::size_t i = 100; i <= 10000; i += 10) {
    x.push_back(std::log(double(i)));
    y.push_back(std::log(lim.xi[i - 1]));
  }
  const auto fit = stats::linear_fit(x, y);
  CHECK(fit.slope >= -2.2);
  CHECK(fit.slope <= -1.8);
  const auto reg = regularity(lim);
  CHECK(reg.min_ratio > 0.0);
  CHECK(reg.max_ratio < INFINITY);
}

TEST_CASE("rescale_ranked") {
  auto e = Environment::from_weights({4.0, 16.0}, 16.0);
  const auto r = rescale_ranked(e);
  CHECK(r.entries == std::vector<double>{1.0, 0.25});
  CHECK(r.mass == 1.25);

  const auto single = rescale_ranked(Environment::from_weights({9.0}, 9.0));
  CHECK(single.entries == std::vector<double>{1.0});
  CHECK(single.mass == 1.0);
}

TEST_CASE("rescaling preserves ratios") {
  Stream rng(3, 3);
  const auto e = sample_weights(TailLaw::pareto(0.4), 500, rng);
  const auto r = rescale_ranked(e);
  for (std::size_t i = 0; i + 1 < e.n; i += 7) {
    const std::size_t j = (i * 13 + 5) % e.n;
    CHECK(std::fabs(r.entries[i] / r.entries[j] / (e.weights[i] / e.weights[j]) - 1.0) <= 1e-12);
  }
}

TEST_CASE("sampled weights are ranked and above xmin") {
  Stream rng(4, 4);
  const auto e = sample_weights(TailLaw::log_perturbed(0.5, 1.0), 2000, rng);
  CHECK(std::is_sorted(e.weights.rbegin(), e.weights.rend()));
  CHECK(e.weights.back() >= e.law.xmin);
  CHECK(e.total == doctest::Approx(stats::pairwise_sum(e.weights)));
}

TEST_CASE("sample_maximum agrees with sample_weights") {
  const auto law = TailLaw::pareto(0.5);
  for (std::uint64_t r = 0; r < 5; ++r) {
    Stream a(5, r), b(5, r);
    CHECK(sample_maximum(law, 300, a) == sample_weights(law, 300, b).weights.front());
  }
}

TEST_CASE("z_lambda") {
  const std::vector<double> one{1.0};
  CHECK(z_lambda(one, 1.0) == 0.5);
  const std::vector<double> xi{0.5, 0.25};
  CHECK(z_lambda(xi, 0.0) == 0.0);
  CHECK(z_lambda(xi, 2.0) == doctest::Approx(5.0 / 6.0));
  CHECK_THROWS_AS(z_lambda(one, -1.0), PoleError);

  Stream rng(6, 6);
  const auto lim = sample_limit_environment(0.5, 512, rng);
  double prev = 0.0;
  for (double lambda = 0.0; lambda <= 100.0; lambda += 0.25) {
    const double z = z_lambda(lim.xi, lambda);
    CHECK(z >= prev);
    prev = z;
  }
}

TEST_CASE("ell1 distance") {
  const std::vector<double> a{1.0, 0.5, 0.25}, b{1.0, 0.5, 0.0};
  CHECK(ell1_distance(a, a) == 0.0);
  CHECK(ell1_distance(a, b) == 0.25);
  const std::vector<double> e1{1.0, 0.0}, e2{0.0, 1.0};
  CHECK(ell1_distance(e1, e2) == 2.0);
  // Unequal lengths pad with zeros.
  const std::vector<double> c{1.0};
  CHECK(ell1_distance(a, c) == 0.75);
}

TEST_CASE("log-perturbed scale constant matches its defining survival") {
  const auto law = TailLaw::log_perturbed(0.5, 1.0);
  for (std::size_t n : {10u, 100u, 10000u}) {
    const double a = scale_constant(law, n);
    CHECK(double(n) * law.survival(a) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("finite maximum matches its exact law") {
  const auto law = TailLaw::pareto(0.5);
  const std::size_t n = 10000;
  const double a = scale_constant(law, n);
  std::vector<double> m(1000);
  for (std::size_t r = 0; r < m.size(); ++r) {
    Stream rng(8, r);
    m[r] = sample_maximum(law, n, rng) / a;
  }
  CHECK(stats::ks_test(m, [&](double x) { return rescaled_maximum_cdf(law, n, a, x); }).p_value > 0.01);
  CHECK(stats::ks_test(m, [](double x) { return frechet_cdf(x, 0.5); }).p_value > 0.01);
}

TEST_CASE("coupled environments have the sampling marginal") {
  const auto law = TailLaw::pareto(0.5);
  const std::size_t n = 200;
  const double a = scale_constant(law, n);
  std::vector<double> top(2000), last(2000);
  for (std::size_t r = 0; r < top.size(); ++r) {
    Stream rng(9, r);
    const auto chi = draw_chi(n + 1, rng);
    const auto e = coupled_environment(law, n, chi);
    CHECK(std::is_sorted(e.weights.rbegin(), e.weights.rend()));
    top[r] = e.weights.front() / a;
    last[r] = e.weights.back();
  }
  CHECK(stats::ks_test(top, [&](double x) { return rescaled_maximum_cdf(law, n, a, x); }).p_value > 0.01);
  // The minimum of n Pareto(1/2) weights: P(min > t) = t^{-n/2}.
  CHECK(stats::ks_test(last, [&](double t) { return t <= 1.0 ? 0.0 : 1.0 - std::pow(t, -0.5 * n); }).p_value >
        0.01);
}

TEST_CASE("coupled environment tracks the limit environment") {
  Stream rng(10, 0);
  const std::size_t n = 4096;
  const auto chi = draw_chi(n + 1, rng);
  const auto lim = limit_environment_from_chi(0.5, chi, 16);
  const auto e = coupled_environment(TailLaw::pareto(0.5), n, chi);
  double gamma = 0.0;
  for (double c : chi) gamma += c;
  const double scale = std::pow(gamma / double(n), 2.0);
  const auto r = rescale_ranked(e);
  for (std::size_t i = 0; i < 16; ++i) CHECK(r.entries[i] == doctest::Approx(lim.xi[i] * scale).epsilon(1e-9));
}

TEST_CASE("JSON round trip is value exact") {
  Stream rng(12, 0);
  const auto e = sample_weights(TailLaw::log_perturbed(0.5, 1.0), 50, rng);
  const auto back = environment_from_json(nlohmann::json::parse(to_json(e).dump()));
  CHECK(back.weights == e.weights);
  CHECK(back.a_n == e.a_n);
  CHECK(back.law.xmin == e.law.xmin);

  const auto lim = sample_limit_environment(0.5, 64, rng);
  const auto lback = limit_environment_from_json(nlohmann::json::parse(to_json(lim).dump()));
  CHECK(lback.xi == lim.xi);
}

TEST_CASE("alpha outside (0, 1) is rejected") {
  CHECK_THROWS(validate_alpha(0.0));
  CHECK_THROWS(validate_alpha(1.0));
  CHECK_NOTHROW(validate_alpha(0.5));
}
