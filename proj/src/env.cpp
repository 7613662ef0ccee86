#include "svoter/env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "svoter/errors.hpp"
#include "svoter/stats.hpp"

namespace svoter::env {

namespace {

// log(log(e + e^s)) without overflowing e^s.
double loglog_e_plus_exp(double s) noexcept {
  const double l = s > 0.0 ? s + std::log1p(std::exp(1.0 - s)) : std::log(std::exp(1.0) + std::exp(s));
  return std::log(l);
}

// log S(e^s) - log u for the perturbed family; strictly decreasing in s.
double log_survival_perturbed(double alpha, double beta, double s) noexcept {
  return -alpha * s + beta * loglog_e_plus_exp(s);
}

double dlog_survival_perturbed(double alpha, double beta, double s) noexcept {
  const double t = std::exp(s);
  const double l = s > 0.0 ? s + std::log1p(std::exp(1.0 - s)) : std::log(std::exp(1.0) + t);
  return -alpha + beta * t / ((std::exp(1.0) + t) * l);
}

// sup_t t / ((e + t) log(e + t)); bounds the slope contributed by the log factor.
double log_factor_slope_sup() {
  static const double value = [] {
    double best = 0.0;
    for (int k = -600; k <= 3000; ++k) {
      const double t = std::pow(10.0, k / 200.0);
      best = std::max(best, t / ((std::exp(1.0) + t) * std::log(std::exp(1.0) + t)));
    }
    return best * (1.0 + 1e-3);
  }();
  return value;
}

// Bracket [lo, hi] in s = log t with f(lo) >= target >= f(hi), f decreasing.
std::pair<double, double> bracket(const TailLaw& law, double target) {
  double lo = std::log(law.xmin);
  double hi = std::max(lo + 1.0, lo - target / law.alpha);
  double step = 1.0;
  for (int it = 0; it < 200; ++it) {
    if (log_survival_perturbed(law.alpha, law.beta, hi) <= target) return {lo, hi};
    lo = hi;
    hi += step;
    step *= 2.0;
  }
  throw SolverError("tail law: could not bracket the inverse survival");
}

}  // namespace

void validate_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
}

TailLaw TailLaw::pareto(double alpha) {
  validate_alpha(alpha);
  return TailLaw{alpha, Family::ParetoExact, 0.0, 1.0};
}

TailLaw TailLaw::log_perturbed(double alpha, double beta) {
  validate_alpha(alpha);
  if (!std::isfinite(beta)) throw std::invalid_argument("beta must be finite");
  if (beta > 0.0 && beta * log_factor_slope_sup() >= alpha) {
    throw std::invalid_argument("log-perturbed tail: beta too large for a monotone survival function");
  }
  TailLaw law{alpha, Family::ParetoLogPerturbed, beta, 1.0};
  if (beta == 0.0) return law;
  // S(xmin) = 1  <=>  -alpha s + beta loglog(e + e^s) = 0.
  double lo = -50.0, hi = 50.0;
  auto f = [&](double s) { return log_survival_perturbed(alpha, beta, s); };
  if (!(f(lo) > 0.0 && f(hi) < 0.0)) throw SolverError("log-perturbed tail: xmin not bracketed");
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  law.xmin = std::exp(hi);
  return law;
}

double TailLaw::survival(double t) const noexcept {
  if (t <= xmin) return 1.0;
  if (family == Family::ParetoExact) return std::pow(t / xmin, -alpha);
  return std::min(1.0, std::exp(log_survival_perturbed(alpha, beta, std::log(t))));
}

double TailLaw::inverse_survival(double u) const {
  if (!(u > 0.0 && u <= 1.0)) throw std::invalid_argument("inverse_survival: u must lie in (0,1]");
  if (family == Family::ParetoExact) return xmin * std::pow(u, -1.0 / alpha);
  if (u == 1.0) return xmin;
  const double target = std::log(u);
  auto [lo, hi] = bracket(*this, target);
  // Safeguarded Newton in s = log t.
  double s = std::clamp(-target / alpha, lo, hi);
  for (int it = 0; it < 100; ++it) {
    const double g = log_survival_perturbed(alpha, beta, s) - target;
    if (g > 0.0) lo = s; else hi = s;
    if (g == 0.0) break;
    double next = s - g / dlog_survival_perturbed(alpha, beta, s);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - s) <= 1e-15 * std::max(1.0, std::fabs(s))) {
      s = next;
      break;
    }
    s = next;
  }
  return std::max(xmin, std::exp(s));
}

std::string TailLaw::family_name() const {
  return family == Family::ParetoExact ? "pareto" : "log_perturbed";
}

Environment Environment::from_weights(std::vector<double> weights, double a_n, TailLaw law) {
  if (weights.empty()) throw std::invalid_argument("environment needs at least one weight");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights must be positive and finite");
  }
  std::stable_sort(weights.begin(), weights.end(), std::greater<>());
  Environment env;
  env.law = law;
  env.n = weights.size();
  env.total = stats::pairwise_sum(weights);
  env.weights = std::move(weights);
  env.a_n = a_n;
  return env;
}

std::vector<double> Environment::rates() const {
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = 1.0 / weights[i];
  return r;
}

LimitEnvironment LimitEnvironment::from_xi(std::vector<double> xi, double alpha) {
  if (xi.empty()) throw std::invalid_argument("limit environment needs depth >= 1");
  for (std::size_t i = 0; i < xi.size(); ++i) {
    if (!(xi[i] > 0.0)) throw std::invalid_argument("xi entries must be positive");
  }
  LimitEnvironment lim;
  lim.alpha = alpha;
  lim.depth = xi.size();
  lim.partial_mass = stats::pairwise_sum(xi);
  lim.xi = std::move(xi);
  return lim;
}

std::span<const double> LimitEnvironment::head(std::size_t n) const {
  if (n > depth) throw std::invalid_argument("requested more sites than the truncation depth");
  return std::span<const double>(xi).first(n);
}

Environment sample_weights(const TailLaw& law, std::size_t n, Stream& rng) {
  if (n == 0) throw std::invalid_argument("sample_weights: n must be >= 1");
  validate_alpha(law.alpha);
  std::vector<double> w(n);
  for (auto& x : w) x = law.inverse_survival(rng.uniform_pos());
  Environment env = Environment::from_weights(std::move(w), scale_constant(law, n), law);
  env.seed_provenance = splitmix64_mix(rng.key() ^ splitmix64_mix(rng.stream_id()));
  return env;
}

double sample_maximum(const TailLaw& law, std::size_t n, Stream& rng) {
  if (n == 0) throw std::invalid_argument("sample_maximum: n must be >= 1");
  double umin = 1.0;
  for (std::size_t i = 0; i < n; ++i) umin = std::min(umin, rng.uniform_pos());
  return law.inverse_survival(umin);
}

double scale_constant(const TailLaw& law, std::size_t n) {
  if (n == 0) throw std::invalid_argument("scale_constant: n must be >= 1");
  validate_alpha(law.alpha);
  const double nd = static_cast<double>(n);
  if (law.family == Family::ParetoExact) return law.xmin * std::pow(nd, 1.0 / law.alpha);
  if (n == 1) return law.xmin;
  const double target = -std::log(nd);
  auto [lo, hi] = bracket(law, target);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (log_survival_perturbed(law.alpha, law.beta, mid) > target ? lo : hi) = mid;
  }
  const double a = std::exp(0.5 * (lo + hi));
  if (std::fabs(nd * law.survival(a) - 1.0) > 1e-10) {
    throw SolverError("scale_constant: bisection did not reach n S(a) = 1 within 1e-10");
  }
  return a;
}

std::vector<double> draw_chi(std::size_t count, Stream& rng) {
  std::vector<double> chi(count);
  for (auto& c : chi) {
    do {
      c = rng.exponential(1.0);
    } while (!(c > 0.0));
  }
  return chi;
}

LimitEnvironment limit_environment_from_chi(double alpha, std::span<const double> chi,
                                            std::size_t depth) {
  validate_alpha(alpha);
  if (depth == 0) throw std::invalid_argument("limit environment: depth must be >= 1");
  if (chi.size() < depth) throw std::invalid_argument("limit environment: chi stream too short");
  LimitEnvironment lim;
  lim.alpha = alpha;
  lim.depth = depth;
  lim.xi.resize(depth);
  lim.chi.assign(chi.begin(), chi.begin() + static_cast<std::ptrdiff_t>(depth));
  double gamma = 0.0;
  for (std::size_t i = 0; i < depth; ++i) {
    if (!(chi[i] > 0.0)) throw std::invalid_argument("limit environment: chi entries must be positive");
    gamma += chi[i];
    lim.xi[i] = std::pow(gamma, -1.0 / alpha);
  }
  lim.partial_mass = stats::pairwise_sum(lim.xi);
  return lim;
}

LimitEnvironment sample_limit_environment(double alpha, std::size_t depth, Stream& rng) {
  validate_alpha(alpha);
  if (depth == 0) throw std::invalid_argument("limit environment: depth must be >= 1");
  const auto chi = draw_chi(depth, rng);
  LimitEnvironment lim = limit_environment_from_chi(alpha, chi, depth);
  lim.seed_provenance = splitmix64_mix(rng.key() ^ splitmix64_mix(rng.stream_id()));
  return lim;
}

Environment coupled_environment(const TailLaw& law, std::size_t n, std::span<const double> chi) {
  if (n == 0) throw std::invalid_argument("coupled_environment: n must be >= 1");
  if (chi.size() < n + 1) throw std::invalid_argument("coupled_environment: need n + 1 exponentials");
  std::vector<double> gamma(n + 1);
  double g = 0.0;
  for (std::size_t i = 0; i <= n; ++i) gamma[i] = (g += chi[i]);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = law.inverse_survival(std::min(1.0, gamma[i] / gamma[n]));
  }
  return Environment::from_weights(std::move(w), scale_constant(law, n), law);
}

RankedVector ranked(std::span<const double> entries) {
  RankedVector r;
  r.entries.assign(entries.begin(), entries.end());
  r.mass = stats::pairwise_sum(r.entries);
  return r;
}

RankedVector rescale_ranked(const Environment& env) {
  RankedVector r;
  r.entries.resize(env.n);
  for (std::size_t i = 0; i < env.n; ++i) r.entries[i] = env.weights[i] / env.a_n;
  r.mass = env.total / env.a_n;
  return r;
}

double z_lambda(std::span<const double> xi, double lambda) {
  std::vector<double> terms(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const double denom = 1.0 + lambda * xi[i];
    if (std::fabs(denom) < 1e-12) throw PoleError("z_lambda: lambda too close to -1/xi_x");
    terms[i] = lambda * xi[i] / denom;
  }
  return stats::pairwise_sum(terms);
}

double ell1_distance(std::span<const double> a, std::span<const double> b) noexcept {
  const std::size_t n = std::max(a.size(), b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = i < a.size() ? a[i] : 0.0;
    const double y = i < b.size() ? b[i] : 0.0;
    s += std::fabs(x - y);
  }
  return s;
}

Regularity regularity(const LimitEnvironment& lim) {
  Regularity r{INFINITY, 0.0};
  for (std::size_t i = 0; i < lim.depth; ++i) {
    const double v = lim.xi[i] * std::pow(static_cast<double>(i + 1), 1.0 / lim.alpha);
    r.min_ratio = std::min(r.min_ratio, v);
    r.max_ratio = std::max(r.max_ratio, v);
  }
  return r;
}

double frechet_cdf(double x, double alpha) noexcept {
  if (x <= 0.0) return 0.0;
  return std::exp(-std::pow(x, -alpha));
}

double rescaled_maximum_cdf(const TailLaw& law, std::size_t n, double a_n, double x) noexcept {
  const double s = law.survival(x * a_n);
  if (s >= 1.0) return 0.0;
  return std::exp(static_cast<double>(n) * std::log1p(-s));
}

nlohmann::json to_json(const Environment& env) {
  return {{"alpha", env.law.alpha},       {"family", env.law.family_name()},
          {"beta", env.law.beta},         {"xmin", env.law.xmin},
          {"n", env.n},                   {"a_n", env.a_n},
          {"weights", env.weights},       {"seed_provenance", env.seed_provenance}};
}

nlohmann::json to_json(const LimitEnvironment& lim) {
  return {{"alpha", lim.alpha}, {"family", "limit"},         {"depth", lim.depth},
          {"xi", lim.xi},       {"partial_mass", lim.partial_mass}, {"chi", lim.chi},
          {"seed_provenance", lim.seed_provenance}};
}

Environment environment_from_json(const nlohmann::json& j) {
  const double alpha = j.at("alpha").get<double>();
  const std::string family = j.at("family").get<std::string>();
  TailLaw law;
  if (family == "pareto") {
    law = TailLaw::pareto(alpha);
  } else if (family == "log_perturbed") {
    law = TailLaw{alpha, Family::ParetoLogPerturbed, j.at("beta").get<double>(),
                  j.at("xmin").get<double>()};
  } else {
    throw std::invalid_argument("unknown environment family: " + family);
  }
  Environment env = Environment::from_weights(j.at("weights").get<std::vector<double>>(),
                                              j.at("a_n").get<double>(), law);
  if (env.n != j.at("n").get<std::size_t>()) throw std::invalid_argument("environment: n mismatch");
  env.seed_provenance = j.value("seed_provenance", std::uint64_t{0});
  return env;
}

LimitEnvironment limit_environment_from_json(const nlohmann::json& j) {
  LimitEnvironment lim = LimitEnvironment::from_xi(j.at("xi").get<std::vector<double>>(),
                                                   j.at("alpha").get<double>());
  if (lim.depth != j.at("depth").get<std::size_t>()) throw std::invalid_argument("limit environment: depth mismatch");
  if (j.contains("chi")) lim.chi = j.at("chi").get<std::vector<double>>();
  lim.seed_provenance = j.value("seed_provenance", std::uint64_t{0});
  return lim;
}

}  // namespace svoter::env
