#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "svoter/rng.hpp"

namespace svoter::env {

enum class Family { ParetoExact, ParetoLogPerturbed };

/// Tail law of a single weight: P(w > t) = t^{-alpha} L(t) for t >= xmin,
/// with L == 1 (exact Pareto) or L(t) = log(e + t)^beta.
struct TailLaw {
  double alpha = 0.5;
  Family family = Family::ParetoExact;
  double beta = 0.0;
  double xmin = 1.0;

  static TailLaw pareto(double alpha);
  /// xmin is solved from S(xmin) = 1. Requires S to be strictly decreasing,
  /// which holds when beta <= 0 or beta is small against alpha.
  static TailLaw log_perturbed(double alpha, double beta);

  /// Survival function S(t) = P(w > t); equals 1 below xmin.
  double survival(double t) const noexcept;
  /// The unique t >= xmin with S(t) = u, for u in (0, 1].
  double inverse_survival(double u) const;
  std::string family_name() const;
};

/// A finite ranked weight landscape w_1 >= ... >= w_n.
struct Environment {
  TailLaw law;
  std::size_t n = 0;
  std::vector<double> weights;
  double a_n = 1.0;
  double total = 0.0;
  std::uint64_t seed_provenance = 0;

  /// Builds an environment from explicit weights (sorted here, descending).
  static Environment from_weights(std::vector<double> weights, double a_n,
                                  TailLaw law = TailLaw::pareto(0.5));
  std::vector<double> rates() const;  ///< 1 / w_x
};

/// Truncation of xi_i = (chi_1 + ... + chi_i)^{-1/alpha}.
struct LimitEnvironment {
  double alpha = 0.5;
  std::size_t depth = 0;
  std::vector<double> xi;
  double partial_mass = 0.0;
  std::vector<double> chi;  ///< the exponential stream xi was built from (may be empty for hooks)
  std::uint64_t seed_provenance = 0;

  /// Test hook: wraps an explicit positive sequence (ties allowed).
  static LimitEnvironment from_xi(std::vector<double> xi, double alpha = 0.5);
  /// First n entries (n <= depth).
  std::span<const double> head(std::size_t n) const;
};

struct RankedVector {
  std::vector<double> entries;
  double mass = 0.0;
};

void validate_alpha(double alpha);

/// n i.i.d. weights by inverse-CDF transform, sorted descending.
Environment sample_weights(const TailLaw& law, std::size_t n, Stream& rng);
/// Largest of n weights drawn exactly as sample_weights would draw them from
/// the same stream state, without storing or sorting the sample.
double sample_maximum(const TailLaw& law, std::size_t n, Stream& rng);

/// a_n with n * P(w > a_n) = 1 (to 1e-10); closed form for exact Pareto.
double scale_constant(const TailLaw& law, std::size_t n);

LimitEnvironment sample_limit_environment(double alpha, std::size_t depth, Stream& rng);
/// Same with the exponential stream supplied explicitly; chi.size() >= depth, entries > 0.
LimitEnvironment limit_environment_from_chi(double alpha, std::span<const double> chi,
                                            std::size_t depth);
/// Draws `count` standard exponentials, all strictly positive.
std::vector<double> draw_chi(std::size_t count, Stream& rng);

/// Finite environment of n weights coupled to a limit environment through the
/// shared exponential stream: the uniform order statistics are
/// U_(i) = Gamma_i / Gamma_{n+1} with Gamma_i = chi_1 + ... + chi_i, and
/// w_i = S^{-1}(U_(i)). The marginal law equals that of sample_weights.
/// Requires chi.size() >= n + 1.
Environment coupled_environment(const TailLaw& law, std::size_t n, std::span<const double> chi);

RankedVector rescale_ranked(const Environment& env);
RankedVector ranked(std::span<const double> entries);

/// sum_x lambda xi_x / (1 + lambda xi_x); PoleError if |1 + lambda xi_x| < 1e-12.
double z_lambda(std::span<const double> xi, double lambda);
inline double z_lambda(const RankedVector& v, double lambda) { return z_lambda(v.entries, lambda); }

double ell1_distance(std::span<const double> a, std::span<const double> b) noexcept;
inline double ell1_distance(const RankedVector& a, const RankedVector& b) noexcept {
  return ell1_distance(a.entries, b.entries);
}

/// Range of xi_i * i^{1/alpha} over the realization (soft diagnostic).
struct Regularity {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};
Regularity regularity(const LimitEnvironment& lim);

/// Fr\'echet(alpha) CDF exp(-x^{-alpha}).
double frechet_cdf(double x, double alpha) noexcept;

/// Exact CDF of w_1 / a_n for a finite n: (1 - S(x a_n))^n.
double rescaled_maximum_cdf(const TailLaw& law, std::size_t n, double a_n, double x) noexcept;

nlohmann::json to_json(const Environment& env);
nlohmann::json to_json(const LimitEnvironment& lim);
Environment environment_from_json(const nlohmann::json& j);
LimitEnvironment limit_environment_from_json(const nlohmann::json& j);

}  // namespace svoter::env
