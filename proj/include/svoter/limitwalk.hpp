#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "svoter/env.hpp"
#include "svoter/rng.hpp"

namespace svoter::limitwalk {

using SiteSet = std::vector<std::uint32_t>;

/// Right-continuous path: the walk sits at sites[k] on [times[k], times[k+1])
/// (the last interval ends at the horizon). times[0] = 0. Every clock ring is
/// recorded, lazy self-jumps included.
struct WalkPath {
  double horizon = 0.0;
  std::vector<double> times;
  std::vector<std::uint32_t> sites;

  std::uint32_t start() const { return sites.front(); }
  std::size_t jump_count() const noexcept { return times.empty() ? 0 : times.size() - 1; }
  std::uint32_t position_at(double t) const;
};

struct WalkOptions {
  bool lazy = true;           ///< target uniform on [n] including the current site
  double max_events = 1e8;    ///< SizingError beyond this many rings
};

/// Walk on [means.size()] holding an Exp(mean means[x]) time at x, then
/// jumping to a uniform site (excluding x when not lazy).
WalkPath simulate_walk(std::span<const double> means, std::uint32_t start, double horizon,
                       Stream& rng, const WalkOptions& opts = {});
WalkPath simulate_walk(const env::LimitEnvironment& xi, std::size_t n, std::uint32_t start,
                       double horizon, Stream& rng, const WalkOptions& opts = {});

/// Position at time t without storing the path.
std::uint32_t position_at(std::span<const double> means, std::uint32_t start, double t, Stream& rng,
                          const WalkOptions& opts = {});

/// Trace on `a`: the clock runs only while the walk is in `a`. Each ring at a
/// site of `a` becomes one jump of the trace, landing on the next site of `a`
/// the walk occupies. A final ring whose return to `a` falls after the
/// horizon truncates the trace there. Throws NeverVisits.
WalkPath trace(const WalkPath& path, const SiteSet& a);

/// Holding times of a trace grouped by site: (site, length) for every
/// completed holding interval.
std::vector<std::pair<std::uint32_t, double>> holding_times(const WalkPath& path);

struct ExcursionStats {
  std::vector<double> excursions;  ///< maximal stretches outside A after the first hit
  std::vector<double> incursions;  ///< maximal stretches inside A
  std::optional<double> first_hit; ///< T_0; empty when A is never entered
  bool last_censored = false;      ///< the final stretch was cut by the horizon
  bool last_inside = false;        ///< kind of the final stretch

  std::vector<double> complete_incursions() const;
  std::vector<double> complete_excursions() const;
};

ExcursionStats excursion_stats(const WalkPath& path, const SiteSet& a);

/// (m / (m - |a|)) * mean_{x in a} xi_x.
double incursion_mean_formula(std::span<const double> xi, const SiteSet& a, std::size_t m);
/// E exp(-lambda I^a) = (m - |a|) phi / (m - |a| phi), phi = mean_{x in a} 1/(1 + lambda xi_x).
double incursion_laplace(std::span<const double> xi, const SiteSet& a, std::size_t m, double lambda);
/// Mean excursion length outside [n] for the walk on [m], the incursion mean of
/// [m] minus [n]: (m / (n (m - n))) sum_{n < x <= m} xi_x.
double excursion_mean_formula(std::span<const double> xi, std::size_t n, std::size_t m);

struct CharacteristicValue {
  std::complex<double> value;
  double tail_remainder = 0.0;  ///< |lambda| times the estimated mass beyond the truncation
  bool within_tolerance() const noexcept { return tail_remainder < 1e-6; }
};

/// psi(lambda) = 1 / (1 - sum_{x != y} i lambda xi_x / (1 - i lambda xi_x)).
CharacteristicValue excursion_cf_limit(const env::LimitEnvironment& xi, std::uint32_t y, double lambda);
/// Estimated sum_{i > depth} xi_i from the regular-variation profile.
double tail_mass_estimate(const env::LimitEnvironment& xi);

struct MarginalEstimate {
  std::vector<double> p;   ///< normalized counts
  std::vector<double> se;  ///< binomial standard error per site
  std::uint64_t replicas = 0;
};

/// Empirical law of X_t from `start` on [means.size()]; start = -1 means uniform.
MarginalEstimate marginal_estimate(std::span<const double> means, std::int64_t start, double t,
                                   std::uint64_t replicas, const StreamFamily& family,
                                   unsigned threads = 1);
/// Uniform-start marginal R_t^m of X^{(m)}.
MarginalEstimate entrance_law_estimate(const env::LimitEnvironment& xi, std::size_t m, double t,
                                       std::uint64_t replicas, const StreamFamily& family,
                                       unsigned threads = 1);

std::vector<double> stationary_distribution(std::span<const double> xi);
std::vector<double> stationary_distribution(const env::LimitEnvironment& xi, std::size_t n);

// ---- dense matrix oracle (n <= kDenseCap) ----

inline constexpr std::size_t kDenseCap = 2048;

Eigen::MatrixXd generator_matrix(std::span<const double> xi);
Eigen::MatrixXd generator_matrix(const env::LimitEnvironment& xi, std::size_t n);
/// exp(tG) by uniformization, with scaling and squaring when q t > 1.
Eigen::MatrixXd semigroup_matrix(std::span<const double> xi, double t);
Eigen::MatrixXd semigroup_matrix(const env::LimitEnvironment& xi, std::size_t n, double t);
/// exp(tG) from the eigendecomposition of the symmetrized generator.
Eigen::MatrixXd semigroup_matrix_spectral(std::span<const double> xi, double t);
/// Exact R_t^m: the uniform average of the rows of P_t.
std::vector<double> entrance_law_exact(std::span<const double> xi, double t);

struct TvResult {
  double exact_tv = 0.0;
  double bound = 1.0;
};
TvResult coupled_pair_tv(const env::LimitEnvironment& xi, std::size_t n, std::uint32_t x,
                         std::uint32_t y, double t);

/// Smallest nonzero eigenvalue of -G, from D^{1/2} G D^{-1/2}, D = diag(mu).
double spectral_gap(std::span<const double> xi);
double spectral_gap(const env::LimitEnvironment& xi, std::size_t n);

/// Constant of the meeting bound obtained from its Markov-inequality proof
/// with the free parameter set to 1/2: 2e.
inline constexpr double kMeetingConstant = 2.0 * 2.718281828459045;

/// (c / (xi_x xi_y)) (T xi(a) + sum_{z in a} xi_z^2).
double meeting_probability_bound(std::span<const double> xi, std::uint32_t x, std::uint32_t y,
                                 const SiteSet& a, double T, double c = kMeetingConstant);

/// sup_{a in (0,1)} (1-a)^2 sum_{z <= h_a(t)} mu(z)^2 with
/// h_a(t) = max{z : mu(z) >= e^{-t/xi_1} / a}. With `as_printed` the exponent
/// sign is +t/xi_1, for which the set is empty whenever t > 0.
double meeting_probability_lower_bound(std::span<const double> xi, double t, bool as_printed = false);

/// sum_z P_t(x,z) P_t(y,z) from the matrix oracle.
double meeting_probability_exact(std::span<const double> xi, std::uint32_t x, std::uint32_t y, double t);

/// Monte Carlo probability that independent walks from x and y occupy the same
/// site of `a` at some time before T.
struct MeetingEstimate {
  double p = 0.0;
  double se = 0.0;
};
MeetingEstimate meeting_probability_estimate(std::span<const double> xi, std::uint32_t x,
                                             std::uint32_t y, const SiteSet& a, double T,
                                             std::uint64_t replicas, const StreamFamily& family,
                                             unsigned threads = 1);

/// |<P_t f, g>_mu - <f, P_t g>_mu|.
double self_adjointness_check(const env::LimitEnvironment& xi, std::size_t n, double t,
                              std::span<const double> f, std::span<const double> g);

/// delta_x e^{-t/xi_x} + int_0^t R_{t-s} (1/xi_x) e^{-s/xi_x} ds with R taken
/// from `entrance(t)` (composite Gauss-Legendre, `nodes` points per panel, panels
/// graded toward both ends). The returned se propagates the per-node standard errors.
MarginalEstimate decomposed_marginal(std::span<const double> xi, std::uint32_t x, double t,
                                     const std::function<MarginalEstimate(double)>& entrance,
                                     int nodes = 16);

/// Expected time spent outside [n] by the walk on [m] started at a site of
/// [n] before its trace on [n] has run for time t:
/// E[#excursions by trace time t] * E[excursion length].
double time_outside_expectation(std::span<const double> xi, std::size_t n, std::size_t m,
                                std::uint32_t start, double t);

/// Real time at which the trace on [0, n) of `path` has accumulated t units
/// (phi_{m,n}(t)); empty when the horizon is reached first.
std::optional<double> trace_inverse_time(const WalkPath& path, std::size_t n, double t);

/// Constant C of the entrance-law tail bound R_t^m(sites beyond n) <= C t n^{1-1/alpha}.
/// Fitted by calibrate_entrance_tail_constant on the reference environment of
/// the default master seed (alpha = 0.5, m = 512, t in {0.25, 0.5, 1, 2},
/// n in {16, 32, 64, 128}) and frozen; a unit test re-derives it.
inline constexpr double kEntranceTailConstant = 3.450592922978486;
/// Fits C over the (t, n) grid from the exact oracle: max tail / (t n^{1-1/alpha}).
double calibrate_entrance_tail_constant(std::span<const double> xi, double alpha,
                                        std::span<const double> t_grid,
                                        std::span<const std::size_t> n_grid);

}  // namespace svoter::limitwalk
