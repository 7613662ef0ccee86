#include "svoter/limitwalk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "svoter/errors.hpp"
#include "svoter/parallel.hpp"
#include "svoter/stats.hpp"

namespace svoter::limitwalk {

namespace {

std::vector<std::uint8_t> membership(const SiteSet& a, std::size_t size) {
  std::size_t top = size;
  for (std::uint32_t x : a) top = std::max<std::size_t>(top, x + 1);
  std::vector<std::uint8_t> in(top, 0);
  for (std::uint32_t x : a) in[x] = 1;
  return in;
}

std::size_t path_extent(const WalkPath& path) {
  std::uint32_t top = 0;
  for (std::uint32_t s : path.sites) top = std::max(top, s);
  return static_cast<std::size_t>(top) + 1;
}

inline std::uint32_t next_site(std::uint32_t x, std::uint32_t n, Stream& rng, bool lazy) {
  if (lazy || n == 1) return rng.uniform_index(n);
  const std::uint32_t y = rng.uniform_index(n - 1);
  return y >= x ? y + 1 : y;
}

void check_subset(const SiteSet& a, std::size_t m) {
  for (std::uint32_t x : a) {
    if (x >= m) throw std::invalid_argument("site set exceeds the walk range");
  }
}

}  // namespace

std::uint32_t WalkPath::position_at(double t) const {
  if (t < 0.0 || t > horizon) throw std::invalid_argument("position_at: t outside [0, horizon]");
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  return sites[static_cast<std::size_t>(it - times.begin()) - 1];
}

WalkPath simulate_walk(std::span<const double> means, std::uint32_t start, double horizon,
                       Stream& rng, const WalkOptions& opts) {
  const std::size_t n = means.size();
  if (start >= n) throw std::invalid_argument("simulate_walk: start outside [n]");
  if (!(horizon >= 0.0)) throw std::invalid_argument("simulate_walk: horizon must be >= 0");
  WalkPath path;
  path.horizon = horizon;
  path.times.push_back(0.0);
  path.sites.push_back(start);
  const auto nn = static_cast<std::uint32_t>(n);
  std::uint32_t x = start;
  double t = 0.0;
  for (;;) {
    t += rng.exponential(means[x]);
    if (t > horizon) break;
    if (static_cast<double>(path.times.size()) > opts.max_events) {
      throw SizingError("simulate_walk: ring count exceeds the configured cap");
    }
    x = next_site(x, nn, rng, opts.lazy);
    path.times.push_back(t);
    path.sites.push_back(x);
  }
  return path;
}

WalkPath simulate_walk(const env::LimitEnvironment& xi, std::size_t n, std::uint32_t start,
                       double horizon, Stream& rng, const WalkOptions& opts) {
  return simulate_walk(xi.head(n), start, horizon, rng, opts);
}

std::uint32_t position_at(std::span<const double> means, std::uint32_t start, double t, Stream& rng,
                          const WalkOptions& opts) {
  const auto n = static_cast<std::uint32_t>(means.size());
  if (start >= n) throw std::invalid_argument("position_at: start outside [n]");
  std::uint32_t x = start;
  double clock = 0.0;
  double rings = 0.0;
  for (;;) {
    clock += rng.exponential(means[x]);
    if (clock > t) return x;
    if (++rings > opts.max_events) throw SizingError("position_at: ring count exceeds the configured cap");
    x = next_site(x, n, rng, opts.lazy);
  }
}

WalkPath trace(const WalkPath& path, const SiteSet& a) {
  const auto in = membership(a, path_extent(path));
  const std::size_t k_end = path.sites.size();
  std::size_t first = k_end;
  for (std::size_t k = 0; k < k_end; ++k) {
    if (in[path.sites[k]]) {
      first = k;
      break;
    }
  }
  if (first == k_end) throw NeverVisits("trace: the path never enters the set");
  WalkPath out;
  out.times.push_back(0.0);
  out.sites.push_back(path.sites[first]);
  double clock = 0.0;
  bool pending = false;
  for (std::size_t k = first; k < k_end; ++k) {
    if (!in[path.sites[k]]) continue;
    if (pending) {
      out.times.push_back(clock);
      out.sites.push_back(path.sites[k]);
      pending = false;
    }
    const double end = k + 1 < k_end ? path.times[k + 1] : path.horizon;
    clock += end - path.times[k];
    pending = k + 1 < k_end;
  }
  out.horizon = clock;
  return out;
}

std::vector<std::pair<std::uint32_t, double>> holding_times(const WalkPath& path) {
  std::vector<std::pair<std::uint32_t, double>> out;
  out.reserve(path.jump_count());
  for (std::size_t k = 0; k + 1 < path.times.size(); ++k) {
    out.emplace_back(path.sites[k], path.times[k + 1] - path.times[k]);
  }
  return out;
}

std::vector<double> ExcursionStats::complete_incursions() const {
  std::vector<double> v = incursions;
  if (last_censored && last_inside && !v.empty()) v.pop_back();
  return v;
}

std::vector<double> ExcursionStats::complete_excursions() const {
  std::vector<double> v = excursions;
  if (last_censored && !last_inside && !v.empty()) v.pop_back();
  return v;
}

ExcursionStats excursion_stats(const WalkPath& path, const SiteSet& a) {
  const auto in = membership(a, path_extent(path));
  // Maximal stretches of constant membership.
  std::vector<std::pair<bool, double>> stretches;
  bool cur = in[path.sites[0]] != 0;
  double begin = 0.0;
  for (std::size_t k = 1; k < path.sites.size(); ++k) {
    const bool now = in[path.sites[k]] != 0;
    if (now != cur) {
      stretches.emplace_back(cur, path.times[k] - begin);
      begin = path.times[k];
      cur = now;
    }
  }
  stretches.emplace_back(cur, path.horizon - begin);

  ExcursionStats st;
  st.last_censored = true;
  st.last_inside = cur;
  std::size_t k = 0;
  if (!stretches[0].first) {
    if (stretches.size() == 1) return st;  // never enters: no first hit
    st.first_hit = stretches[0].second;
    k = 1;
  } else {
    st.first_hit = 0.0;
  }
  for (; k < stretches.size(); ++k) {
    (stretches[k].first ? st.incursions : st.excursions).push_back(stretches[k].second);
  }
  return st;
}

double incursion_mean_formula(std::span<const double> xi, const SiteSet& a, std::size_t m) {
  if (a.empty() || a.size() >= m) throw std::invalid_argument("incursion_mean_formula: need 0 < |a| < m");
  check_subset(a, std::min(m, xi.size()));
  double s = 0.0;
  for (std::uint32_t x : a) s += xi[x];
  const double md = static_cast<double>(m), ad = static_cast<double>(a.size());
  return md / (md - ad) * s / ad;
}

double incursion_laplace(std::span<const double> xi, const SiteSet& a, std::size_t m, double lambda) {
  if (a.empty() || a.size() >= m) throw std::invalid_argument("incursion_laplace: need 0 < |a| < m");
  check_subset(a, std::min(m, xi.size()));
  double s = 0.0;
  for (std::uint32_t x : a) {
    const double d = 1.0 + lambda * xi[x];
    if (std::fabs(d) < 1e-12) throw PoleError("incursion_laplace: lambda too close to -1/xi_x");
    s += 1.0 / d;
  }
  const double md = static_cast<double>(m), ad = static_cast<double>(a.size());
  return (md - ad) * (s / ad) / (md - s);
}

double excursion_mean_formula(std::span<const double> xi, std::size_t n, std::size_t m) {
  if (n == 0 || n >= m || m > xi.size()) throw std::invalid_argument("excursion_mean_formula: need 0 < n < m <= depth");
  double s = 0.0;
  for (std::size_t x = n; x < m; ++x) s += xi[x];
  const double md = static_cast<double>(m), nd = static_cast<double>(n);
  return md / (nd * (md - nd)) * s;
}

double tail_mass_estimate(const env::LimitEnvironment& xi) {
  const double d = static_cast<double>(xi.depth);
  return xi.xi.back() * d / (1.0 / xi.alpha - 1.0);
}

CharacteristicValue excursion_cf_limit(const env::LimitEnvironment& xi, std::uint32_t y, double lambda) {
  using C = std::complex<double>;
  const C i(0.0, 1.0);
  C sum = 0.0;
  for (std::size_t x = 0; x < xi.depth; ++x) {
    if (x == y) continue;
    const C z = i * lambda * xi.xi[x];
    sum += z / (1.0 - z);
  }
  CharacteristicValue out;
  out.value = 1.0 / (1.0 - sum);
  out.tail_remainder = std::fabs(lambda) * tail_mass_estimate(xi);
  return out;
}

MarginalEstimate marginal_estimate(std::span<const double> means, std::int64_t start, double t,
                                   std::uint64_t replicas, const StreamFamily& family,
                                   unsigned threads) {
  const std::size_t m = means.size();
  if (m == 0) throw std::invalid_argument("marginal_estimate: empty range");
  if (start >= static_cast<std::int64_t>(m)) throw std::invalid_argument("marginal_estimate: start outside range");
  if (replicas < 1) throw std::invalid_argument("marginal_estimate: replicas must be >= 1");
  if (!(t >= 0.0)) throw std::invalid_argument("marginal_estimate: t must be >= 0");
  const auto sites = parallel_map(replicas, threads, [&](std::size_t r) {
    Stream rng = family.at(r);
    const auto x0 = start < 0 ? rng.uniform_index(static_cast<std::uint32_t>(m))
                              : static_cast<std::uint32_t>(start);
    return position_at(means, x0, t, rng);
  });
  std::vector<std::uint64_t> counts(m, 0);
  for (std::uint32_t s : sites) ++counts[s];
  MarginalEstimate est;
  est.replicas = replicas;
  est.p.resize(m);
  est.se.resize(m);
  for (std::size_t y = 0; y < m; ++y) {
    const auto b = stats::binomial(counts[y], replicas);
    est.p[y] = b.mean;
    est.se[y] = b.se;
  }
  return est;
}

MarginalEstimate entrance_law_estimate(const env::LimitEnvironment& xi, std::size_t m, double t,
                                       std::uint64_t replicas, const StreamFamily& family,
                                       unsigned threads) {
  if (!(t > 0.0)) throw std::invalid_argument("entrance_law_estimate: t must be > 0");
  return marginal_estimate(xi.head(m), -1, t, replicas, family, threads);
}

std::vector<double> stationary_distribution(std::span<const double> xi) {
  if (xi.empty()) throw std::invalid_argument("stationary_distribution: empty range");
  const double total = stats::pairwise_sum(xi);
  std::vector<double> mu(xi.size());
  for (std::size_t x = 0; x < xi.size(); ++x) mu[x] = xi[x] / total;
  return mu;
}

std::vector<double> stationary_distribution(const env::LimitEnvironment& xi, std::size_t n) {
  return stationary_distribution(xi.head(n));
}

MeetingEstimate meeting_probability_estimate(std::span<const double> xi, std::uint32_t x,
                                             std::uint32_t y, const SiteSet& a, double T,
                                             std::uint64_t replicas, const StreamFamily& family,
                                             unsigned threads) {
  const auto n = static_cast<std::uint32_t>(xi.size());
  if (x >= n || y >= n || x == y) throw std::invalid_argument("meeting estimate: need distinct starts in range");
  check_subset(a, n);
  const auto in = membership(a, n);
  const auto met = parallel_map(replicas, threads, [&](std::size_t r) -> std::uint8_t {
    Stream rng = family.at(r);
    std::uint32_t px = x, py = y;
    double tx = rng.exponential(xi[px]);
    double ty = rng.exponential(xi[py]);
    for (;;) {
      const double now = std::min(tx, ty);
      if (now > T) return 0;
      if (tx <= ty) {
        px = rng.uniform_index(n);
        tx = now + rng.exponential(xi[px]);
      } else {
        py = rng.uniform_index(n);
        ty = now + rng.exponential(xi[py]);
      }
      if (px == py && in[px]) return 1;
    }
  });
  std::uint64_t k = 0;
  for (auto b : met) k += b;
  const auto b = stats::binomial(k, replicas);
  return {b.mean, b.se};
}

MarginalEstimate decomposed_marginal(std::span<const double> xi, std::uint32_t x, double t,
                                     const std::function<MarginalEstimate(double)>& entrance,
                                     int nodes) {
  if (nodes != 8 && nodes != 16 && nodes != 32) throw std::invalid_argument("decomposed_marginal: nodes must be 8, 16 or 32");
  const std::size_t n = xi.size();
  if (x >= n) throw std::invalid_argument("decomposed_marginal: start outside range");
  MarginalEstimate out;
  out.p.assign(n, 0.0);
  out.se.assign(n, 0.0);
  out.p[x] += std::exp(-t / xi[x]);
  if (t == 0.0) return out;

  // The integrand (1/xi_x) e^{-s/xi_x} R_{t-s} has boundary layers of width
  // xi_x at s = 0 and min xi at s = t; panels are graded geometrically
  // toward both ends. Beyond 40 xi_x the first-ring density is below e^{-40}.
  const double fast = *std::min_element(xi.begin(), xi.end());
  std::vector<double> cuts{0.0, t};
  for (double h = 0.25 * xi[x]; h < t && h <= 40.0 * xi[x]; h *= 2.0) cuts.push_back(h);
  for (double h = 0.25 * fast; h < t; h *= 2.0) cuts.push_back(t - h);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [&](double a, double b) { return b - a <= 1e-12 * t; }),
             cuts.end());
  cuts.back() = t;

  std::vector<double> var(n, 0.0);
  auto node = [&](double s, double w) {
    const double density = std::exp(-s / xi[x]) / xi[x];
    const MarginalEstimate r = entrance(std::max(0.0, t - s));
    const double c = w * density;
    for (std::size_t y = 0; y < n; ++y) {
      out.p[y] += c * r.p[y];
      var[y] += c * c * r.se[y] * r.se[y];
    }
    out.replicas += r.replicas;
  };
  auto panel = [&](double a, double b, auto abscissa, auto weights) {
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t k = 0; k < abscissa.size(); ++k) {
      node(mid + half * abscissa[k], half * weights[k]);
      if (abscissa[k] != 0.0) node(mid - half * abscissa[k], half * weights[k]);
    }
  };
  using boost::math::quadrature::gauss;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (nodes == 8) panel(a, b, gauss<double, 8>::abscissa(), gauss<double, 8>::weights());
    if (nodes == 16) panel(a, b, gauss<double, 16>::abscissa(), gauss<double, 16>::weights());
    if (nodes == 32) panel(a, b, gauss<double, 32>::abscissa(), gauss<double, 32>::weights());
  }
  for (std::size_t y = 0; y < n; ++y) out.se[y] = std::sqrt(var[y]);
  return out;
}

std::optional<double> trace_inverse_time(const WalkPath& path, std::size_t n, double t) {
  double acc = 0.0;
  for (std::size_t k = 0; k < path.sites.size(); ++k) {
    const double end = k + 1 < path.sites.size() ? path.times[k + 1] : path.horizon;
    if (path.sites[k] < n) {
      const double len = end - path.times[k];
      if (acc + len >= t) return path.times[k] + (t - acc);
      acc += len;
    }
  }
  return std::nullopt;
}

}  // namespace svoter::limitwalk
