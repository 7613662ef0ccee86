#include "svoter/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace svoter::stats {

double pairwise_sum(std::span<const double> xs) noexcept {
  if (xs.size() <= 16) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

MeanSe mean_se(std::span<const double> xs) {
  MeanSe r;
  r.n = xs.size();
  if (r.n == 0) return r;
  r.mean = pairwise_sum(xs) / static_cast<double>(r.n);
  if (r.n < 2) return r;
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - r.mean) * (xs[i] - r.mean);
  const double var = pairwise_sum(sq) / static_cast<double>(r.n - 1);
  r.sd = std::sqrt(var);
  r.se = r.sd / std::sqrt(static_cast<double>(r.n));
  return r;
}

MeanSe binomial(std::uint64_t successes, std::uint64_t trials) {
  MeanSe r;
  r.n = trials;
  if (trials == 0) return r;
  const double p = static_cast<double>(successes) / static_cast<double>(trials);
  r.mean = p;
  r.sd = std::sqrt(p * (1.0 - p));
  r.se = r.sd / std::sqrt(static_cast<double>(trials));
  return r;
}

MeanSe batch_means(std::span<const double> xs, std::size_t batches) {
  if (batches < 2 || xs.size() < batches) throw std::invalid_argument("batch_means: too few points");
  const std::size_t len = xs.size() / batches;
  std::vector<double> avg(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    avg[b] = pairwise_sum(xs.subspan(b * len, len)) / static_cast<double>(len);
  }
  MeanSe r = mean_se(avg);
  r.n = xs.size();
  return r;
}

double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 1.18) {
    // Small-x series: P(K <= x) = sqrt(2 pi)/x sum exp(-(2k-1)^2 pi^2 / (8 x^2)).
    const double pi2 = M_PI * M_PI;
    double s = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double j = 2.0 * k - 1.0;
      s += std::exp(-j * j * pi2 / (8.0 * x * x));
    }
    return 1.0 - std::sqrt(2.0 * M_PI) / x * s;
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult ks_from_sorted_cdf(std::span<const double> f) {
  KsResult r;
  r.n = f.size();
  if (r.n == 0) return r;
  const double n = static_cast<double>(r.n);
  double d = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    d = std::max(d, static_cast<double>(i + 1) / n - f[i]);
    d = std::max(d, f[i] - static_cast<double>(i) / n);
  }
  r.statistic = d;
  // Stephens' finite-sample correction of the asymptotic law.
  const double sn = std::sqrt(n);
  r.p_value = kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
  return r;
}

double ks_critical(std::size_t n, double significance) {
  double lo = 0.0, hi = 5.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_sf(mid) > significance ? lo : hi) = mid;
  }
  const double sn = std::sqrt(static_cast<double>(n));
  return hi / (sn + 0.12 + 0.11 / sn);
}

ChiSquareResult chi_square(std::span<const double> observed, std::span<const double> expected,
                           double min_expected) {
  if (observed.size() != expected.size() || observed.empty()) {
    throw std::invalid_argument("chi_square: size mismatch");
  }
  std::vector<double> o, e;
  double acc_o = 0.0, acc_e = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    acc_o += observed[i];
    acc_e += expected[i];
    if (acc_e >= min_expected) {
      o.push_back(acc_o);
      e.push_back(acc_e);
      acc_o = acc_e = 0.0;
    }
  }
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (e.empty()) {
      o.push_back(acc_o);
      e.push_back(acc_e);
    } else {
      o.back() += acc_o;
      e.back() += acc_e;
    }
  }
  ChiSquareResult r;
  for (std::size_t i = 0; i < o.size(); ++i) r.statistic += (o[i] - e[i]) * (o[i] - e[i]) / e[i];
  r.dof = static_cast<double>(o.size()) - 1.0;
  if (r.dof < 1.0) {
    r.p_value = 1.0;
    return r;
  }
  boost::math::chi_squared dist(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

Fit linear_fit(std::span<const double> x, std::span<const double> y,
               std::span<const double> y_se) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n || (!y_se.empty() && y_se.size() != n)) {
    throw std::invalid_argument("linear_fit: need >= 2 matched points");
  }
  std::vector<double> w(n, 1.0);
  if (!y_se.empty()) {
    for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / (y_se[i] * y_se[i]);
  }
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double xb = sx / sw, yb = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (x[i] - xb) * (x[i] - xb);
    sxy += w[i] * (x[i] - xb) * (y[i] - yb);
  }
  Fit f;
  f.slope = sxy / sxx;
  f.intercept = yb - f.slope * xb;
  double q = 0.0;
  if (!y_se.empty()) {
    f.slope_se = std::sqrt(1.0 / sxx);
    q = boost::math::quantile(boost::math::normal_distribution<>(), 0.975);
  } else {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    if (n > 2) {
      f.slope_se = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
      q = boost::math::quantile(boost::math::students_t(static_cast<double>(n - 2)), 0.975);
    }
  }
  f.ci_low = f.slope - q * f.slope_se;
  f.ci_high = f.slope + q * f.slope_se;
  return f;
}

double z_score(double value, double target, double se) noexcept {
  if (se > 0.0) return (value - target) / se;
  if (value == target) return 0.0;
  return value > target ? std::numeric_limits<double>::infinity()
                        : -std::numeric_limits<double>::infinity();
}

}  // namespace svoter::stats
