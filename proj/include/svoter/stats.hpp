#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace svoter::stats {

/// Pairwise (cascade) summation; the result depends only on the order of xs.
double pairwise_sum(std::span<const double> xs) noexcept;

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  ///< standard error of the mean (sample sd / sqrt(n))
  double sd = 0.0;
  std::size_t n = 0;
};

MeanSe mean_se(std::span<const double> xs);

/// Proportion k/n with binomial standard error sqrt(p(1-p)/n).
MeanSe binomial(std::uint64_t successes, std::uint64_t trials);

/// Batch-means estimate for a correlated series: mean of xs and the standard
/// error from `batches` contiguous batch averages.
MeanSe batch_means(std::span<const double> xs, std::size_t batches);

/// Asymptotic Kolmogorov survival function P(K > x), K the Kolmogorov law.
double kolmogorov_sf(double x);

struct KsResult {
  double statistic = 0.0;  ///< sup |F_n - F|
  double p_value = 1.0;
  std::size_t n = 0;
};

/// One-sample KS test; `cdf` is evaluated on the sorted sample.
template <class Cdf>
KsResult ks_test(std::vector<double> sample, Cdf&& cdf);

/// KS statistic from a sorted sample and the model CDF values at its points.
KsResult ks_from_sorted_cdf(std::span<const double> cdf_at_sorted);

/// Critical value of sqrt(n)*D at the given significance (asymptotic law,
/// with the Stephens small-sample correction applied by the caller via n).
double ks_critical(std::size_t n, double significance);

struct ChiSquareResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};

/// Pearson chi-square goodness of fit. Adjacent cells with expected count
/// below `min_expected` are pooled before the test.
ChiSquareResult chi_square(std::span<const double> observed, std::span<const double> expected,
                           double min_expected = 5.0);

struct Fit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double ci_low = 0.0;   ///< 95% interval on the slope (Student t)
  double ci_high = 0.0;
};

/// Weighted least squares of y on x. With `y_se` the points are weighted by
/// 1/se^2 and the slope error is the propagated one; without it, ordinary
/// least squares with the residual-based error.
Fit linear_fit(std::span<const double> x, std::span<const double> y,
               std::span<const double> y_se = {});

/// z-score (value - target) / se, with se == 0 mapped to 0 when equal and
/// to +-inf otherwise.
double z_score(double value, double target, double se) noexcept;

// ---- implementation of the template ----
template <class Cdf>
KsResult ks_test(std::vector<double> sample, Cdf&& cdf) {
  std::sort(sample.begin(), sample.end());
  std::vector<double> f(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) f[i] = cdf(sample[i]);
  return ks_from_sorted_cdf(f);
}

}  // namespace svoter::stats
