#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lob {

struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

/// Sample mean with the i.i.d. standard error.
MeanEstimate mean_iid(std::span<const double> x);

/// Sample mean with a batch-means standard error (contiguous blocks of `block`
/// values; the remainder is dropped from the error estimate only).
MeanEstimate mean_batch(std::span<const double> x, std::size_t block);

/// Empirical autocovariances gamma(0..max_lag), mean-centred, divided by n.
std::vector<double> autocovariance(std::span<const double> x, std::size_t max_lag);

enum class LagKernel { Flat, Bartlett };
const char* to_string(LagKernel k) noexcept;

struct LagPolicy {
  /// Choose M from the data; otherwise use `fixed_window`.
  bool adaptive = true;
  std::size_t fixed_window = 0;
  LagKernel kernel = LagKernel::Flat;
  /// Adaptive rule: M is the first lag opening a run of this many lags
  /// whose autocovariance is within two Bartlett standard errors of zero.
  std::size_t quiet_run = 5;
};

struct Sigma2Estimate {
  double sigma2 = 0.0;
  double se = 0.0;
  std::size_t window = 0;
  std::size_t n = 0;
  LagKernel kernel = LagKernel::Flat;
  /// gamma(0..window), plus the quiet lags inspected by the adaptive rule.
  std::vector<double> autocov;
  /// Least-squares fit log|gamma(k)| ~ a - rate * k over 1..window (when window >= 2).
  double decay_rate = 0.0;
  double decay_r2 = 0.0;
  bool window_capped = false;
  std::string diagnostic;
};

/// gamma(0) + 2 sum_{k=1}^{M} w_k gamma(k) with w_k = 1 (flat) or 1 - k/(M+1)
/// (Bartlett). Throws WindowTooLarge when a fixed M exceeds n/10.
Sigma2Estimate sigma2_series(std::span<const double> c, const LagPolicy& policy = {});

/// Long-run variance by non-overlapping batch means, pooled over independent
/// series: mean over blocks of (S_b - b * mean)^2 / b.
struct BatchVariance {
  double value = 0.0;
  double se = 0.0;
  std::size_t blocks = 0;
  std::size_t block = 0;
};
BatchVariance batch_means_variance(const std::vector<std::span<const double>>& series, std::size_t block);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  std::size_t n = 0;
};
Moments sample_moments(std::span<const double> x);

/// Asymptotic Kolmogorov tail with the Stephens small-sample correction.
double kolmogorov_pvalue(double d, std::size_t n);

struct KsResult {
  double statistic = 0.0;
  double pvalue = 1.0;
};
/// One-sample KS test against Exp(rate).
KsResult ks_exponential(std::vector<double> x, double rate);
/// KS distance to the normal law with the sample mean and deviation. The
/// p-value ignores the fitted parameters and is therefore conservative.
KsResult ks_normal_fitted(std::vector<double> x);

struct ChiSquareResult {
  double statistic = 0.0;
  double dof = 0.0;
  double pvalue = 1.0;
  std::size_t cells = 0;
};

/// Pearson goodness of fit. Cells with expected count below `min_expected`
/// are pooled (in order) until each pooled cell reaches it; a leftover pool is
/// merged into the last emitted cell. `constraints` is subtracted from the
/// cell count for the degrees of freedom.
ChiSquareResult chi_square_gof(const std::vector<double>& observed, const std::vector<double>& expected,
                               double min_expected = 5.0, std::size_t constraints = 1);

}  // namespace lob
