#include "lob/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "lob/errors.hpp"

namespace lob {

MeanEstimate mean_iid(std::span<const double> x) {
  MeanEstimate m;
  m.n = x.size();
  if (x.empty()) return m;
  m.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  if (x.size() < 2) return m;
  double ss = 0.0;
  for (double v : x) ss += (v - m.mean) * (v - m.mean);
  const auto n = static_cast<double>(x.size());
  m.se = std::sqrt(ss / (n - 1.0) / n);
  return m;
}

MeanEstimate mean_batch(std::span<const double> x, std::size_t block) {
  MeanEstimate m;
  m.n = x.size();
  if (x.empty()) return m;
  m.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  block = std::max<std::size_t>(block, 1);
  const std::size_t nb = x.size() / block;
  if (nb < 2) return m;
  std::vector<double> means(nb);
  for (std::size_t b = 0; b < nb; ++b)
    means[b] = std::accumulate(x.begin() + static_cast<std::ptrdiff_t>(b * block),
                               x.begin() + static_cast<std::ptrdiff_t>((b + 1) * block), 0.0) /
               static_cast<double>(block);
  m.se = mean_iid(means).se;
  return m;
}

namespace {

double lag_product(std::span<const double> x, double mean, std::size_t k) {
  double s = 0.0;
  const std::size_t n = x.size();
  for (std::size_t t = 0; t + k < n; ++t) s += (x[t] - mean) * (x[t + k] - mean);
  return s / static_cast<double>(n);
}

}  // namespace

std::vector<double> autocovariance(std::span<const double> x, std::size_t max_lag) {
  std::vector<double> g;
  if (x.empty()) return g;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  max_lag = std::min(max_lag, x.size() - 1);
  g.reserve(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) g.push_back(lag_product(x, mean, k));
  return g;
}

const char* to_string(LagKernel k) noexcept { return k == LagKernel::Flat ? "flat" : "bartlett"; }

Sigma2Estimate sigma2_series(std::span<const double> c, const LagPolicy& policy) {
  Sigma2Estimate out;
  out.n = c.size();
  out.kernel = policy.kernel;
  if (c.size() < 2) throw std::invalid_argument("sigma2_series needs at least two samples");
  const std::size_t cap = c.size() / 10;
  const double mean = std::accumulate(c.begin(), c.end(), 0.0) / static_cast<double>(c.size());
  const auto n = static_cast<double>(c.size());

  if (!policy.adaptive) {
    if (policy.fixed_window > cap) {
      std::ostringstream os;
      os << "lag window " << policy.fixed_window << " exceeds n/10 = " << cap;
      throw WindowTooLarge(os.str());
    }
    out.window = policy.fixed_window;
    for (std::size_t k = 0; k <= out.window; ++k) out.autocov.push_back(lag_product(c, mean, k));
  } else {
    // Bartlett standard error of gamma(k): gamma(0) sqrt((1 + 2 sum_{j<k} rho_j^2) / n).
    out.autocov.push_back(lag_product(c, mean, 0));
    const double g0 = out.autocov[0];
    double rho_sq_sum = 0.0;
    std::size_t quiet = 0;
    std::size_t k = 1;
    bool found = false;
    for (; k <= cap; ++k) {
      const double gk = lag_product(c, mean, k);
      out.autocov.push_back(gk);
      const double se = g0 * std::sqrt((1.0 + 2.0 * rho_sq_sum) / n);
      quiet = std::abs(gk) < 2.0 * se ? quiet + 1 : 0;
      if (g0 > 0.0) rho_sq_sum += (gk / g0) * (gk / g0);
      if (quiet >= policy.quiet_run) {
        found = true;
        break;
      }
    }
    if (found) {
      out.window = k + 1 - policy.quiet_run;
    } else {
      out.window = std::min(cap, out.autocov.size() - 1);
      out.window_capped = true;
    }
  }

  const std::size_t M = out.window;
  double s = out.autocov[0];
  for (std::size_t k = 1; k <= M; ++k) {
    const double w = policy.kernel == LagKernel::Flat ? 1.0 : 1.0 - static_cast<double>(k) / static_cast<double>(M + 1);
    s += 2.0 * w * out.autocov[k];
  }
  out.sigma2 = s;
  // Large-sample variance of a lag-window estimator: about 2 (2M + 1) sigma^4 / n for the flat window.
  out.se = std::abs(s) * std::sqrt(2.0 * (2.0 * static_cast<double>(M) + 1.0) / n);

  if (M >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    std::size_t m = 0;
    for (std::size_t k = 1; k <= M; ++k) {
      const double a = std::abs(out.autocov[k]);
      if (!(a > 0.0)) continue;
      const double x = static_cast<double>(k), y = std::log(a);
      sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
      ++m;
    }
    if (m >= 2) {
      const double md = static_cast<double>(m);
      const double vx = sxx - sx * sx / md, vy = syy - sy * sy / md, cxy = sxy - sx * sy / md;
      if (vx > 0.0) {
        out.decay_rate = -cxy / vx;
        out.decay_r2 = vy > 0.0 ? cxy * cxy / (vx * vy) : 1.0;
      }
    }
  }
  std::ostringstream os;
  if (out.window_capped)
    os << "autocovariances never settled within two standard errors; window capped at n/10 = " << M;
  else if (M < 2)
    os << "no autocorrelation beyond lag " << M << " distinguishable from zero";
  else
    os << "|gamma(k)| decays at rate " << out.decay_rate << " per lag (R^2 = " << out.decay_r2 << ") up to M = " << M;
  out.diagnostic = os.str();
  return out;
}

BatchVariance batch_means_variance(const std::vector<std::span<const double>>& series, std::size_t block) {
  BatchVariance out;
  block = std::max<std::size_t>(block, 1);
  out.block = block;
  double sum = 0.0;
  std::size_t n = 0;
  for (auto s : series) {
    sum += std::accumulate(s.begin(), s.end(), 0.0);
    n += s.size();
  }
  if (n == 0) return out;
  const double mean = sum / static_cast<double>(n);
  std::vector<double> terms;
  for (auto s : series) {
    const std::size_t nb = s.size() / block;
    for (std::size_t b = 0; b < nb; ++b) {
      double S = 0.0;
      for (std::size_t t = b * block; t < (b + 1) * block; ++t) S += s[t];
      const double dev = S - static_cast<double>(block) * mean;
      terms.push_back(dev * dev / static_cast<double>(block));
    }
  }
  out.blocks = terms.size();
  if (terms.empty()) return out;
  const auto m = mean_iid(terms);
  // The global mean costs one degree of freedom across all blocks.
  const double nb = static_cast<double>(terms.size());
  out.value = nb > 1.0 ? m.mean * nb / (nb - 1.0) : m.mean;
  out.se = m.se;
  return out;
}

Moments sample_moments(std::span<const double> x) {
  Moments m;
  m.n = x.size();
  if (x.empty()) return m;
  const auto n = static_cast<double>(x.size());
  m.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : x) {
    const double d = v - m.mean, d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.variance = x.size() > 1 ? m2 * n / (n - 1.0) : 0.0;
  if (m2 > 0.0) {
    m.skewness = m3 / std::pow(m2, 1.5);
    m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return m;
}

double kolmogorov_pvalue(double d, std::size_t n) {
  if (n == 0) return 1.0;
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

namespace {

template <class Cdf>
double ks_statistic(std::vector<double>& x, Cdf cdf) {
  std::sort(x.begin(), x.end());
  const auto n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double F = cdf(x[k]);
    d = std::max({d, static_cast<double>(k + 1) / n - F, F - static_cast<double>(k) / n});
  }
  return d;
}

}  // namespace

KsResult ks_exponential(std::vector<double> x, double rate) {
  KsResult r;
  if (x.empty()) return r;
  const std::size_t n = x.size();
  r.statistic = ks_statistic(x, [rate](double v) { return v <= 0.0 ? 0.0 : -std::expm1(-rate * v); });
  r.pvalue = kolmogorov_pvalue(r.statistic, n);
  return r;
}

KsResult ks_normal_fitted(std::vector<double> x) {
  KsResult r;
  if (x.size() < 2) return r;
  const auto m = sample_moments(x);
  const double sd = std::sqrt(m.variance);
  if (!(sd > 0.0)) {
    r.statistic = 1.0;
    r.pvalue = 0.0;
    return r;
  }
  const boost::math::normal_distribution<double> N(m.mean, sd);
  const std::size_t n = x.size();
  r.statistic = ks_statistic(x, [&](double v) { return boost::math::cdf(N, v); });
  r.pvalue = kolmogorov_pvalue(r.statistic, n);
  return r;
}

ChiSquareResult chi_square_gof(const std::vector<double>& observed, const std::vector<double>& expected,
                               double min_expected, std::size_t constraints) {
  if (observed.size() != expected.size()) throw std::invalid_argument("observed and expected sizes differ");
  std::vector<std::pair<double, double>> cells;
  double po = 0.0, pe = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    po += observed[k];
    pe += expected[k];
    if (pe >= min_expected) {
      cells.emplace_back(po, pe);
      po = pe = 0.0;
    }
  }
  if (pe > 0.0 || po > 0.0) {
    if (cells.empty())
      cells.emplace_back(po, pe);
    else {
      cells.back().first += po;
      cells.back().second += pe;
    }
  }
  ChiSquareResult r;
  r.cells = cells.size();
  for (const auto& [o, e] : cells) {
    if (e > 0.0)
      r.statistic += (o - e) * (o - e) / e;
    else if (o > 0.0)
      r.statistic = std::numeric_limits<double>::infinity();
  }
  r.dof = static_cast<double>(cells.size()) - static_cast<double>(constraints);
  if (r.dof < 1.0) {
    r.pvalue = 1.0;
    return r;
  }
  if (!std::isfinite(r.statistic)) {
    r.pvalue = 0.0;
    return r;
  }
  const boost::math::chi_squared_distribution<double> chi(r.dof);
  r.pvalue = boost::math::cdf(boost::math::complement(chi, r.statistic));
  return r;
}

}  // namespace lob
