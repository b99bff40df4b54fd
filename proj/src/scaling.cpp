#include "lob/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace lob {

std::uint64_t default_burn_in(std::uint64_t events) noexcept {
  return std::max<std::uint64_t>(100'000, events / 100);
}

std::size_t batch_block(std::size_t window) noexcept { return std::max<std::size_t>(1000, 20 * (window + 1)); }

namespace {

// Stream offsets so the series, doubled-burn-in and calendar batches never share paths.
constexpr std::uint64_t kDoubledStream = 0x6a09e667f3bcc909ULL;
constexpr std::uint64_t kCalendarStream = 0xbb67ae8584caa73bULL;

struct SeriesRun {
  std::vector<double> c;    // concatenated, price units
  std::vector<double> tau;  // concatenated
  std::vector<std::size_t> offsets{0};
  std::size_t failed = 0;
  std::string first_error;
};

SeriesRun run_series(const RateModel& model, const ScalingConfig& cfg, std::uint64_t burn_in, std::uint64_t seed) {
  SimulationOptions opt;
  opt.stop.max_events = cfg.series_events;
  opt.burn_in_events = burn_in;
  opt.record_embedded = true;
  auto paths = batch_simulate(model, cfg.initial, cfg.series_paths, opt, seed, cfg.threads);
  SeriesRun out;
  const double tick = model.book().tick;
  std::size_t total = 0;
  for (const auto& p : paths) total += p.tau.size();
  out.c.reserve(total);
  out.tau.reserve(total);
  for (auto& p : paths) {
    if (!p.ok()) {
      if (out.failed++ == 0) out.first_error = p.error;
      continue;
    }
    for (auto c : p.c_ticks) out.c.push_back(tick * c);
    out.tau.insert(out.tau.end(), p.tau.begin(), p.tau.end());
    out.offsets.push_back(out.c.size());
    std::vector<double>().swap(p.tau);
    std::vector<std::int8_t>().swap(p.c_ticks);
  }
  return out;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

ScalingReport scaling_report(const RateModel& model, const ScalingConfig& cfg) {
  ScalingReport r;
  r.tick = model.book().tick;
  r.burn_in = cfg.burn_in.value_or(default_burn_in(cfg.series_events));
  if (cfg.series_paths == 0 || cfg.series_events < 20)
    throw std::invalid_argument("scaling report needs at least one series path of 20 events");

  SeriesRun s = run_series(model, cfg, r.burn_in, cfg.seed);
  if (s.failed > 0)
    r.warnings.push_back(std::to_string(s.failed) + " series path(s) stopped early: " + s.first_error);
  if (s.c.size() < 20) throw std::runtime_error("no usable series paths");
  r.series_events = s.c.size();

  r.sigma2_event = sigma2_series(s.c, cfg.lag);
  const std::size_t block = batch_block(r.sigma2_event.window);
  r.mean_c = mean_batch(s.c, block);
  r.e_tau = mean_batch(s.tau, block);
  {
    std::vector<std::span<const double>> spans;
    std::vector<double> first, second;
    for (std::size_t k = 0; k + 1 < s.offsets.size(); ++k) {
      const std::size_t a = s.offsets[k], b = s.offsets[k + 1], mid = a + (b - a) / 2;
      spans.emplace_back(s.c.data() + a, b - a);
      first.insert(first.end(), s.tau.begin() + static_cast<std::ptrdiff_t>(a),
                   s.tau.begin() + static_cast<std::ptrdiff_t>(mid));
      second.insert(second.end(), s.tau.begin() + static_cast<std::ptrdiff_t>(mid),
                    s.tau.begin() + static_cast<std::ptrdiff_t>(b));
    }
    r.sigma2_batch = batch_means_variance(spans, block);
    r.e_tau_first_half = mean_batch(first, block);
    r.e_tau_second_half = mean_batch(second, block);
  }
  r.sigma2_calendar = r.sigma2_event.sigma2 / r.e_tau.mean;
  {
    const double a = r.sigma2_event.sigma2 != 0.0 ? r.sigma2_event.se / r.sigma2_event.sigma2 : 0.0;
    const double b = r.e_tau.se / r.e_tau.mean;
    r.sigma2_calendar_se = std::abs(r.sigma2_calendar) * std::sqrt(a * a + b * b);
  }

  const double drift_z = r.mean_c.se > 0.0 ? std::abs(r.mean_c.mean) / r.mean_c.se
                                           : (r.mean_c.mean != 0.0 ? INFINITY : 0.0);
  if (drift_z > 3.0) {
    r.nonzero_drift = true;
    r.warnings.push_back("NonzeroDrift: mean price increment " + fmt(r.mean_c.mean) + " is " + fmt(drift_z) +
                         " standard errors from zero; the diffusive limit assumes zero drift");
  }
  if (r.sigma2_event.window_capped) r.warnings.push_back("lag window capped: " + r.sigma2_event.diagnostic);

  if (cfg.check_burn_in) {
    r.doubled_burn_in = 2 * r.burn_in;
    SeriesRun d = run_series(model, cfg, r.doubled_burn_in, cfg.seed ^ kDoubledStream);
    if (d.c.size() >= 20) {
      LagPolicy fixed = cfg.lag;
      fixed.adaptive = false;
      fixed.fixed_window = std::min(r.sigma2_event.window, d.c.size() / 10);
      const auto s2 = sigma2_series(d.c, fixed);
      const auto et = mean_batch(d.tau, block);
      r.sigma2_doubled = s2.sigma2;
      r.e_tau_doubled = et.mean;
      const double ds = std::abs(s2.sigma2 - r.sigma2_event.sigma2);
      const double dt = std::abs(et.mean - r.e_tau.mean);
      const double ss = std::hypot(s2.se, r.sigma2_event.se), st = std::hypot(et.se, r.e_tau.se);
      if (ds > 3.0 * ss || dt > 3.0 * st) {
        r.burn_in_sensitive = true;
        r.warnings.push_back("estimates moved by more than 3 standard errors when the burn-in was doubled");
      }
    }
  }
  // The series arrays are no longer needed; release them before the calendar batch.
  std::vector<double>().swap(s.c);
  std::vector<double>().swap(s.tau);

  if (cfg.calendar_paths == 0 || cfg.scales.empty() || cfg.times.empty()) return r;
  if (cfg.calendar_paths < 30)
    r.warnings.push_back("only " + std::to_string(cfg.calendar_paths) +
                         " calendar path(s): variance ratios and normality statistics carry wide error bars");

  std::map<double, std::size_t> horizon_index;
  for (double n : cfg.scales)
    for (double t : cfg.times) horizon_index.emplace(n * t * r.e_tau.mean, 0);
  SimulationOptions opt;
  for (auto& [T, k] : horizon_index) {
    k = opt.checkpoints.size();
    opt.checkpoints.push_back(T);
  }
  const double T_max = opt.checkpoints.back();
  opt.stop.max_time = T_max;
  const double max_events_equiv = T_max / r.e_tau.mean;
  opt.burn_in_events = cfg.burn_in.value_or(default_burn_in(static_cast<std::uint64_t>(max_events_equiv)));
  auto paths = batch_simulate(model, cfg.initial, cfg.calendar_paths, opt, cfg.seed ^ kCalendarStream, cfg.threads);

  std::vector<const PathSummary*> good;
  std::size_t failed = 0;
  for (const auto& p : paths) {
    if (p.ok() && p.checkpoint_z.size() == opt.checkpoints.size())
      good.push_back(&p);
    else
      ++failed;
  }
  if (failed > 0) r.warnings.push_back(std::to_string(failed) + " calendar path(s) stopped before the last horizon");
  if (good.size() < 2) r.warnings.push_back("fewer than two complete calendar paths: variances are undefined");

  for (double n : good.size() < 2 ? std::vector<double>{} : cfg.scales) {
    for (double t : cfg.times) {
      const double T = n * t * r.e_tau.mean;
      const std::size_t k = horizon_index.at(T);
      std::vector<double> z;
      z.reserve(good.size());
      for (const auto* p : good) z.push_back(r.tick * static_cast<double>(p->checkpoint_z[k]));
      const Moments m = sample_moments(z);
      double m4 = 0.0;
      for (double v : z) m4 += std::pow(v - m.mean, 4);
      m4 /= static_cast<double>(z.size());
      VarianceRatio vr;
      vr.n = n;
      vr.t = t;
      vr.horizon = T;
      vr.paths = z.size();
      vr.variance = m.variance;
      vr.variance_se = std::sqrt(std::max(0.0, m4 - m.variance * m.variance) / static_cast<double>(z.size()));
      const double denom = r.sigma2_calendar * T;
      vr.ratio = m.variance / denom;
      const double a = m.variance > 0.0 ? vr.variance_se / m.variance : 0.0;
      const double b = r.sigma2_calendar != 0.0 ? r.sigma2_calendar_se / r.sigma2_calendar : 0.0;
      vr.ratio_se = std::abs(vr.ratio) * std::sqrt(a * a + b * b);
      r.ratios.push_back(vr);
    }
  }

  r.terminal_horizon = T_max;
  const double scale = std::sqrt(r.sigma2_calendar * T_max);
  for (const auto* p : good)
    r.rescaled_terminal.push_back(r.tick * static_cast<double>(p->checkpoint_z.back()) / scale);
  r.terminal_moments = sample_moments(r.rescaled_terminal);
  r.terminal_ks = ks_normal_fitted(r.rescaled_terminal);
  return r;
}

}  // namespace lob
