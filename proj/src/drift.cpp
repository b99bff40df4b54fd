#include "lob/drift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace lob {

namespace {

/// z^(|x| - U) with a table for small |x|.
class PowerTable {
 public:
  PowerTable(double z, double U, QueueSize table_max) : z_(z), U_(U) {
    table_.resize(static_cast<std::size_t>(table_max + 1));
    for (QueueSize x = 0; x <= table_max; ++x)
      table_[static_cast<std::size_t>(x)] = std::pow(z, static_cast<double>(x) - U);
  }
  double operator()(QueueSize x) const {
    const QueueSize a = x < 0 ? -x : x;
    if (a < static_cast<QueueSize>(table_.size())) return table_[static_cast<std::size_t>(a)];
    return std::pow(z_, static_cast<double>(a) - U_);
  }
  double V(const OrderBookState& q) const {
    double s = 0.0;
    for (QueueSize x : q.slots()) s += (*this)(x);
    return s;
  }

 private:
  double z_;
  double U_;
  std::vector<double> table_;
};

void check_radius(const RateModel& model, double z) {
  if (!(z > 1.0)) throw std::invalid_argument("Lyapunov base z must exceed 1");
  if (z > model.size_radius()) {
    std::ostringstream os;
    os << "z = " << z << " exceeds the jump-size radius " << model.size_radius();
    throw RadiusExceeded(os.str());
  }
}

struct PureDrift {
  double sum = 0.0;    // sum of rate * (V(q') - V(q))
  double total = 0.0;  // sum of pure-jump rates
};

PureDrift pure_drift(const RateModel& model, const BookView& v, const PowerTable& pw,
                     std::vector<Transition>& buf) {
  buf.clear();
  enumerate_transitions(model, v, buf, false);
  PureDrift d;
  for (const auto& tr : buf) {
    const QueueSize before = v.q[tr.event.index];
    const QueueSize after = tr.event.kind == EventKind::Increase ? before + tr.event.size : before - tr.event.size;
    d.sum += tr.rate * (pw(after) - pw(before));
    d.total += tr.rate;
  }
  return d;
}

struct ArgMax {
  double value = -std::numeric_limits<double>::infinity();
  OrderBookState state;
  double aux = 0.0;
  bool set = false;

  void offer(double v, const OrderBookState& q, double a) {
    if (!set || v > value) {
      value = v;
      state = q;
      aux = a;
      set = true;
    }
  }
  void merge(const ArgMax& o) {
    if (o.set) offer(o.value, o.state, o.aux);
  }
};

/// Fits QV <= -gamma V + B on a scan for a drift evaluator `eval(q, buf) -> (V, drift)`.
template <class Eval>
void fit_certificate(DriftCertificate& cert, const StateScan& scan, unsigned threads, Eval eval) {
  // Pass 1: V values for the core quantile.
  std::vector<std::vector<double>> parts(scan.chunk_count());
  parallel_for(parts.size(), threads, [&](std::size_t c) {
    std::vector<Transition> buf;
    scan.for_each_in_chunk(c, [&](const OrderBookState& q) { parts[c].push_back(eval(q, buf).first); });
  });
  std::vector<double> values;
  for (auto& p : parts) {
    values.insert(values.end(), p.begin(), p.end());
    std::vector<double>().swap(p);
  }
  if (values.empty()) throw EmptyScan("scan contains no states: " + scan.describe());
  cert.scanned_states = values.size();
  const auto qi = static_cast<std::size_t>(std::floor(0.9 * static_cast<double>(values.size() - 1)));
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(qi), values.end());
  const double threshold = values[qi];
  std::vector<double>().swap(values);
  cert.core_threshold = threshold;

  // Pass 2: offset on the core, worst tail drift.
  struct CoreAcc {
    double core_max = -std::numeric_limits<double>::infinity();
    std::uint64_t tail = 0;
    ArgMax tail_drift;
  };
  const CoreAcc core = scan_reduce(
      scan, threads, CoreAcc{},
      [&](CoreAcc& a, const OrderBookState& q) {
        thread_local std::vector<Transition> buf;
        const auto [V, D] = eval(q, buf);
        if (V <= threshold) {
          a.core_max = std::max(a.core_max, D);
        } else {
          ++a.tail;
          a.tail_drift.offer(D, q, D);
        }
      },
      [](CoreAcc& a, const CoreAcc& b) {
        a.core_max = std::max(a.core_max, b.core_max);
        a.tail += b.tail;
        a.tail_drift.merge(b.tail_drift);
      });
  const double B_cap = std::max(0.0, core.core_max);

  // Pass 3: largest gamma with D <= B_cap - gamma V on the tail.
  double gamma = 0.0;
  if (core.tail > 0) {
    gamma = scan_reduce(
        scan, threads, std::numeric_limits<double>::infinity(),
        [&](double& g, const OrderBookState& q) {
          thread_local std::vector<Transition> buf;
          const auto [V, D] = eval(q, buf);
          if (V > threshold) g = std::min(g, (B_cap - D) / V);
        },
        [](double& a, double b) { a = std::min(a, b); });
  }
  cert.gamma_hat = gamma;

  // Pass 4: smallest B for that gamma over the whole scan.
  const ArgMax worst = scan_reduce(
      scan, threads, ArgMax{},
      [&](ArgMax& a, const OrderBookState& q) {
        thread_local std::vector<Transition> buf;
        const auto [V, D] = eval(q, buf);
        a.offer(D + gamma * V, q, D);
      },
      [](ArgMax& a, const ArgMax& b) { a.merge(b); });
  cert.B_hat = worst.value + 1e-12 * std::max(1.0, std::abs(worst.value));
  cert.worst_state = worst.state;
  cert.worst_drift = worst.aux;

  if (core.tail == 0) {
    cert.violated = true;
    cert.reason = "no scanned state lies above the core threshold";
  } else if (core.tail_drift.value >= 0.0) {
    cert.violated = true;
    cert.worst_state = core.tail_drift.state;
    cert.worst_drift = core.tail_drift.value;
    std::ostringstream os;
    os << "drift " << core.tail_drift.value << " >= 0 at tail state " << core.tail_drift.state.to_string();
    cert.reason = os.str();
  } else if (!(gamma > 0.0)) {
    cert.violated = true;
    cert.reason = "fitted gamma is not positive";
  }
}

QueueSize table_size(const StateScan& scan) { return scan.cap() + 64; }

}  // namespace

double ctmc_drift(const RateModel& model, const OrderBookState& q, double z, double U) {
  check_radius(model, z);
  const PowerTable pw(z, U, 64);
  std::vector<Transition> buf;
  return pure_drift(model, BookView(q), pw, buf).sum;
}

DriftCertificate drift_check_ctmc(const RateModel& model, double z, double U, const StateScan& scan,
                                  unsigned threads) {
  check_radius(model, z);
  DriftCertificate cert;
  cert.z = z;
  cert.U = U;
  cert.scan_description = scan.describe();
  const PowerTable pw(z, U, table_size(scan));
  fit_certificate(cert, scan, threads, [&](const OrderBookState& q, std::vector<Transition>& buf) {
    return std::pair{pw.V(q), pure_drift(model, BookView(q), pw, buf).sum};
  });
  return cert;
}

namespace {

struct MomentEstimate {
  double mean = 0.0;
  double se = 0.0;
};

template <class Draw>
MomentEstimate mc_moment(const char* what, std::uint64_t draws, Draw draw) {
  double sum = 0.0, sum_sq = 0.0, largest = 0.0;
  for (std::uint64_t k = 0; k < draws; ++k) {
    const double x = draw();
    sum += x;
    sum_sq += x * x;
    largest = std::max(largest, x);
  }
  const auto n = static_cast<double>(draws);
  MomentEstimate m;
  m.mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - m.mean * m.mean) * n / std::max(1.0, n - 1.0);
  m.se = std::sqrt(var / n);
  if (!std::isfinite(sum) || m.se > 0.1 * m.mean || largest > 0.1 * sum) {
    std::ostringstream os;
    os << "Monte Carlo estimate of " << what << " is unstable (mean " << m.mean << ", standard error " << m.se
       << ", largest draw " << largest << " of sum " << sum << ")";
    throw DivergentBoundaryMoment(os.str());
  }
  return m;
}

}  // namespace

BoundaryMoments estimate_boundary_moments(const RateModel& model, double z, double U, std::uint64_t draws,
                                          std::uint64_t seed) {
  if (draws < 1) throw std::invalid_argument("at least one Monte Carlo draw required");
  auto radius_guard = [z](const char* what, double radius) {
    if (z >= radius) {
      std::ostringstream os;
      os << "z = " << z << " reaches the moment radius " << radius << " of " << what;
      throw DivergentBoundaryMoment(os.str());
    }
  };
  radius_guard("pi_K", model.upper_fill().moment_radius());
  radius_guard("pi_{-K}", model.lower_fill().moment_radius());
  radius_guard("pi^inc", model.reinit_after_up().moment_radius());
  radius_guard("pi^dec", model.reinit_after_down().moment_radius());

  BoundaryMoments m;
  m.draws = draws;
  const PowerTable pw(z, U, 256);
  const PowerTable raw(z, 0.0, 256);
  {
    Rng rng = make_path_rng(seed, 0);
    const auto e = mc_moment("E[z^|l|] under pi_K", draws, [&] { return raw(model.upper_fill().sample(rng)); });
    m.e_upper = e.mean;
    m.se_upper = e.se;
  }
  {
    Rng rng = make_path_rng(seed, 1);
    const auto e = mc_moment("E[z^|l|] under pi_{-K}", draws, [&] { return raw(model.lower_fill().sample(rng)); });
    m.e_lower = e.mean;
    m.se_lower = e.se;
  }
  OrderBookState q(model.book().K);
  {
    Rng rng = make_path_rng(seed, 2);
    const auto e = mc_moment("E[V] under pi^inc", draws, [&] {
      model.reinit_after_up().sample(rng, q);
      return pw.V(q);
    });
    m.e_inc = e.mean;
    m.se_inc = e.se;
  }
  {
    Rng rng = make_path_rng(seed, 3);
    const auto e = mc_moment("E[V] under pi^dec", draws, [&] {
      model.reinit_after_down().sample(rng, q);
      return pw.V(q);
    });
    m.e_dec = e.mean;
    m.se_dec = e.se;
  }
  return m;
}

namespace {

struct EmbeddedTerms {
  double V = 0.0;
  double drift = 0.0;
  double share = 0.0;   // (u + d) / total
  double w_upper = 0.0, w_lower = 0.0, w_inc = 0.0, w_dec = 0.0;  // sensitivities to the moments
};

EmbeddedTerms embedded_terms(const RateModel& model, const OrderBookState& q, const PowerTable& pw, double z,
                             double U, const BoundaryMoments& m, std::vector<Transition>& buf) {
  const BookView v(q);
  const PureDrift pd = pure_drift(model, v, pw, buf);
  const double u = model.up_rate(v);
  const double d = model.down_rate(v);
  const double total = pd.total + u + d;
  if (!(total > 0.0)) throw AbsorbingState("all outgoing rates vanish at state " + q.to_string());
  const double th = model.reinit_probability();
  const double zU = std::pow(z, -U);
  const auto s = q.slots();
  EmbeddedTerms t;
  t.V = pw.V(q);
  const double up = (1.0 - th) * (zU * m.e_upper - pw(s.front())) + th * (m.e_inc - t.V);
  const double down = (1.0 - th) * (zU * m.e_lower - pw(s.back())) + th * (m.e_dec - t.V);
  t.drift = (pd.sum + u * up + d * down) / total;
  t.share = (u + d) / total;
  t.w_upper = u * (1.0 - th) * zU / total;
  t.w_lower = d * (1.0 - th) * zU / total;
  t.w_inc = u * th / total;
  t.w_dec = d * th / total;
  return t;
}

}  // namespace

double embedded_drift(const RateModel& model, const OrderBookState& q, double z, double U,
                      const BoundaryMoments& m) {
  check_radius(model, z);
  const PowerTable pw(z, U, 64);
  std::vector<Transition> buf;
  return embedded_terms(model, q, pw, z, U, m, buf).drift;
}

DriftCertificate drift_check_embedded(const RateModel& model, double z, double U, const StateScan& scan,
                                      const EmbeddedOptions& options, unsigned threads) {
  check_radius(model, z);
  if (options.mc_draws < 10'000) throw std::invalid_argument("at least 10^4 Monte Carlo draws required");
  const BoundaryMoments m = estimate_boundary_moments(model, z, U, options.mc_draws, options.seed);
  DriftCertificate cert;
  cert.z = z;
  cert.U = U;
  cert.scan_description = scan.describe();
  const PowerTable pw(z, U, table_size(scan));
  fit_certificate(cert, scan, threads, [&](const OrderBookState& q, std::vector<Transition>& buf) {
    const auto t = embedded_terms(model, q, pw, z, U, m, buf);
    return std::pair{t.V, t.drift};
  });

  std::vector<Transition> buf;
  const auto w = embedded_terms(model, cert.worst_state, pw, z, U, m, buf);
  cert.B_stderr = std::sqrt(std::pow(w.w_upper * m.se_upper, 2) + std::pow(w.w_lower * m.se_lower, 2) +
                            std::pow(w.w_inc * m.se_inc, 2) + std::pow(w.w_dec * m.se_dec, 2));

  // Share of price moves off the finite set {max |q_i| <= U}.
  const ArgMax share = scan_reduce(
      scan, threads, ArgMax{},
      [&](ArgMax& a, const OrderBookState& q) {
        const auto sl = q.slots();
        const bool inside = std::all_of(sl.begin(), sl.end(), [U](QueueSize x) {
          return static_cast<double>(x < 0 ? -x : x) <= U;
        });
        if (inside) return;
        const BookView v(q);
        const double u = model.up_rate(v);
        const double d = model.down_rate(v);
        const double total = pure_jump_rate(model, v) + u + d;
        a.offer(total > 0.0 ? (u + d) / total : 1.0, q, 0.0);
      },
      [](ArgMax& a, const ArgMax& b) { a.merge(b); });
  if (share.set) {
    cert.max_price_share = share.value;
    if (share.value >= 1.0 - options.price_share_eps) {
      cert.price_share_violated = true;
      cert.price_share_witness = share.state;
      cert.violated = true;
      std::ostringstream os;
      os << "price moves make up a share " << share.value << " of all events at " << share.state.to_string();
      cert.reason = cert.reason.empty() ? os.str() : cert.reason + "; " + os.str();
    }
  }
  return cert;
}

}  // namespace lob
