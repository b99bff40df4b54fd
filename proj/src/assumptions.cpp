#include "lob/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lob/drift.hpp"

namespace lob {

const char* to_string(AssumptionStatus s) noexcept {
  switch (s) {
    case AssumptionStatus::VerifiedOnScan: return "verified-on-scan";
    case AssumptionStatus::Violated: return "violated";
    case AssumptionStatus::NotApplicable: return "not-applicable";
  }
  return "?";
}

const AssumptionEntry& AssumptionReport::get(int number) const {
  for (const auto& e : entries)
    if (e.number == number) return e;
  throw std::out_of_range("no entry for assumption " + std::to_string(number));
}

bool AssumptionReport::any_violated() const {
  return std::any_of(entries.begin(), entries.end(),
                     [](const AssumptionEntry& e) { return e.status == AssumptionStatus::Violated; });
}

namespace {

AssumptionEntry make_entry(int number, std::string title) {
  AssumptionEntry e;
  e.number = number;
  e.title = std::move(title);
  return e;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Sup {
  double value = -kInf;
  OrderBookState witness;
  bool set = false;

  void offer(double v, const OrderBookState& q) {
    if (!set || v > value) {
      value = v;
      witness = q;
      set = true;
    }
  }
  void merge(const Sup& o) {
    if (o.set) offer(o.value, o.witness);
  }
};

struct Acc {
  std::uint64_t states = 0;
  Sup sign_reversal;              // assumption 2: positive rate for a sign-reversing size
  std::vector<Sup> L_shell;       // per z: sup of the insertion bound on the box shell and extras
  std::vector<Sup> L_inner;       // per z: same on the interior
  std::vector<Sup> bracket;       // per (z, U): continuous-time bracket
  std::vector<Sup> bracket_emb;   // per (z, U): embedded bracket
  std::vector<Sup> neg_Bf;        // per (z, U): sup of -(G^f(z) - 1)
  std::vector<Sup> neg_Bg;        // per (z, U)
  std::vector<std::uint64_t> tail_pairs;  // per U: number of (q, i) beyond U
  std::vector<Sup> price_share;   // per U, off {max |q_i| <= U}
  Sup neg_total;                  // sup of -total rate
  double max_price_rate = 0.0;

  Acc(std::size_t nz, std::size_t nu)
      : L_shell(nz), L_inner(nz), bracket(nz * nu), bracket_emb(nz * nu), neg_Bf(nz * nu), neg_Bg(nz * nu),
        tail_pairs(nu, 0), price_share(nu) {}

  void merge(const Acc& o) {
    states += o.states;
    sign_reversal.merge(o.sign_reversal);
    for (std::size_t k = 0; k < L_shell.size(); ++k) {
      L_shell[k].merge(o.L_shell[k]);
      L_inner[k].merge(o.L_inner[k]);
    }
    for (std::size_t k = 0; k < bracket.size(); ++k) {
      bracket[k].merge(o.bracket[k]);
      bracket_emb[k].merge(o.bracket_emb[k]);
      neg_Bf[k].merge(o.neg_Bf[k]);
      neg_Bg[k].merge(o.neg_Bg[k]);
    }
    for (std::size_t k = 0; k < tail_pairs.size(); ++k) {
      tail_pairs[k] += o.tail_pairs[k];
      price_share[k].merge(o.price_share[k]);
    }
    neg_total.merge(o.neg_total);
    max_price_rate = std::max(max_price_rate, o.max_price_rate);
  }
};

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

AssumptionReport check_assumptions(const RateModel& model, const StateScan& scan, const std::vector<double>& z_grid,
                                   const std::vector<double>& U_grid, const AssumptionOptions& options,
                                   unsigned threads) {
  if (z_grid.empty() || U_grid.empty()) throw std::invalid_argument("z and U grids must be nonempty");
  for (double z : z_grid)
    if (!(z > 1.0)) throw std::invalid_argument("grid values of z must exceed 1");

  AssumptionReport rep;
  rep.scan_description = scan.describe();
  rep.z_grid = z_grid;
  rep.U_grid = U_grid;
  rep.z_limit = options.z_limit;

  // The limit proxy is evaluated last, after the grid.
  std::vector<double> zs = z_grid;
  zs.push_back(options.z_limit);
  const std::size_t nz = zs.size();
  const std::size_t nu = U_grid.size();
  const std::size_t lim = nz - 1;
  const bool radius_ok = model.size_radius() > 1.0;
  const QueueSize cap = scan.cap();

  auto visit = [&](Acc& a, const OrderBookState& q) {
    ++a.states;
    const BookView v(q);
    const int K = q.depth();

    // Assumption 2 on the raw rates.
    for (int s = 0; s < 2 * K; ++s) {
      const int i = index_of_slot(s, K);
      const QueueSize qi = q[i];
      if (i >= v.best_ask) {
        const QueueSize nmax = model.max_jump_size(Direction::Deplete, i, v);
        for (QueueSize n = qi + 1; n <= nmax; ++n)
          if (model.rate(Direction::Deplete, i, v, n) > 0.0) a.sign_reversal.offer(static_cast<double>(i), q);
      }
      if (i <= v.best_bid) {
        const QueueSize nmax = model.max_jump_size(Direction::Insert, i, v);
        for (QueueSize n = -qi + 1; n <= nmax; ++n)
          if (model.rate(Direction::Insert, i, v, n) > 0.0) a.sign_reversal.offer(static_cast<double>(i), q);
      }
    }

    const double pure = pure_jump_rate(model, v);
    const double u = model.up_rate(v);
    const double d = model.down_rate(v);
    const double total = pure + u + d;
    a.neg_total.offer(-total, q);
    a.max_price_rate = std::max(a.max_price_rate, u + d);
    const auto sl = q.slots();
    QueueSize max_abs = 0;
    for (QueueSize x : sl) max_abs = std::max(max_abs, x < 0 ? -x : x);
    for (std::size_t ui = 0; ui < nu; ++ui)
      if (static_cast<double>(max_abs) > U_grid[ui]) a.price_share[ui].offer(total > 0.0 ? (u + d) / total : 1.0, q);

    if (!radius_ok) return;
    const bool shell = max_abs >= cap;
    for (int s = 0; s < 2 * K; ++s) {
      const int i = index_of_slot(s, K);
      const QueueSize qi = q[i];
      for (std::size_t zi = 0; zi < nz; ++zi) {
        const double z = zs[zi];
        if (z > model.size_radius()) continue;
        const auto Gf = generating_function(model, i, v, Direction::Insert, z);
        const auto Gg = generating_function(model, i, v, Direction::Deplete, z);
        const double bound = (i > v.best_bid ? Gf.star_rate * Gf.at_z : 0.0) +
                             (i < v.best_ask ? Gg.star_rate * Gg.at_z : 0.0);
        (shell ? a.L_shell : a.L_inner)[zi].offer(bound, q);
        for (std::size_t ui = 0; ui < nu; ++ui) {
          const double U = U_grid[ui];
          const std::size_t k = zi * nu + ui;
          if (static_cast<double>(qi) > U && i >= v.best_ask) {
            if (zi == lim) ++a.tail_pairs[ui];
            a.neg_Bf[k].offer(-(Gf.at_z - 1.0), q);
            if (Gf.star_rate > 0.0) {
              const double ratio = (1.0 - Gg.at_inv_z) / (Gf.at_z - 1.0);
              a.bracket[k].offer(Gf.star_rate - Gg.star_rate * ratio, q);
              if (pure > 0.0) a.bracket_emb[k].offer((Gf.star_rate - Gg.star_rate * ratio) / pure, q);
            }
          }
          if (static_cast<double>(qi) < -U && i <= v.best_bid) {
            if (zi == lim) ++a.tail_pairs[ui];
            a.neg_Bg[k].offer(-(Gg.at_z - 1.0), q);
            if (Gg.star_rate > 0.0) {
              const double ratio = (1.0 - Gf.at_inv_z) / (Gg.at_z - 1.0);
              a.bracket[k].offer(Gg.star_rate - Gf.star_rate * ratio, q);
              if (pure > 0.0) a.bracket_emb[k].offer((Gg.star_rate - Gf.star_rate * ratio) / pure, q);
            }
          }
        }
      }
    }
  };

  const Acc acc = scan_reduce(scan, threads, Acc(nz, nu), visit, [](Acc& a, const Acc& b) { a.merge(b); });
  if (acc.states == 0) throw EmptyScan("scan contains no states: " + scan.describe());
  rep.scanned_states = acc.states;

  // 2: no sign reversal in a single jump.
  {
    AssumptionEntry e = make_entry(2, "queues cannot change sign in one jump");
    if (acc.sign_reversal.set) {
      e.status = AssumptionStatus::Violated;
      e.witness = acc.sign_reversal.witness;
      e.margins["index"] = acc.sign_reversal.value;
      e.note = "positive rate for a jump larger than the queue at index " + fmt(acc.sign_reversal.value) +
               "; the simulator drops such jumps";
    } else {
      e.status = AssumptionStatus::VerifiedOnScan;
    }
    rep.entries.push_back(std::move(e));
  }

  // 3: finite radius and bounded insertion intensity.
  {
    AssumptionEntry e = make_entry(3, "jump sizes have a radius z* > 1 and insertions are bounded by L");
    e.margins["z_star"] = model.size_radius();
    if (!radius_ok) {
      e.status = AssumptionStatus::Violated;
      e.witness = OrderBookState(model.book().K);
      e.note = "declared jump-size radius is not above 1";
    } else {
      Sup L;
      L.merge(acc.L_inner[lim]);
      L.merge(acc.L_shell[lim]);
      for (std::size_t zi = 0; zi + 1 < nz; ++zi) {
        Sup Lz;
        Lz.merge(acc.L_inner[zi]);
        Lz.merge(acc.L_shell[zi]);
        if (Lz.set) e.margins["L@" + fmt(zs[zi])] = Lz.value;
      }
      e.margins["L"] = L.value;
      const bool grows = cap > 0 && acc.L_inner[lim].set && acc.L_shell[lim].set &&
                         acc.L_shell[lim].value > acc.L_inner[lim].value * (1.0 + 1e-9) + 1e-12;
      if (!std::isfinite(L.value) || grows) {
        e.status = AssumptionStatus::Violated;
        e.witness = acc.L_shell[lim].set ? acc.L_shell[lim].witness : L.witness;
        e.note = grows ? "insertion bound still grows at the edge of the scan" : "insertion bound is not finite";
      } else {
        e.status = AssumptionStatus::VerifiedOnScan;
      }
    }
    rep.entries.push_back(std::move(e));
  }

  // 4 and 6: drift brackets beyond U, continuous-time and embedded.
  auto bracket_entry = [&](int number, const char* title, const std::vector<Sup>& table) {
    AssumptionEntry e = make_entry(number, title);
    if (!radius_ok) {
      e.status = AssumptionStatus::NotApplicable;
      e.note = "no admissible z";
      return e;
    }
    std::size_t best = nu;
    for (std::size_t ui = 0; ui < nu; ++ui) {
      const Sup& s = table[lim * nu + ui];
      if (!s.set) continue;
      if (best == nu || s.value < table[lim * nu + best].value) best = ui;
    }
    if (best == nu) {
      e.status = AssumptionStatus::NotApplicable;
      e.note = "the scan has no queue beyond any U in the grid";
      return e;
    }
    const Sup& s = table[lim * nu + best];
    e.margins["U"] = U_grid[best];
    e.margins["z"] = zs[lim];
    e.margins["sup"] = s.value;
    e.margins["r"] = -s.value;
    for (std::size_t zi = 0; zi + 1 < nz; ++zi)
      if (table[zi * nu + best].set) e.margins["sup@" + fmt(zs[zi])] = table[zi * nu + best].value;
    if (s.value < 0.0) {
      e.status = AssumptionStatus::VerifiedOnScan;
    } else {
      e.status = AssumptionStatus::Violated;
      e.witness = s.witness;
      e.note = "bracket is nonnegative for every U in the grid";
    }
    return e;
  };
  rep.entries.push_back(bracket_entry(4, "queues beyond U drift back (continuous time)", acc.bracket));

  // 5: B_f, B_g > 0.
  {
    AssumptionEntry e = make_entry(5, "size generating functions stay above 1 beyond U");
    if (!radius_ok) {
      e.status = AssumptionStatus::NotApplicable;
      e.note = "no admissible z";
    } else {
      std::size_t chosen = nu;
      std::optional<OrderBookState> witness;
      for (std::size_t ui = 0; ui < nu && chosen == nu; ++ui) {
        bool ok = acc.tail_pairs[ui] > 0;
        for (std::size_t zi = 0; zi < nz && ok; ++zi) {
          const std::size_t k = zi * nu + ui;
          if (acc.neg_Bf[k].set && acc.neg_Bf[k].value >= 0.0) {
            ok = false;
            if (!witness) witness = acc.neg_Bf[k].witness;
          }
          if (acc.neg_Bg[k].set && acc.neg_Bg[k].value >= 0.0) {
            ok = false;
            if (!witness) witness = acc.neg_Bg[k].witness;
          }
        }
        if (ok) chosen = ui;
      }
      const bool any_tail = std::any_of(acc.tail_pairs.begin(), acc.tail_pairs.end(), [](auto n) { return n > 0; });
      if (!any_tail) {
        e.status = AssumptionStatus::NotApplicable;
        e.note = "the scan has no queue beyond any U in the grid";
      } else if (chosen == nu) {
        e.status = AssumptionStatus::Violated;
        e.witness = witness;
      } else {
        e.status = AssumptionStatus::VerifiedOnScan;
        e.margins["U"] = U_grid[chosen];
        for (std::size_t zi = 0; zi < nz; ++zi) {
          const std::size_t k = zi * nu + chosen;
          if (acc.neg_Bf[k].set) e.margins["B_f@" + fmt(zs[zi])] = -acc.neg_Bf[k].value;
          if (acc.neg_Bg[k].set) e.margins["B_g@" + fmt(zs[zi])] = -acc.neg_Bg[k].value;
        }
      }
    }
    rep.entries.push_back(std::move(e));
  }

  rep.entries.push_back(bracket_entry(6, "queues beyond U drift back (embedded chain)", acc.bracket_emb));

  // 7: exponential moments of the four redraw laws.
  {
    AssumptionEntry e = make_entry(7, "boundary and redraw laws have exponential moments");
    if (acc.max_price_rate == 0.0) {
      e.status = AssumptionStatus::NotApplicable;
      e.note = "the reference price never moves on the scan";
    } else {
      const double U = U_grid.front();
      bool any_finite = false;
      std::string failures;
      for (double z : z_grid) {
        try {
          const auto m = estimate_boundary_moments(model, z, U, options.mc_draws, options.seed);
          const double zU = std::pow(z, -U);
          e.margins["L_pi@" + fmt(z)] = m.e_inc + m.e_dec + zU * (m.e_upper + m.e_lower);
          e.margins["L_pi_se@" + fmt(z)] =
              std::sqrt(m.se_inc * m.se_inc + m.se_dec * m.se_dec + zU * zU * (m.se_upper * m.se_upper + m.se_lower * m.se_lower));
          any_finite = true;
        } catch (const DivergentBoundaryMoment& ex) {
          failures += (failures.empty() ? "" : "; ") + std::string(ex.what());
        }
      }
      e.margins["U"] = U;
      if (any_finite) {
        e.status = AssumptionStatus::VerifiedOnScan;
        e.note = failures.empty() ? "Monte Carlo estimates, not certified bounds" : failures;
      } else {
        e.status = AssumptionStatus::Violated;
        e.witness = OrderBookState(model.book().K);
        e.note = failures;
      }
    }
    rep.entries.push_back(std::move(e));
  }

  // 8: price moves are not the only possible event off a finite set.
  {
    AssumptionEntry e = make_entry(8, "price moves are not the only event off a finite set");
    std::size_t best = nu;
    for (std::size_t ui = 0; ui < nu; ++ui)
      if (acc.price_share[ui].set && (best == nu || acc.price_share[ui].value < acc.price_share[best].value))
        best = ui;
    if (best == nu) {
      e.status = AssumptionStatus::NotApplicable;
      e.note = "every scanned state lies in the finite set";
    } else {
      const Sup& s = acc.price_share[best];
      e.margins["U"] = U_grid[best];
      e.margins["max_share"] = s.value;
      if (s.value < 1.0 - options.price_share_eps) {
        e.status = AssumptionStatus::VerifiedOnScan;
      } else {
        e.status = AssumptionStatus::Violated;
        e.witness = s.witness;
      }
    }
    rep.entries.push_back(std::move(e));
  }

  // 9: total rate bounded below.
  {
    AssumptionEntry e = make_entry(9, "total event rate is bounded below");
    const double m = -acc.neg_total.value;
    e.margins["m"] = m;
    if (m > 0.0) {
      e.status = AssumptionStatus::VerifiedOnScan;
    } else {
      e.status = AssumptionStatus::Violated;
      e.witness = acc.neg_total.witness;
      e.note = "absorbing state";
    }
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

}  // namespace lob
