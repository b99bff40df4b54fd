#include "lob/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace lob {

namespace {

std::string fmt_num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

std::string idx_name(const char* sym, int i) { return std::string(sym) + "_" + std::to_string(i); }

void check_probability_in(ConstraintReport& out, const char* name, double p, bool open_left) {
  const bool ok = open_left ? (p > 0.0 && p <= 1.0) : (p >= 0.0 && p <= 1.0);
  if (!ok)
    out.push_back({std::string(name) + (open_left ? " in (0, 1] required" : " in [0, 1] required"),
                   std::string(name) + " = " + fmt_num(p), true});
}

void check_redraw(ConstraintReport& out, const RedrawParams& r, int K) {
  check_probability_in(out, "θ^reinit", r.reinit_probability, false);
  check_probability_in(out, "boundary p", r.boundary_p, true);
  if (r.reinit_p.size() != 1 && r.reinit_p.size() != static_cast<std::size_t>(2 * K))
    out.push_back({"reinit p needs 1 or 2K entries", "got " + std::to_string(r.reinit_p.size()), true});
  for (double p : r.reinit_p) check_probability_in(out, "reinit p", p, true);
}

void check_size(ConstraintReport& out, const char* name, std::size_t got, std::size_t want) {
  if (got != want)
    out.push_back({std::string(name) + " needs 2K entries",
                   "expected " + std::to_string(want) + ", got " + std::to_string(got), true});
}

void check_nondecreasing_theta(ConstraintReport& out, const std::vector<double>& theta, int K) {
  for (int s = 0; s < 2 * K; ++s) {
    const double t = theta[static_cast<std::size_t>(s)];
    if (!(t >= 0.0) || !std::isfinite(t))
      out.push_back({"θ_i ≥ 0 required", idx_name("θ", index_of_slot(s, K)) + " = " + fmt_num(t), true});
  }
  for (int s = 0; s + 1 < 2 * K; ++s) {
    const double a = theta[static_cast<std::size_t>(s)];
    const double b = theta[static_cast<std::size_t>(s + 1)];
    if (a > b)
      out.push_back({"θ_i nondecreasing",
                     idx_name("θ", index_of_slot(s, K)) + " = " + fmt_num(a) + " > " +
                         idx_name("θ", index_of_slot(s + 1, K)) + " = " + fmt_num(b),
                     false});
  }
}

double held(const std::vector<double>& table, std::size_t x) {
  return table.empty() ? 0.0 : table[std::min(x, table.size() - 1)];
}

}  // namespace

//
// Parameter defaults
//

PoissonKParams PoissonKParams::defaults(int K) {
  PoissonKParams p;
  p.K = K;
  for (int s = 0; s < 2 * K; ++s) {
    const int i = index_of_slot(s, K);
    const int a = std::abs(i);
    // Sell-limit intensity at limit i; buy limits at i use lambda_{-i}.
    p.lambda.push_back(i > 0 ? 0.6 * std::pow(0.85, a - 1) : 0.3 * std::pow(0.5, a - 1));
    p.mu.push_back(1.0);
    p.gamma.push_back(a == 1 ? 0.4 : 0.1);
    p.theta.push_back(i > 0 ? 0.2 * std::pow(2.0, a - 1) : 0.1 * std::pow(0.5, a - 1));
  }
  p.redraw.reinit_probability = 0.2;
  return p;
}

ZeroIntelligenceParams ZeroIntelligenceParams::defaults(int K) {
  ZeroIntelligenceParams p;
  p.K = K;
  for (int phi = 1; phi <= 2 * K + 1; ++phi) {
    p.lambda_by_distance.push_back(1.0 * std::pow(0.8, phi - 1));
    p.mu_by_distance.push_back(0.3);
  }
  p.gamma = 0.5;
  for (int s = 0; s < 2 * K; ++s) {
    const int i = index_of_slot(s, K);
    p.theta.push_back(i > 0 ? 0.2 * std::pow(2.0, i - 1) : 0.1 * std::pow(0.5, -i - 1));
  }
  p.redraw.reinit_probability = 0.2;
  return p;
}

QueueReactiveParams QueueReactiveParams::defaults(int K) {
  QueueReactiveParams p;
  p.K = K;
  for (int level = 1; level <= K; ++level) {
    const double scale = std::pow(0.8, level - 1);
    std::vector<double> lam{1.0, 0.9, 0.8, 0.7, 0.6};
    for (double& x : lam) x *= scale;
    p.lambda.push_back(lam);
    p.mu.push_back({0.0, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4});
  }
  p.theta = 1.0;
  p.redraw.reinit_probability = 0.2;
  return p;
}

//
// Validation
//

ConstraintReport validate_params(const PoissonK1Params& p) {
  ConstraintReport out;
  if (!(p.lambda > 0.0))
    out.push_back({"λ > 0 required", "λ = " + fmt_num(p.lambda), p.lambda < 0.0});
  if (!std::isfinite(p.mu)) out.push_back({"μ < ∞ required", "μ = " + fmt_num(p.mu), true});
  if (!(p.lambda < p.mu))
    out.push_back({"λ < μ required", "λ = " + fmt_num(p.lambda) + ", μ = " + fmt_num(p.mu), false});
  if (p.mu < 0.0) out.push_back({"μ ≥ 0 required", "μ = " + fmt_num(p.mu), true});
  if (!(p.theta >= 0.0) || !std::isfinite(p.theta))
    out.push_back({"θ ≥ 0 required", "θ = " + fmt_num(p.theta), true});
  if (p.reinit_p.size() != 1 && p.reinit_p.size() != 2)
    out.push_back({"reinit p needs 1 or 2K entries", "got " + std::to_string(p.reinit_p.size()), true});
  for (double x : p.reinit_p) check_probability_in(out, "reinit p", x, true);
  return out;
}

ConstraintReport validate_params(const PoissonKParams& p) {
  ConstraintReport out;
  if (p.K < 1) {
    out.push_back({"K ≥ 1 required", "K = " + std::to_string(p.K), true});
    return out;
  }
  const auto n = static_cast<std::size_t>(2 * p.K);
  check_size(out, "λ", p.lambda.size(), n);
  check_size(out, "μ", p.mu.size(), n);
  check_size(out, "γ", p.gamma.size(), n);
  check_size(out, "θ", p.theta.size(), n);
  if (!out.empty()) return out;
  for (int s = 0; s < 2 * p.K; ++s) {
    const int i = index_of_slot(s, p.K);
    const double lam = p.lambda[static_cast<std::size_t>(s)];
    const double mu_mirror = p.mu[static_cast<std::size_t>(slot_of(-i, p.K))];
    const double gam = p.gamma[static_cast<std::size_t>(s)];
    if (!(lam > 0.0) || !std::isfinite(lam))
      out.push_back({"λ_i > 0 required", idx_name("λ", i) + " = " + fmt_num(lam), lam < 0.0 || !std::isfinite(lam)});
    if (p.mu[static_cast<std::size_t>(s)] < 0.0 || !std::isfinite(p.mu[static_cast<std::size_t>(s)]))
      out.push_back({"μ_i ≥ 0 required", idx_name("μ", i) + " = " + fmt_num(p.mu[static_cast<std::size_t>(s)]),
                     true});
    if (!(mu_mirror > lam))
      out.push_back({"μ_{-i} > λ_i required",
                     idx_name("μ", -i) + " = " + fmt_num(mu_mirror) + ", " + idx_name("λ", i) + " = " + fmt_num(lam),
                     false});
    if (!(gam >= 0.0) || !std::isfinite(gam))
      out.push_back({"γ_i ≥ 0 required", idx_name("γ", i) + " = " + fmt_num(gam), true});
  }
  check_nondecreasing_theta(out, p.theta, p.K);
  check_redraw(out, p.redraw, p.K);
  return out;
}

ConstraintReport validate_params(const ZeroIntelligenceParams& p) {
  ConstraintReport out;
  if (p.K < 1) {
    out.push_back({"K ≥ 1 required", "K = " + std::to_string(p.K), true});
    return out;
  }
  if (p.lambda_by_distance.empty())
    out.push_back({"λ_φ table must be nonempty", "", true});
  if (p.mu_by_distance.empty()) out.push_back({"μ_φ table must be nonempty", "", true});
  check_size(out, "θ", p.theta.size(), static_cast<std::size_t>(2 * p.K));
  if (!out.empty()) return out;
  for (std::size_t k = 0; k < p.lambda_by_distance.size(); ++k) {
    const double x = p.lambda_by_distance[k];
    if (!(x > 0.0) || !std::isfinite(x))
      out.push_back({"λ_φ > 0 required", idx_name("λ", static_cast<int>(k + 1)) + " = " + fmt_num(x),
                     x < 0.0 || !std::isfinite(x)});
  }
  for (std::size_t k = 0; k < p.mu_by_distance.size(); ++k) {
    const double x = p.mu_by_distance[k];
    if (!(x > 0.0) || !std::isfinite(x))
      out.push_back({"μ_φ > 0 required", idx_name("μ", static_cast<int>(k + 1)) + " = " + fmt_num(x),
                     x < 0.0 || !std::isfinite(x)});
  }
  if (!(p.gamma >= 0.0) || !std::isfinite(p.gamma))
    out.push_back({"γ ≥ 0 required", "γ = " + fmt_num(p.gamma), true});
  check_nondecreasing_theta(out, p.theta, p.K);
  check_redraw(out, p.redraw, p.K);
  return out;
}

ConstraintReport validate_params(const QueueReactiveParams& p) {
  ConstraintReport out;
  if (p.K < 1) {
    out.push_back({"K ≥ 1 required", "K = " + std::to_string(p.K), true});
    return out;
  }
  if (p.lambda.size() != static_cast<std::size_t>(p.K) || p.mu.size() != static_cast<std::size_t>(p.K)) {
    out.push_back({"one λ and one μ table per level required",
                   "K = " + std::to_string(p.K) + ", got " + std::to_string(p.lambda.size()) + " λ and " +
                       std::to_string(p.mu.size()) + " μ tables",
                   true});
    return out;
  }
  for (int level = 1; level <= p.K; ++level) {
    const auto& lam = p.lambda[static_cast<std::size_t>(level - 1)];
    const auto& mu = p.mu[static_cast<std::size_t>(level - 1)];
    const std::string tag = std::to_string(level);
    if (lam.empty() || mu.empty()) {
      out.push_back({"intensity tables must be nonempty", "level " + tag, true});
      continue;
    }
    if (mu.front() != 0.0)
      out.push_back({"μ(0)=0 required", "μ_" + tag + "(0) = " + fmt_num(mu.front()), true});
    for (std::size_t x = 0; x < lam.size(); ++x)
      if (!(lam[x] >= 0.0) || !std::isfinite(lam[x]))
        out.push_back({"λ ≥ 0 and finite required", "λ_" + tag + "(" + std::to_string(x) + ") = " + fmt_num(lam[x]),
                       true});
    for (std::size_t x = 0; x < mu.size(); ++x)
      if (!(mu[x] >= 0.0) || !std::isfinite(mu[x]))
        out.push_back({"μ ≥ 0 and finite required", "μ_" + tag + "(" + std::to_string(x) + ") = " + fmt_num(mu[x]),
                       true});
    // Tables are held constant past their end, so the tail inequality is decided by the last entries.
    const std::size_t tail = std::max(lam.size(), mu.size()) - 1;
    const double gap = held(lam, tail) - held(mu, tail);
    if (!(gap < 0.0))
      out.push_back({"λ(x) − μ(x) < −r for x > U required",
                     "level " + tag + ": λ − μ = " + fmt_num(gap) + " beyond x = " + std::to_string(tail), false});
    double inf_sum = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x <= tail; ++x) inf_sum = std::min(inf_sum, held(lam, x) + held(mu, x));
    if (!(inf_sum > 0.0))
      out.push_back({"inf(λ+μ) > 0 required", "level " + tag + ": inf = " + fmt_num(inf_sum), false});
  }
  if (!(p.theta >= 0.0) || !std::isfinite(p.theta))
    out.push_back({"θ ≥ 0 required", "θ = " + fmt_num(p.theta), true});
  check_redraw(out, p.redraw, p.K);
  return out;
}

//
// Models
//

ZooModel::ZooModel(BookParams book, const RedrawParams& redraw)
    : book_(book),
      reinit_probability_(redraw.reinit_probability),
      upper_(std::make_shared<SignedGeometric>(redraw.boundary_p, +1)),
      lower_(std::make_shared<SignedGeometric>(redraw.boundary_p, -1)),
      reinit_(std::make_shared<ProductGeometricBook>(book.K, redraw.reinit_p)) {
  book_.validate();
}

namespace {

RedrawParams k1_redraw(const PoissonK1Params& p) {
  RedrawParams r;
  r.reinit_probability = 1.0;
  r.reinit_p = p.reinit_p;
  return r;
}

template <class Params>
void throw_if_structural(const Params& p) {
  const auto report = validate_params(p);
  for (const auto& v : report)
    if (v.structural) throw std::invalid_argument(v.constraint + ": " + v.detail);
}

}  // namespace

PoissonK1Model::PoissonK1Model(const PoissonK1Params& p, double tick)
    : ZooModel(BookParams{1, tick}, k1_redraw(p)), p_(p) {
  throw_if_structural(p);
}

double PoissonK1Model::rate(Direction dir, int i, const BookView& v, QueueSize n) const {
  if (n != 1) return 0.0;
  const QueueSize qi = v.q[i];
  if (i == 1) return dir == Direction::Insert ? p_.lambda : (qi > 0 ? p_.mu : 0.0);
  // i == -1: insertion shrinks the bid queue (cancellation or market sell).
  return dir == Direction::Insert ? (qi < 0 ? p_.mu : 0.0) : p_.lambda;
}

double PoissonK1Model::up_rate(const BookView& v) const { return v.q[1] == 0 ? p_.theta : 0.0; }
double PoissonK1Model::down_rate(const BookView& v) const { return v.q[-1] == 0 ? p_.theta : 0.0; }

PoissonKModel::PoissonKModel(const PoissonKParams& p, double tick) : ZooModel(BookParams{p.K, tick}, p.redraw), p_(p) {
  throw_if_structural(p);
}

double PoissonKModel::theta(int i) const {
  // theta_{K+1} is not part of the parameter set; the top value is repeated.
  const int K = p_.K;
  if (i > K) i = K;
  return p_.theta[static_cast<std::size_t>(slot_of(i, K))];
}

double PoissonKModel::rate(Direction dir, int i, const BookView& v, QueueSize n) const {
  if (n != 1) return 0.0;
  const QueueSize qi = v.q[i];
  if (dir == Direction::Insert) {
    double r = 0.0;
    if (i > v.best_bid) r += lambda(i);
    if (i == v.best_bid) r += gamma(i);
    if (i <= v.best_bid && qi < 0) r += mu(i);
    return r;
  }
  double r = 0.0;
  if (i < v.best_ask) r += lambda(-i);
  if (i == v.best_ask) r += gamma(-i);
  if (i >= v.best_ask && qi > 0) r += mu(-i);
  return r;
}

double PoissonKModel::up_rate(const BookView& v) const { return theta(v.best_ask); }
double PoissonKModel::down_rate(const BookView& v) const { return theta(-v.best_bid); }

ZeroIntelligenceModel::ZeroIntelligenceModel(const ZeroIntelligenceParams& p, double tick)
    : ZooModel(BookParams{p.K, tick}, p.redraw), p_(p) {
  throw_if_structural(p);
}

double ZeroIntelligenceModel::lambda_at(int distance) const {
  return held(p_.lambda_by_distance, static_cast<std::size_t>(std::max(distance, 1) - 1));
}
double ZeroIntelligenceModel::mu_at(int distance) const {
  return held(p_.mu_by_distance, static_cast<std::size_t>(std::max(distance, 1) - 1));
}
double ZeroIntelligenceModel::theta(int i) const {
  const int K = p_.K;
  if (i > K) i = K;
  return p_.theta[static_cast<std::size_t>(slot_of(i, K))];
}

double ZeroIntelligenceModel::rate(Direction dir, int i, const BookView& v, QueueSize n) const {
  if (n != 1) return 0.0;
  const auto size = static_cast<double>(std::abs(v.q[i]));
  double r = 0.0;
  if (dir == Direction::Insert) {
    if (i > v.best_bid) r += lambda_at(std::abs(i - v.best_bid));
    if (i == v.best_bid) r += p_.gamma;
    if (i <= v.best_bid) r += size * mu_at(std::abs(i - v.best_ask));
    return r;
  }
  if (i < v.best_ask) r += lambda_at(std::abs(i - v.best_ask));
  if (i == v.best_ask) r += p_.gamma;
  if (i >= v.best_ask) r += size * mu_at(std::abs(i - v.best_bid));
  return r;
}

double ZeroIntelligenceModel::up_rate(const BookView& v) const { return theta(v.best_ask); }
double ZeroIntelligenceModel::down_rate(const BookView& v) const { return theta(-v.best_bid); }

QueueReactiveModel::QueueReactiveModel(const QueueReactiveParams& p, double tick)
    : ZooModel(BookParams{p.K, tick}, p.redraw), p_(p) {
  throw_if_structural(p);
}

double QueueReactiveModel::lambda_of(int level, QueueSize x) const {
  if (x < 0) return 0.0;
  return held(p_.lambda[static_cast<std::size_t>(level - 1)], static_cast<std::size_t>(x));
}
double QueueReactiveModel::mu_of(int level, QueueSize x) const {
  if (x < 0) return 0.0;
  return held(p_.mu[static_cast<std::size_t>(level - 1)], static_cast<std::size_t>(x));
}

bool QueueReactiveModel::admits(const OrderBookState& q) const {
  const int K = q.depth();
  const auto slots = q.slots();
  for (int s = 0; s < 2 * K; ++s) {
    const QueueSize x = slots[static_cast<std::size_t>(s)];
    if (s < K ? x > 0 : x < 0) return false;
  }
  return true;
}

double QueueReactiveModel::rate(Direction dir, int i, const BookView& v, QueueSize n) const {
  if (n != 1) return 0.0;
  const int level = std::abs(i);
  const QueueSize qi = v.q[i];
  if (dir == Direction::Insert) return i > 0 ? lambda_of(level, qi) : mu_of(level, -qi);
  return i < 0 ? lambda_of(level, -qi) : mu_of(level, qi);
}

double QueueReactiveModel::up_rate(const BookView& v) const { return v.q[1] == 0 ? p_.theta : 0.0; }
double QueueReactiveModel::down_rate(const BookView& v) const { return v.q[-1] == 0 ? p_.theta : 0.0; }

//
// Price-rate decorators
//

PriceRateOverride::PriceRateOverride(std::shared_ptr<const RateModel> base, Mode mode, double a, double b)
    : base_(std::move(base)), mode_(mode), a_(a), b_(b) {
  if (!base_) throw std::invalid_argument("base model required");
  if (a < 0.0 || b < 0.0) throw std::invalid_argument("price-move rates must be nonnegative");
  const char* suffix = mode == Mode::Frozen ? "+frozen" : mode == Mode::Constant ? "+constant_price" : "+mid_chasing";
  name_ = std::string(base_->name()) + suffix;
}

double PriceRateOverride::up_rate(const BookView& v) const {
  switch (mode_) {
    case Mode::Frozen: return 0.0;
    case Mode::Constant: return a_;
    case Mode::MidChasing: {
      const double alpha = base_->book().tick;
      const double i_mid = 0.5 * (v.best_bid + v.best_ask);
      return a_ + b_ * std::max(0.0, alpha * (i_mid - 0.5));
    }
  }
  return 0.0;
}

double PriceRateOverride::down_rate(const BookView& v) const {
  switch (mode_) {
    case Mode::Frozen: return 0.0;
    case Mode::Constant: return b_;
    case Mode::MidChasing: {
      const double alpha = base_->book().tick;
      const double i_mid = 0.5 * (v.best_bid + v.best_ask);
      return a_ + b_ * std::max(0.0, -alpha * (i_mid + 0.5));
    }
  }
  return 0.0;
}

std::shared_ptr<const RateModel> freeze_price(std::shared_ptr<const RateModel> base) {
  return std::make_shared<PriceRateOverride>(std::move(base), PriceRateOverride::Mode::Frozen);
}

std::shared_ptr<const RateModel> with_constant_price_rates(std::shared_ptr<const RateModel> base, double up,
                                                           double down) {
  return std::make_shared<PriceRateOverride>(std::move(base), PriceRateOverride::Mode::Constant, up, down);
}

std::shared_ptr<const RateModel> with_mid_chasing(std::shared_ptr<const RateModel> base, double theta0,
                                                  double theta1) {
  return std::make_shared<PriceRateOverride>(std::move(base), PriceRateOverride::Mode::MidChasing, theta0, theta1);
}

}  // namespace lob
