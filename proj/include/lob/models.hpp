#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "lob/rate_model.hpp"

namespace lob {

/// One violated parameter inequality. Structural violations make the model
/// ill-defined (negative rates, probabilities out of range, mu(0) != 0);
/// the others are the sufficient conditions for ergodicity and diffusivity.
struct ConstraintViolation {
  std::string constraint;
  std::string detail;
  bool structural = false;
};

using ConstraintReport = std::vector<ConstraintViolation>;

inline bool has_structural(const ConstraintReport& r) {
  for (const auto& v : r)
    if (v.structural) return true;
  return false;
}

/// Parameters of the price-move redraw laws shared by every model.
struct RedrawParams {
  /// Probability that a price move redraws the whole book instead of shifting the frame.
  double reinit_probability = 0.0;
  /// Success probability of the geometric boundary fill pi_K (pi_{-K} is its mirror).
  double boundary_p = 0.5;
  /// Per-slot (or single) success probabilities of the product-geometric pi^inc = pi^dec.
  std::vector<double> reinit_p = {0.5};
};

/// Two-limit Poisson model with a one-tick spread and full redraw on every price move.
struct PoissonK1Params {
  double lambda = 1.0;
  double mu = 2.0;
  double theta = 1.0;
  std::vector<double> reinit_p = {0.5};
};

/// Poisson model with K limits per side. Rate vectors are indexed by slot
/// (limits -K..-1, 1..K in increasing order).
struct PoissonKParams {
  int K = 2;
  std::vector<double> lambda;
  std::vector<double> mu;
  std::vector<double> gamma;
  /// theta_i for i in -K..K; theta_{K+1} repeats theta_K.
  std::vector<double> theta;
  RedrawParams redraw;

  static PoissonKParams defaults(int K = 2);
};

/// Zero-intelligence model: insertion and per-order cancellation intensities
/// indexed by the distance phi(i, j) = |i - j| from the opposite best quote.
struct ZeroIntelligenceParams {
  int K = 2;
  /// lambda_phi for phi = 1, 2, ...; the last entry is held for larger distances.
  std::vector<double> lambda_by_distance;
  std::vector<double> mu_by_distance;
  double gamma = 0.5;
  std::vector<double> theta;
  RedrawParams redraw;

  static ZeroIntelligenceParams defaults(int K = 2);
};

/// Queue-reactive model on the restricted space (bids left, asks right of p_ref).
/// Intensities are tabulated by queue size; the last entry is held beyond the table.
struct QueueReactiveParams {
  int K = 2;
  /// lambda[|i| - 1][x] and mu[|i| - 1][x] for x = 0, 1, ...
  std::vector<std::vector<double>> lambda;
  std::vector<std::vector<double>> mu;
  double theta = 1.0;
  RedrawParams redraw;

  static QueueReactiveParams defaults(int K = 2);
};

ConstraintReport validate_params(const PoissonK1Params& p);
ConstraintReport validate_params(const PoissonKParams& p);
ConstraintReport validate_params(const ZeroIntelligenceParams& p);
ConstraintReport validate_params(const QueueReactiveParams& p);

/// Shared plumbing: book geometry, redraw laws, and the reinitialisation probability.
class ZooModel : public RateModel {
 public:
  const BookParams& book() const override { return book_; }
  double reinit_probability() const override { return reinit_probability_; }
  const BoundaryDistribution& upper_fill() const override { return *upper_; }
  const BoundaryDistribution& lower_fill() const override { return *lower_; }
  const BookDistribution& reinit_after_up() const override { return *reinit_; }
  const BookDistribution& reinit_after_down() const override { return *reinit_; }

 protected:
  ZooModel(BookParams book, const RedrawParams& redraw);

  BookParams book_;
  double reinit_probability_;
  std::shared_ptr<const SignedGeometric> upper_;
  std::shared_ptr<const SignedGeometric> lower_;
  std::shared_ptr<const ProductGeometricBook> reinit_;
};

class PoissonK1Model final : public ZooModel {
 public:
  PoissonK1Model(const PoissonK1Params& p, double tick = 1.0);
  std::string_view name() const override { return "poisson_k1"; }
  double rate(Direction dir, int i, const BookView& v, QueueSize n) const override;
  double up_rate(const BookView& v) const override;
  double down_rate(const BookView& v) const override;
  const PoissonK1Params& params() const noexcept { return p_; }

 private:
  PoissonK1Params p_;
};

class PoissonKModel final : public ZooModel {
 public:
  PoissonKModel(const PoissonKParams& p, double tick = 1.0);
  std::string_view name() const override { return "poisson_k"; }
  double rate(Direction dir, int i, const BookView& v, QueueSize n) const override;
  double up_rate(const BookView& v) const override;
  double down_rate(const BookView& v) const override;
  const PoissonKParams& params() const noexcept { return p_; }

 private:
  double lambda(int i) const { return p_.lambda[static_cast<std::size_t>(slot_of(i, p_.K))]; }
  double mu(int i) const { return p_.mu[static_cast<std::size_t>(slot_of(i, p_.K))]; }
  double gamma(int i) const { return p_.gamma[static_cast<std::size_t>(slot_of(i, p_.K))]; }
  double theta(int i) const;

  PoissonKParams p_;
};

class ZeroIntelligenceModel final : public ZooModel {
 public:
  ZeroIntelligenceModel(const ZeroIntelligenceParams& p, double tick = 1.0);
  std::string_view name() const override { return "zero_intelligence"; }
  double rate(Direction dir, int i, const BookView& v, QueueSize n) const override;
  double up_rate(const BookView& v) const override;
  double down_rate(const BookView& v) const override;
  const ZeroIntelligenceParams& params() const noexcept { return p_; }

 private:
  double lambda_at(int distance) const;
  double mu_at(int distance) const;
  double theta(int i) const;

  ZeroIntelligenceParams p_;
};

class QueueReactiveModel final : public ZooModel {
 public:
  QueueReactiveModel(const QueueReactiveParams& p, double tick = 1.0);
  std::string_view name() const override { return "queue_reactive"; }
  double rate(Direction dir, int i, const BookView& v, QueueSize n) const override;
  double up_rate(const BookView& v) const override;
  double down_rate(const BookView& v) const override;
  bool admits(const OrderBookState& q) const override;
  bool restricts_space() const override { return true; }
  const QueueReactiveParams& params() const noexcept { return p_; }

  double lambda_of(int level, QueueSize x) const;
  double mu_of(int level, QueueSize x) const;

 private:
  QueueReactiveParams p_;
};

/// Replaces the price-move rates of a base model, delegating everything else.
class PriceRateOverride final : public RateModel {
 public:
  enum class Mode {
    Frozen,       // u = d = 0
    Constant,     // u = up, d = down
    MidChasing,   // u = th0 + th1 max(0, a (i_mid - 1/2)), d = th0 + th1 max(0, -a (i_mid + 1/2))
  };

  PriceRateOverride(std::shared_ptr<const RateModel> base, Mode mode, double a = 0.0, double b = 0.0);

  std::string_view name() const override { return name_; }
  const BookParams& book() const override { return base_->book(); }
  double rate(Direction dir, int i, const BookView& v, QueueSize n) const override {
    return base_->rate(dir, i, v, n);
  }
  QueueSize max_jump_size(Direction dir, int i, const BookView& v) const override {
    return base_->max_jump_size(dir, i, v);
  }
  double size_radius() const override { return base_->size_radius(); }
  double up_rate(const BookView& v) const override;
  double down_rate(const BookView& v) const override;
  double reinit_probability() const override { return base_->reinit_probability(); }
  const BoundaryDistribution& upper_fill() const override { return base_->upper_fill(); }
  const BoundaryDistribution& lower_fill() const override { return base_->lower_fill(); }
  const BookDistribution& reinit_after_up() const override { return base_->reinit_after_up(); }
  const BookDistribution& reinit_after_down() const override { return base_->reinit_after_down(); }
  bool admits(const OrderBookState& q) const override { return base_->admits(q); }
  bool restricts_space() const override { return base_->restricts_space(); }

  const RateModel& base() const noexcept { return *base_; }

 private:
  std::shared_ptr<const RateModel> base_;
  Mode mode_;
  double a_;
  double b_;
  std::string name_;
};

/// Pure-jump dynamics only (u = d = 0).
std::shared_ptr<const RateModel> freeze_price(std::shared_ptr<const RateModel> base);
/// Constant price-move rates, irrespective of the book.
std::shared_ptr<const RateModel> with_constant_price_rates(std::shared_ptr<const RateModel> base, double up,
                                                           double down);
/// Reference price chasing the mid: theta0 is the exogenous part, theta1 the
/// intensity of the pull towards the mid price.
std::shared_ptr<const RateModel> with_mid_chasing(std::shared_ptr<const RateModel> base, double theta0,
                                                  double theta1);

}  // namespace lob
