#pragma once

#include <limits>
#include <memory>
#include <vector>

#include "lob/core.hpp"
#include "lob/rng.hpp"

namespace lob {

/// Law of the queue size written into the boundary limit after a frame shift
/// (pi_K after an up move, pi_{-K} after a down move).
class BoundaryDistribution {
 public:
  virtual ~BoundaryDistribution() = default;
  virtual QueueSize sample(Rng& rng) const = 0;
  virtual double pmf(QueueSize l) const = 0;
  /// Mass of {l : clamp(l, -cap, cap) == l_clamped}.
  virtual double clamped_pmf(QueueSize l_clamped, QueueSize cap) const = 0;
  /// Supremum of z with E[z^|l|] finite.
  virtual double moment_radius() const { return std::numeric_limits<double>::infinity(); }
};

/// Law of a freshly drawn book after a price move with reinitialisation
/// (pi^inc after an up move, pi^dec after a down move).
class BookDistribution {
 public:
  virtual ~BookDistribution() = default;
  virtual int depth() const = 0;
  /// Writes a draw into `out`, which must already have depth K.
  virtual void sample(Rng& rng, OrderBookState& out) const = 0;
  virtual double pmf(const OrderBookState& q) const = 0;
  /// Mass of the states whose coordinate-wise clamp to [-cap, cap] equals q.
  virtual double clamped_pmf(const OrderBookState& q, QueueSize cap) const = 0;
  virtual double moment_radius() const { return std::numeric_limits<double>::infinity(); }
};

/// Geometric on {0, 1, 2, ...} with success probability p, times a sign.
/// pmf(sign * l) = p (1 - p)^l.
class SignedGeometric final : public BoundaryDistribution {
 public:
  SignedGeometric(double p, int sign);

  QueueSize sample(Rng& rng) const override;
  double pmf(QueueSize l) const override;
  double clamped_pmf(QueueSize l_clamped, QueueSize cap) const override;
  /// 1 / (1 - p).
  double moment_radius() const override;

  double success_probability() const noexcept { return p_; }
  int sign() const noexcept { return sign_; }

  /// E[z^|l|] in closed form (infinite at or beyond the radius).
  double exact_moment(double z) const noexcept;

 private:
  double p_;
  int sign_;
};

/// Independent geometric magnitudes per limit, with bid signs left of the
/// reference price and ask signs right of it. Every draw lies in the restricted
/// space {q_i <= 0 for i < 0, q_i >= 0 for i > 0}, a subset of the state space.
class ProductGeometricBook final : public BookDistribution {
 public:
  /// One success probability per slot (size 2K), or a single value for all.
  ProductGeometricBook(int K, std::vector<double> p);
  ProductGeometricBook(int K, double p) : ProductGeometricBook(K, std::vector<double>(2 * K, p)) {}

  int depth() const override { return K_; }
  void sample(Rng& rng, OrderBookState& out) const override;
  double pmf(const OrderBookState& q) const override;
  double clamped_pmf(const OrderBookState& q, QueueSize cap) const override;
  double moment_radius() const override;

  const SignedGeometric& marginal(int i) const { return marginals_[static_cast<std::size_t>(slot_of(i, K_))]; }

 private:
  int K_;
  std::vector<SignedGeometric> marginals_;
};

}  // namespace lob
