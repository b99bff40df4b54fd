#include "lob/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lob {

SignedGeometric::SignedGeometric(double p, int sign) : p_(p), sign_(sign >= 0 ? 1 : -1) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("geometric success probability must lie in (0, 1]");
}

QueueSize SignedGeometric::sample(Rng& rng) const {
  // Inversion: floor(log U / log(1 - p)) with U in (0, 1]. Always consumes one draw.
  const double u = uniform_open_closed(rng);
  if (p_ >= 1.0) return 0;
  const double l = std::floor(std::log(u) / std::log1p(-p_));
  return sign_ * static_cast<QueueSize>(l);
}

double SignedGeometric::pmf(QueueSize l) const {
  if ((sign_ > 0 && l < 0) || (sign_ < 0 && l > 0)) return 0.0;
  const auto m = static_cast<double>(l < 0 ? -l : l);
  if (p_ >= 1.0) return m == 0.0 ? 1.0 : 0.0;
  return p_ * std::exp(m * std::log1p(-p_));
}

double SignedGeometric::clamped_pmf(QueueSize l_clamped, QueueSize cap) const {
  const QueueSize m = l_clamped < 0 ? -l_clamped : l_clamped;
  if (m > cap) return 0.0;
  if (m < cap) return pmf(l_clamped);
  if ((sign_ > 0 && l_clamped < 0) || (sign_ < 0 && l_clamped > 0)) return 0.0;
  // tail P(|l| >= cap) = (1 - p)^cap
  if (p_ >= 1.0) return cap == 0 ? 1.0 : 0.0;
  return std::exp(static_cast<double>(cap) * std::log1p(-p_));
}

double SignedGeometric::moment_radius() const {
  if (p_ >= 1.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (1.0 - p_);
}

double SignedGeometric::exact_moment(double z) const noexcept {
  const double q = 1.0 - p_;
  if (q * z >= 1.0) return std::numeric_limits<double>::infinity();
  return p_ / (1.0 - q * z);
}

ProductGeometricBook::ProductGeometricBook(int K, std::vector<double> p) : K_(K) {
  if (K < 1) throw std::invalid_argument("K >= 1 required");
  if (p.size() == 1) p.assign(static_cast<std::size_t>(2 * K), p.front());
  if (p.size() != static_cast<std::size_t>(2 * K))
    throw std::invalid_argument("reinitialisation distribution needs 1 or 2K success probabilities");
  marginals_.reserve(p.size());
  for (int s = 0; s < 2 * K; ++s)
    marginals_.emplace_back(p[static_cast<std::size_t>(s)], index_of_slot(s, K) < 0 ? -1 : 1);
}

void ProductGeometricBook::sample(Rng& rng, OrderBookState& out) const {
  auto slots = out.mutable_slots();
  for (std::size_t s = 0; s < marginals_.size(); ++s) slots[s] = marginals_[s].sample(rng);
}

double ProductGeometricBook::pmf(const OrderBookState& q) const {
  double p = 1.0;
  const auto slots = q.slots();
  for (std::size_t s = 0; s < marginals_.size(); ++s) p *= marginals_[s].pmf(slots[s]);
  return p;
}

double ProductGeometricBook::clamped_pmf(const OrderBookState& q, QueueSize cap) const {
  double p = 1.0;
  const auto slots = q.slots();
  for (std::size_t s = 0; s < marginals_.size(); ++s) p *= marginals_[s].clamped_pmf(slots[s], cap);
  return p;
}

double ProductGeometricBook::moment_radius() const {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& m : marginals_) r = std::min(r, m.moment_radius());
  return r;
}

}  // namespace lob
