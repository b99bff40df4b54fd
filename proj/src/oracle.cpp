#include "lob/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include "lob/scan.hpp"

namespace lob {

const char* to_string(PriceMode m) noexcept { return m == PriceMode::Frozen ? "frozen" : "collapsed"; }

namespace {

OrderBookState clamp_state(const OrderBookState& q, QueueSize cap) {
  OrderBookState out = q;
  for (auto& x : out.mutable_slots()) x = std::clamp(x, -cap, cap);
  return out;
}

}  // namespace

std::size_t TruncatedGenerator::find_projected(const OrderBookState& q) const {
  const auto it = index.find(clamp_state(q, cap));
  return it == index.end() ? states.size() : it->second;
}

TruncatedGenerator truncated_generator(const RateModel& model, QueueSize cap, PriceMode mode,
                                       std::size_t max_states) {
  if (cap < 0) throw std::invalid_argument("truncation cap must be nonnegative");
  const int K = model.book().K;
  const std::uint64_t count = count_box_states(K, cap);
  if (count > max_states) {
    std::ostringstream os;
    os << "truncation at cap " << cap << " has " << count << " states, above the bound " << max_states;
    throw StateSpaceTooLarge(static_cast<std::size_t>(count), max_states, os.str());
  }

  TruncatedGenerator gen;
  gen.cap = cap;
  gen.mode = mode;
  const StateScan scan(K, cap, {}, &model);
  for (std::size_t c = 0; c < scan.chunk_count(); ++c)
    scan.for_each_in_chunk(c, [&](const OrderBookState& q) { gen.states.push_back(q); });
  const std::size_t n = gen.states.size();
  gen.index.reserve(n);
  for (std::size_t k = 0; k < n; ++k) gen.index.emplace(gen.states[k], k);

  const double th = model.reinit_probability();
  std::vector<std::pair<std::size_t, double>> redraw_up, redraw_down;
  if (mode == PriceMode::Collapsed && th > 0.0) {
    for (std::size_t k = 0; k < n; ++k) {
      const double wu = model.reinit_after_up().clamped_pmf(gen.states[k], cap);
      const double wd = model.reinit_after_down().clamped_pmf(gen.states[k], cap);
      if (wu > 0.0) redraw_up.emplace_back(k, wu);
      if (wd > 0.0) redraw_down.emplace_back(k, wd);
    }
    const double dense = static_cast<double>(std::max(redraw_up.size(), redraw_down.size())) * static_cast<double>(n);
    if (dense > 5e7) {
      std::ostringstream os;
      os << "collapsed redraw rows would hold about " << dense << " entries for " << n << " states";
      throw StateSpaceTooLarge(n, max_states, os.str());
    }
  }

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(n * static_cast<std::size_t>(4 * K + 1));
  std::vector<Transition> buf;
  std::vector<double> diag(n, 0.0);
  auto add = [&](std::size_t from, const OrderBookState& to, double rate) {
    const auto it = gen.index.find(to);
    if (it == gen.index.end() || it->second == from || !(rate > 0.0)) return;
    trips.emplace_back(static_cast<int>(from), static_cast<int>(it->second), rate);
    diag[from] -= rate;
  };

  for (std::size_t x = 0; x < n; ++x) {
    const OrderBookState& q = gen.states[x];
    const BookView v(q);
    buf.clear();
    enumerate_transitions(model, v, buf, false);
    for (const auto& tr : buf) {
      OrderBookState to = q;
      to.at_index(tr.event.index) += tr.event.kind == EventKind::Increase ? tr.event.size : -tr.event.size;
      add(x, clamp_state(to, cap), tr.rate);
    }
    if (mode == PriceMode::Frozen) continue;
    for (const bool up : {true, false}) {
      const double rate = up ? model.up_rate(v) : model.down_rate(v);
      if (!(rate > 0.0)) continue;
      if (th < 1.0) {
        const BoundaryDistribution& fill = up ? model.upper_fill() : model.lower_fill();
        for (QueueSize l = -cap; l <= cap; ++l) {
          const double w = fill.clamped_pmf(l, cap);
          if (!(w > 0.0)) continue;
          OrderBookState to = q;
          if (up)
            shift_up(to, l);
          else
            shift_down(to, l);
          add(x, to, rate * (1.0 - th) * w);
        }
      }
      if (th > 0.0)
        for (const auto& [y, w] : up ? redraw_up : redraw_down) add(x, gen.states[y], rate * th * w);
    }
  }
  for (std::size_t x = 0; x < n; ++x)
    if (diag[x] != 0.0) trips.emplace_back(static_cast<int>(x), static_cast<int>(x), diag[x]);
  gen.Q.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  gen.Q.setFromTriplets(trips.begin(), trips.end());
  gen.Q.makeCompressed();
  return gen;
}

std::vector<std::vector<std::size_t>> closed_classes(const Eigen::SparseMatrix<double, Eigen::RowMajor>& Q) {
  const auto n = static_cast<std::size_t>(Q.rows());
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> idx(n, kUnset), low(n, 0), comp(n, kUnset);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> comps;
  std::size_t counter = 0;

  auto neighbours = [&](std::size_t x) {
    std::vector<std::size_t> out;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Q, static_cast<Eigen::Index>(x)); it; ++it)
      if (static_cast<std::size_t>(it.col()) != x && it.value() > 0.0) out.push_back(static_cast<std::size_t>(it.col()));
    return out;
  };

  // Iterative Tarjan.
  struct Frame {
    std::size_t v;
    std::vector<std::size_t> next;
    std::size_t pos;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (idx[root] != kUnset) continue;
    std::vector<Frame> call;
    call.push_back({root, neighbours(root), 0});
    idx[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.pos < f.next.size()) {
        const std::size_t w = f.next[f.pos++];
        if (idx[w] == kUnset) {
          idx[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, neighbours(w), 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], idx[w]);
        }
        continue;
      }
      const std::size_t v = f.v;
      if (low[v] == idx[v]) {
        std::vector<std::size_t> members;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = comps.size();
          members.push_back(w);
        } while (w != v);
        std::sort(members.begin(), members.end());
        comps.push_back(std::move(members));
      }
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
    }
  }

  std::vector<char> leaves(comps.size(), 0);
  for (std::size_t x = 0; x < n; ++x)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Q, static_cast<Eigen::Index>(x)); it; ++it) {
      const auto y = static_cast<std::size_t>(it.col());
      if (y != x && it.value() > 0.0 && comp[y] != comp[x]) leaves[comp[x]] = 1;
    }
  std::vector<std::vector<std::size_t>> closed;
  for (std::size_t c = 0; c < comps.size(); ++c)
    if (!leaves[c]) closed.push_back(comps[c]);
  std::sort(closed.begin(), closed.end());
  return closed;
}

StationaryResult stationary_solve(const Eigen::SparseMatrix<double, Eigen::RowMajor>& Q, double tolerance) {
  const auto n = static_cast<std::size_t>(Q.rows());
  if (n == 0) throw std::invalid_argument("empty generator");
  auto classes = closed_classes(Q);
  if (classes.size() != 1) {
    std::ostringstream os;
    os << "generator has " << classes.size() << " closed communicating classes";
    throw Reducible(std::move(classes), os.str());
  }
  const auto& C = classes.front();
  const std::size_t m = C.size();
  constexpr std::size_t kOut = static_cast<std::size_t>(-1);
  std::vector<std::size_t> local(n, kOut);
  for (std::size_t k = 0; k < m; ++k) local[C[k]] = k;

  // A = Q_C^T with the last equation replaced by sum(pi) = 1.
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t x = C[k];
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Q, static_cast<Eigen::Index>(x)); it; ++it) {
      const std::size_t y = local[static_cast<std::size_t>(it.col())];
      if (y == kOut || y == m - 1) continue;
      trips.emplace_back(static_cast<int>(y), static_cast<int>(k), it.value());
    }
    trips.emplace_back(static_cast<int>(m - 1), static_cast<int>(k), 1.0);
  }
  Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  b[static_cast<Eigen::Index>(m - 1)] = 1.0;

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw IllConditioned(std::nan(""), "sparse LU factorisation failed");
  Eigen::VectorXd x = lu.solve(b);
  const Eigen::VectorXd r = b - A * x;
  x += lu.solve(r);

  StationaryResult out;
  out.transient_states = n - m;
  out.pi.assign(n, 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double v = std::max(0.0, x[static_cast<Eigen::Index>(k)]);
    out.pi[C[k]] = v;
    total += v;
  }
  if (!(total > 0.0)) throw IllConditioned(std::nan(""), "stationary solve returned no mass");
  for (double& p : out.pi) p /= total;

  std::vector<double> res(n, 0.0);
  double qmax = 0.0;
  for (std::size_t row = 0; row < n; ++row)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Q, static_cast<Eigen::Index>(row)); it; ++it) {
      res[static_cast<std::size_t>(it.col())] += out.pi[row] * it.value();
      qmax = std::max(qmax, std::abs(it.value()));
    }
  double rmax = 0.0;
  for (double v : res) rmax = std::max(rmax, std::abs(v));
  out.relative_residual = qmax > 0.0 ? rmax / qmax : 0.0;
  if (!(out.relative_residual < tolerance)) {
    std::ostringstream os;
    os << "stationary residual " << out.relative_residual << " exceeds " << tolerance;
    throw IllConditioned(out.relative_residual, os.str());
  }
  return out;
}

StationaryResult stationary_solve(const TruncatedGenerator& gen, double tolerance) {
  return stationary_solve(gen.Q, tolerance);
}

ProjectedOccupation project_occupation(const TruncatedGenerator& gen, const Occupation& occupation,
                                       OccupationProjection how) {
  ProjectedOccupation out;
  out.p.assign(gen.size(), 0.0);
  double total = 0.0;
  for (const auto& [q, w] : occupation) total += w;
  const bool uniform = !(total > 0.0);
  for (const auto& [q, w0] : occupation) {
    const double w = uniform ? 1.0 : w0;
    auto it = gen.index.find(q);
    if (it != gen.index.end()) {
      out.p[it->second] += w;
      continue;
    }
    out.outside_mass += w;
    if (how == OccupationProjection::Clamp) {
      const std::size_t k = gen.find_projected(q);
      if (k < out.p.size()) out.p[k] += w;
    }
  }
  double kept = 0.0;
  for (double v : out.p) kept += v;
  const double all = uniform ? static_cast<double>(occupation.size()) : total;
  if (all > 0.0) out.outside_mass /= all;
  if (kept > 0.0)
    for (double& v : out.p) v /= kept;
  return out;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("distributions must have the same support");
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s += std::abs(p[k] - q[k]);
  return 0.5 * s;
}

std::vector<double> project_distribution(const TruncatedGenerator& fine, const std::vector<double>& pi,
                                         const TruncatedGenerator& coarse) {
  std::vector<double> out(coarse.size(), 0.0);
  for (std::size_t k = 0; k < fine.size(); ++k) {
    const std::size_t j = coarse.find_projected(fine.states[k]);
    if (j < out.size()) out[j] += pi[k];
  }
  return out;
}

namespace {

class BoxConfined final : public RateModel {
 public:
  BoxConfined(std::shared_ptr<const RateModel> base, QueueSize cap)
      : base_(std::move(base)), cap_(cap), name_(std::string(base_->name()) + "+box" + std::to_string(cap)) {}

  std::string_view name() const override { return name_; }
  const BookParams& book() const override { return base_->book(); }
  double rate(Direction dir, int i, const BookView& v, QueueSize n) const override {
    const QueueSize x = v.q[i];
    const QueueSize step = dir == Direction::Insert ? 1 : -1;
    const QueueSize target = x + step * n;
    if (std::abs(target) > cap_) return 0.0;
    double r = base_->rate(dir, i, v, n);
    // Overshooting jumps are folded into the one that reaches the cap.
    if (std::abs(target) == cap_ && std::abs(target) > std::abs(x)) {
      const QueueSize top = base_->max_jump_size(dir, i, v);
      for (QueueSize m = n + 1; m <= top; ++m) r += effective_rate(*base_, dir, i, v, m);
    }
    return r;
  }
  QueueSize max_jump_size(Direction dir, int i, const BookView& v) const override {
    return base_->max_jump_size(dir, i, v);
  }
  double size_radius() const override { return base_->size_radius(); }
  double up_rate(const BookView& v) const override { return base_->up_rate(v); }
  double down_rate(const BookView& v) const override { return base_->down_rate(v); }
  double reinit_probability() const override { return base_->reinit_probability(); }
  const BoundaryDistribution& upper_fill() const override { return base_->upper_fill(); }
  const BoundaryDistribution& lower_fill() const override { return base_->lower_fill(); }
  const BookDistribution& reinit_after_up() const override { return base_->reinit_after_up(); }
  const BookDistribution& reinit_after_down() const override { return base_->reinit_after_down(); }
  bool admits(const OrderBookState& q) const override {
    for (QueueSize x : q.slots())
      if (std::abs(x) > cap_) return false;
    return base_->admits(q);
  }
  bool restricts_space() const override { return true; }

 private:
  std::shared_ptr<const RateModel> base_;
  QueueSize cap_;
  std::string name_;
};

}  // namespace

std::shared_ptr<const RateModel> confine_to_box(std::shared_ptr<const RateModel> base, QueueSize cap) {
  if (cap < 0) throw std::invalid_argument("truncation cap must be nonnegative");
  return std::make_shared<BoxConfined>(std::move(base), cap);
}

}  // namespace lob
