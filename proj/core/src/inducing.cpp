#include "livsic/inducing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "livsic/errors.hpp"
#include "livsic/numerics.hpp"

namespace livsic {

namespace {

double sampled_inf_derivative(const Branch& b) {
  constexpr int kSamples = 1024;
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kSamples; ++i) {
    const double x = b.domain.lo + (b.domain.hi - b.domain.lo) * i / kSamples;
    m = std::min(m, b.derivative(x));
  }
  return m;
}

}  // namespace

std::size_t return_time(const PiecewiseMap& map, const Interval& y_set, double x, std::size_t cap) {
  if (!y_set.contains(x)) {
    throw DomainError("return_time: " + std::to_string(x) + " is not in " + y_set.to_string());
  }
  std::vector<double> partial{x};
  for (std::size_t n = 1; n <= cap; ++n) {
    x = evaluate(map, x);
    if (y_set.contains(x)) return n;
    partial.push_back(x);
  }
  throw ReturnNotResolvedError("first return not reached within " + std::to_string(cap) + " steps",
                               std::move(partial));
}

InducedSystem induce(const PiecewiseMap& map, const Interval& y_set, std::size_t n_max) {
  if (n_max == 0) throw PreconditionError("induce: n_max must be positive");
  if (map.size() != 2 || !map.full_branched()) {
    throw StructuralError("induce: the return map is only constructed for two-branch full maps");
  }
  std::optional<Symbol> ret;
  for (Symbol s = 0; s < 2; ++s) {
    const Interval& d = map.branch(s).domain;
    if (d.lo == y_set.lo && d.hi == y_set.hi && d.lo_open == y_set.lo_open &&
        d.hi_open == y_set.hi_open && d.hi == 1.0) {
      ret = s;
    }
  }
  if (!ret) {
    throw StructuralError("induce: Y=" + y_set.to_string() +
                          " must be the domain of the right branch, otherwise the return "
                          "branches are not produced by this construction");
  }
  const Symbol exc = *ret == 0 ? 1 : 0;
  const Branch& e = map.branch(exc);
  if (e.domain.lo != 0.0 || e.domain.hi != y_set.lo || e.forward(0.0) != 0.0) {
    throw StructuralError("induce: the excursion branch must fix 0 and end at inf Y");
  }

  InducedSystem sys(map, y_set);
  sys.n_max_ = n_max;
  sys.ret_ = *ret;
  sys.exc_ = exc;
  sys.boundary_ = {1.0, y_set.lo};
  sys.cell_lower_ = {y_set.hi, inverse_branch(map, *ret, y_set.lo)};
  for (std::size_t n = 2; n <= n_max; ++n) {
    const double x = inverse_branch(map, exc, sys.boundary_.back());
    const double c = inverse_branch(map, *ret, x);
    if (!(x < sys.boundary_.back()) || !(c < sys.cell_lower_.back())) break;
    sys.boundary_.push_back(x);
    sys.cell_lower_.push_back(c);
  }
  sys.lambda_ = sampled_inf_derivative(map.branch(*ret)) * std::min(1.0, sampled_inf_derivative(e));
  return sys;
}

Interval InducedSystem::cell(std::size_t n) const {
  if (n == 0 || n > resolved()) {
    throw DomainError("cell index " + std::to_string(n) + " outside 1.." + std::to_string(resolved()));
  }
  Interval c = Interval::left_open(cell_lower_[n], cell_lower_[n - 1]);
  if (n == 1) c.hi_open = y_.hi_open;
  return c;
}

Interval InducedSystem::unresolved_tail() const {
  return Interval{y_.lo, cell_lower_.back(), y_.lo_open, false};
}

std::optional<std::size_t> InducedSystem::cell_of(double y) const {
  if (!y_.contains(y)) throw DomainError(std::to_string(y) + " is not in " + y_.to_string());
  // cell_lower_ is decreasing; first n >= 1 with c_n < y
  const auto first = cell_lower_.begin() + 1;
  const auto it = std::partition_point(first, cell_lower_.end(), [y](double c) { return c >= y; });
  if (it == cell_lower_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - cell_lower_.begin());
}

double InducedSystem::apply(std::size_t n, double y) const {
  double z = map_.branch(ret_).forward(y);
  const auto& step = map_.branch(exc_).forward;
  for (std::size_t k = 1; k < n; ++k) z = step(z);
  return z;
}

double InducedSystem::derivative(std::size_t n, double y) const {
  const Branch& r = map_.branch(ret_);
  const Branch& e = map_.branch(exc_);
  double d = r.derivative(y);
  double z = r.forward(y);
  for (std::size_t k = 1; k < n; ++k) {
    d *= e.derivative(z);
    z = e.forward(z);
  }
  return d;
}

double InducedSystem::inverse(std::size_t n, double z) const {
  for (std::size_t k = 1; k < n; ++k) z = inverse_branch(map_, exc_, z);
  return inverse_branch(map_, ret_, z);
}

std::size_t InducedSystem::return_time_of(double y) const {
  if (auto n = cell_of(y)) return *n;
  return return_time(map_, y_, y, 100 * n_max_ + 1000);
}

double InducedSystem::induced(double y) const { return apply(return_time_of(y), y); }

std::vector<Branch> InducedSystem::cells(std::size_t n_cells) const {
  const std::size_t count = std::min(n_cells, resolved());
  std::vector<Branch> out;
  out.reserve(count);
  const Branch r = map_.branch(ret_);
  const Branch e = map_.branch(exc_);
  const PiecewiseMap map = map_;
  const Symbol ret = ret_, exc = exc_;
  for (std::size_t n = 1; n <= count; ++n) {
    Branch b;
    b.label = "B" + std::to_string(n);
    b.domain = cell(n);
    b.image = y_;
    b.forward = [r, e, n](double y) {
      double z = r.forward(y);
      for (std::size_t k = 1; k < n; ++k) z = e.forward(z);
      return z;
    };
    b.derivative = [r, e, n](double y) {
      double d = r.derivative(y);
      double z = r.forward(y);
      for (std::size_t k = 1; k < n; ++k) {
        d *= e.derivative(z);
        z = e.forward(z);
      }
      return d;
    };
    b.inverse = [map, ret, exc, n](double z) {
      for (std::size_t k = 1; k < n; ++k) z = inverse_branch(map, exc, z);
      return inverse_branch(map, ret, z);
    };
    out.push_back(std::move(b));
  }
  return out;
}

double induced_metric(const InducedSystem& system, double x, double y) {
  if (x == y) return 0.0;
  const std::size_t nx = system.return_time_of(x);
  const std::size_t ny = system.return_time_of(y);
  if (nx != ny) return system.expansion() * system.diameter();
  return std::abs(system.apply(nx, x) - system.apply(nx, y));
}

double InducedObservable::on_cell(std::size_t n, double y) const {
  const PiecewiseMap& map = system_->base_map();
  const Branch& r = map.branch(system_->return_branch());
  const Branch& e = map.branch(system_->excursion_branch());
  CompensatedSum s;
  s += f_(y);
  double z = r.forward(y);
  for (std::size_t k = 1; k < n; ++k) {
    s += f_(z);
    z = e.forward(z);
  }
  return s.value();
}

double InducedObservable::operator()(double y) const {
  return on_cell(system_->return_time_of(y), y);
}

InducedObservable induced_observable(const InducedSystem& system, const Observable& f,
                                     std::size_t n_cells, std::size_t samples, std::uint64_t seed) {
  const PiecewiseMap& map = system.base_map();
  if (f.seminorms.size() != map.size()) {
    throw PreconditionError("observable seminorms do not match the branches of the base map");
  }
  InducedObservable fy(system, f);
  double inf_derivative = std::numeric_limits<double>::infinity();
  for (const Branch& b : map.branches()) inf_derivative = std::min(inf_derivative, sampled_inf_derivative(b));
  // |T^k x - T^k y| <= C |T^n x - T^n y| along an excursion
  const double contraction = std::max(1.0, 1.0 / inf_derivative);
  const double gamma = f.holder_exponent;
  const double df_ret = f.seminorms[system.return_branch()];
  const double df_exc = f.seminorms[system.excursion_branch()];

  const std::size_t count = std::min(n_cells, system.resolved());
  fy.seminorms_.resize(count);
  const CounterRng rng(seed);
  parallel_for(count, [&](std::size_t i) {
    const std::size_t n = i + 1;
    InducedSeminorm s;
    s.n = n;
    s.chain_bound = std::pow(contraction, gamma) * (df_ret + static_cast<double>(n - 1) * df_exc);
    const Interval c = system.cell(n);
    const CounterRng local = rng.substream(n);
    for (std::size_t j = 0; j < samples; ++j) {
      const double u = c.lo + c.length() * local.uniform_open(2 * j);
      const double v = c.lo + c.length() * local.uniform_open(2 * j + 1);
      const double d = std::abs(system.apply(n, u) - system.apply(n, v));
      if (d == 0.0) continue;
      s.sampled = std::max(s.sampled, std::abs(fy.on_cell(n, u) - fy.on_cell(n, v)) / std::pow(d, gamma));
    }
    fy.seminorms_[i] = s;
  }, 1);
  return fy;
}

YoungTower tower_of(const InducedSystem& system, const YoungTower::Measure& measure) {
  YoungTower t(system.base_map());
  t.ret_ = system.return_branch();
  t.exc_ = system.excursion_branch();
  t.boundary_.assign(system.boundary_points().begin(), system.boundary_points().end());
  t.cell_lower_.resize(system.resolved() + 1);
  t.cell_lower_[0] = system.base().hi;
  for (std::size_t n = 1; n <= system.resolved(); ++n) {
    t.cell_lower_[n] = system.cell(n).lo;
    t.base_measure_.push_back(measure(system.cell(n)));
  }
  t.tail_measure_ = measure(system.unresolved_tail());
  return t;
}

Interval YoungTower::level(std::size_t n, std::size_t k) const {
  if (n == 0 || n > columns() || k >= n) {
    throw DomainError("tower level (" + std::to_string(k) + "," + std::to_string(n) + ") does not exist");
  }
  if (k == 0) {
    Interval c = Interval::left_open(cell_lower_[n], cell_lower_[n - 1]);
    return c;
  }
  return Interval::left_open(boundary_[n - k + 1], boundary_[n - k]);
}

std::size_t YoungTower::level_count() const noexcept {
  const std::size_t n = columns();
  return n * (n + 1) / 2;
}

double YoungTower::kac_sum() const noexcept {
  CompensatedSum s;
  for (std::size_t n = 1; n <= columns(); ++n) s += static_cast<double>(n) * base_measure_[n - 1];
  return s.value();
}

double YoungTower::advance(std::size_t n, std::size_t k, double x, std::size_t steps) const {
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t lvl = (k + s) % n;
    x = map_.branch(lvl == 0 ? ret_ : exc_).forward(x);
  }
  return x;
}

double YoungTower::step_derivative(std::size_t n, std::size_t k, double x) const {
  return map_.branch(k % n == 0 ? ret_ : exc_).derivative(x);
}

}  // namespace livsic
