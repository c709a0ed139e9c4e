#include "livsic/interval_maps.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "livsic/errors.hpp"

namespace livsic {

namespace {

constexpr double kEndpointTol = 1e-12;
constexpr double kOvershootTol = 1e-15;
constexpr double kInverseTol = 1e-12;
constexpr int kMaxInverseIterations = 200;

void validate_branch(const Branch& b) {
  if (b.domain.is_empty()) throw StructuralError("branch '" + b.label + "' has an empty domain");
  if (!b.forward || !b.derivative) {
    throw StructuralError("branch '" + b.label + "' needs forward and derivative functions");
  }
  if (std::abs(b.forward(b.domain.lo) - b.image.lo) > kEndpointTol ||
      std::abs(b.forward(b.domain.hi) - b.image.hi) > kEndpointTol) {
    throw StructuralError("branch '" + b.label + "' does not map its domain endpoints onto " +
                          b.image.to_string());
  }
  // sampled sign of the derivative at interior points
  constexpr int kSamples = 257;
  for (int i = 1; i < kSamples; ++i) {
    const double x = b.domain.lo + (b.domain.hi - b.domain.lo) * i / kSamples;
    if (!(b.derivative(x) > 0.0)) {
      throw StructuralError("branch '" + b.label + "' is not increasing near x=" +
                            std::to_string(x));
    }
  }
}

void validate_partition(const std::vector<Branch>& branches) {
  std::vector<const Interval*> doms;
  for (const auto& b : branches) doms.push_back(&b.domain);
  std::sort(doms.begin(), doms.end(), [](auto* a, auto* b) { return a->lo < b->lo; });
  if (doms.front()->lo != 0.0 || doms.front()->lo_open) {
    throw StructuralError("branch domains must start at a closed 0");
  }
  if (doms.back()->hi != 1.0 || doms.back()->hi_open) {
    throw StructuralError("branch domains must end at a closed 1");
  }
  for (std::size_t i = 0; i + 1 < doms.size(); ++i) {
    const Interval& a = *doms[i];
    const Interval& b = *doms[i + 1];
    if (a.hi != b.lo) throw StructuralError("branch domains leave a gap or overlap at " + std::to_string(a.hi));
    if (a.hi_open == b.lo_open) {
      throw StructuralError("shared endpoint " + std::to_string(a.hi) +
                            " must be owned by exactly one branch");
    }
  }
}

}  // namespace

PiecewiseMap::PiecewiseMap(std::string name, std::vector<Branch> branches,
                           std::optional<double> alpha)
    : name_(std::move(name)), branches_(std::move(branches)), alpha_(alpha) {
  if (branches_.empty()) throw StructuralError("a piecewise map needs at least one branch");
  if (branches_.size() > std::numeric_limits<Symbol>::max()) {
    throw StructuralError("too many branches");
  }
  for (const auto& b : branches_) validate_branch(b);
  validate_partition(branches_);
}

Symbol PiecewiseMap::symbol_of(std::string_view label) const {
  for (std::size_t i = 0; i < branches_.size(); ++i) {
    if (branches_[i].label == label) return static_cast<Symbol>(i);
  }
  throw DomainError("no branch labelled '" + std::string(label) + "' in map " + name_);
}

Symbol PiecewiseMap::owner(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("point " + std::to_string(x) + " outside [0,1]");
  }
  for (std::size_t i = 0; i < branches_.size(); ++i) {
    if (branches_[i].domain.contains(x)) return static_cast<Symbol>(i);
  }
  throw InternalError("no branch owns " + std::to_string(x));
}

bool PiecewiseMap::full_branched() const noexcept {
  return std::all_of(branches_.begin(), branches_.end(), [](const Branch& b) {
    return b.image.lo == 0.0 && b.image.hi == 1.0;
  });
}

std::string PiecewiseMap::describe() const {
  std::ostringstream os;
  os << name_;
  if (alpha_) {
    os.precision(17);
    os << "(alpha=" << *alpha_ << ")";
  }
  return os.str();
}

PiecewiseMap lsv_map(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ParameterError("LSV exponent alpha must lie in (0,1), got " + std::to_string(alpha));
  }
  // (2x)^a == 2^a x^a, written so that T(1/2) == 1 exactly
  Branch left{"L", Interval::closed(0.0, 0.5), Interval::closed(0.0, 1.0),
              [alpha](double x) { return x * (1.0 + std::pow(2.0 * x, alpha)); },
              [alpha](double x) { return 1.0 + (1.0 + alpha) * std::pow(2.0 * x, alpha); },
              {}};
  Branch right{"R", Interval::left_open(0.5, 1.0), Interval::left_open(0.0, 1.0),
               [](double x) { return 2.0 * x - 1.0; }, [](double) { return 2.0; },
               [](double y) { return 0.5 * (y + 1.0); }};
  return PiecewiseMap("lsv", {std::move(left), std::move(right)}, alpha);
}

PiecewiseMap doubling_map() {
  Branch left{"L", Interval::closed(0.0, 0.5), Interval::closed(0.0, 1.0),
              [](double x) { return 2.0 * x; }, [](double) { return 2.0; },
              [](double y) { return 0.5 * y; }};
  Branch right{"R", Interval::left_open(0.5, 1.0), Interval::left_open(0.0, 1.0),
               [](double x) { return 2.0 * x - 1.0; }, [](double) { return 2.0; },
               [](double y) { return 0.5 * (y + 1.0); }};
  return PiecewiseMap("doubling", {std::move(left), std::move(right)});
}

double evaluate(const PiecewiseMap& map, double x) {
  const double y = map.branch(map.owner(x)).forward(x);
  if (y >= 0.0 && y <= 1.0) return y;
  if (y < 0.0 && y > -kOvershootTol) return 0.0;
  if (y > 1.0 && y < 1.0 + kOvershootTol) return 1.0;
  throw InternalError("T(" + std::to_string(x) + ") = " + std::to_string(y) + " leaves [0,1]");
}

double dithered_step(const PiecewiseMap& map, double x, RngStream& noise) {
  const double y = evaluate(map, x) + (2.0 * noise.uniform() - 1.0) * 0x1.0p-53;
  return std::clamp(y, 0.0, 1.0);
}

double derivative(const PiecewiseMap& map, double x) {
  return map.branch(map.owner(x)).derivative(x);
}

double solve_increasing(const Branch& b, double y) {
  if (!b.image.contains_closure(y)) {
    throw RangeError("y=" + std::to_string(y) + " outside image " + b.image.to_string() +
                     " of branch '" + b.label + "'");
  }
  double lo = b.domain.lo;
  double hi = b.domain.hi;
  if (y <= b.image.lo) return lo;
  if (y >= b.image.hi) return hi;

  double x = lo + (y - b.image.lo) * (hi - lo) / (b.image.hi - b.image.lo);
  double best_x = x;
  double best_r = std::numeric_limits<double>::infinity();
  for (int it = 0; it < kMaxInverseIterations; ++it) {
    const double r = b.forward(x) - y;
    if (std::abs(r) < best_r) {
      best_r = std::abs(r);
      best_x = x;
    }
    if (r == 0.0) return x;
    if (r < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    double next = x - r / b.derivative(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    if (step <= 2.0 * DBL_EPSILON * std::abs(x) || step < DBL_MIN || next == lo || next == hi) {
      const double rn = std::abs(b.forward(next) - y);
      if (rn < best_r) {
        best_r = rn;
        best_x = next;
      }
      if (best_r <= kInverseTol) return best_x;
    }
    x = next;
  }
  if (best_r <= kInverseTol) return best_x;
  throw NumericError("inverse of branch '" + b.label + "' at y=" + std::to_string(y) +
                     " did not converge");
}

double inverse_branch(const PiecewiseMap& map, Symbol s, double y) {
  const Branch& b = map.branch(s);
  if (b.inverse) {
    if (!b.image.contains_closure(y)) {
      throw RangeError("y=" + std::to_string(y) + " outside image " + b.image.to_string() +
                       " of branch '" + b.label + "'");
    }
    return b.inverse(y);
  }
  return solve_increasing(b, y);
}

double inverse_branch(const PiecewiseMap& map, std::string_view label, double y) {
  return inverse_branch(map, map.symbol_of(label), y);
}

Orbit orbit(const PiecewiseMap& map, double x0, std::size_t n) {
  Orbit o;
  o.points.reserve(n + 1);
  o.itinerary.reserve(n);
  o.points.push_back(x0);
  double x = x0;
  for (std::size_t k = 0; k < n; ++k) {
    o.itinerary.push_back(map.owner(x));
    x = evaluate(map, x);
    o.points.push_back(x);
  }
  if (n == 0) map.owner(x0);  // domain check
  return o;
}

}  // namespace livsic
