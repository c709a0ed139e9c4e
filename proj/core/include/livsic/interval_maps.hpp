#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "livsic/interval.hpp"
#include "livsic/numerics.hpp"

namespace livsic {

/// Index of a branch within its PiecewiseMap; doubles as the partition symbol.
using Symbol = std::uint8_t;
using Word = std::vector<Symbol>;
using RealFn = std::function<double(double)>;

/// One monotone piece of an interval map.
///
/// `forward` must be strictly increasing on `domain` and carry the closure of
/// `domain` onto the closure of `image`. `inverse` is optional: when empty,
/// inverse_branch solves forward(x) = y by safeguarded Newton.
struct Branch {
  std::string label;
  Interval domain;
  Interval image;
  RealFn forward;
  RealFn derivative;
  RealFn inverse;
};

/// A self-map of [0,1] given by finitely many increasing branches whose
/// domains partition [0,1]. The open/closed ends of the branch domains encode
/// the boundary convention: every point belongs to exactly one branch.
/// Immutable after construction.
class PiecewiseMap {
 public:
  /// Validates the partition, monotonicity and endpoint images.
  /// Throws StructuralError on violation.
  PiecewiseMap(std::string name, std::vector<Branch> branches,
               std::optional<double> alpha = std::nullopt);

  const std::string& name() const noexcept { return name_; }
  std::optional<double> alpha() const noexcept { return alpha_; }
  std::span<const Branch> branches() const noexcept { return branches_; }
  std::size_t size() const noexcept { return branches_.size(); }
  const Branch& branch(Symbol s) const { return branches_.at(s); }

  /// Symbol of the branch with the given label; throws DomainError if absent.
  Symbol symbol_of(std::string_view label) const;

  /// Branch owning x. Throws DomainError when x is outside [0,1].
  Symbol owner(double x) const;

  /// True if every branch image is all of [0,1] up to its endpoints.
  bool full_branched() const noexcept;

  std::string describe() const;

 private:
  std::string name_;
  std::vector<Branch> branches_;
  std::optional<double> alpha_;
};

/// The intermittent map x(1+(2x)^alpha) on [0,1/2], 2x-1 on (1/2,1].
/// Throws ParameterError unless 0 < alpha < 1.
PiecewiseMap lsv_map(double alpha);

/// 2x on [0,1/2], 2x-1 on (1/2,1].
PiecewiseMap doubling_map();

double evaluate(const PiecewiseMap& map, double x);

/// T(x) plus a uniform perturbation in [-2^-53, 2^-53), clamped to [0,1].
/// Long statistical orbits use this: exact floating point orbits of maps
/// with dyadic branches (the doubling map) reach 0 or 1 within ~54 steps.
double dithered_step(const PiecewiseMap& map, double x, RngStream& noise);

/// Derivative of the owning branch at x.
double derivative(const PiecewiseMap& map, double x);

/// The unique x in the closure of the branch domain with forward(x) = y.
/// y must lie in the closure of the branch image (RangeError otherwise).
/// Residual |forward(x) - y| <= 1e-12; NumericError after 200 iterations.
double inverse_branch(const PiecewiseMap& map, Symbol branch, double y);
double inverse_branch(const PiecewiseMap& map, std::string_view label, double y);

/// Safeguarded Newton with bisection fallback on a single increasing branch.
double solve_increasing(const Branch& branch, double y);

struct Orbit {
  std::vector<double> points;  ///< x0, T x0, ..., T^n x0
  Word itinerary;              ///< owning branch of points[0..n-1]
};

Orbit orbit(const PiecewiseMap& map, double x0, std::size_t n);

}  // namespace livsic
