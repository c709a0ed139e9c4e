#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "livsic/interval.hpp"
#include "livsic/interval_maps.hpp"

namespace livsic {

/// A real function on [0,1], Hölder with exponent `holder_exponent` on each
/// branch of a reference map. `seminorms[a]` is Df(a) for branch a.
struct Observable {
  RealFn fn;
  double holder_exponent = 1.0;
  std::vector<double> seminorms;
  std::string descriptor;

  double operator()(double x) const { return fn(x); }
};

/// Per-branch Hölder seminorms estimated from multi-scale grid pairs plus
/// pairs shrinking onto each branch endpoint.
std::vector<double> estimate_seminorms(const PiecewiseMap& map, const RealFn& fn, double gamma);

Observable make_observable(const PiecewiseMap& map, RealFn fn, double gamma, std::string descriptor);

/// f - c, keeping seminorms.
Observable shifted(const Observable& f, double c);

/// A named test function g used to build synthetic coboundaries g - g∘T.
struct NamedFunction {
  std::string name;
  RealFn fn;
  double holder_exponent = 1.0;
};

/// g1(x)=x(1-x), g2(x)=x^2, g3 piecewise Hölder-1/2 (sqrt(x) on [0,1/2], 1-x on (1/2,1]).
const std::vector<NamedFunction>& coboundary_corpus();
const NamedFunction& corpus_function(std::string_view name);

/// log T'(x) - shift; Hölder exponent alpha for LSV maps and 1 otherwise.
Observable log_derivative(const PiecewiseMap& map, double shift = 0.0);
Observable coboundary_of(const PiecewiseMap& map, const NamedFunction& g);
Observable affine(const PiecewiseMap& map, double slope, double intercept);
Observable indicator(const PiecewiseMap& map, const Interval& set);
Observable constant(const PiecewiseMap& map, double value);

}  // namespace livsic
