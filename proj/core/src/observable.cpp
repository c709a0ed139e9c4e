#include "livsic/observable.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "livsic/errors.hpp"

namespace livsic {

namespace {

double quotient(const RealFn& fn, double x, double y, double gamma) {
  const double d = std::abs(x - y);
  if (d == 0.0) return 0.0;
  return std::abs(fn(x) - fn(y)) / std::pow(d, gamma);
}

std::string number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::vector<double> estimate_seminorms(const PiecewiseMap& map, const RealFn& fn, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ParameterError("Hölder exponent must lie in (0,1]");
  constexpr std::size_t kGrid = 2048;
  std::vector<double> out;
  out.reserve(map.size());
  for (const Branch& b : map.branches()) {
    const double len = b.domain.hi - b.domain.lo;
    // open ends are approached from inside; f may jump exactly at them
    const double lo = b.domain.lo_open ? b.domain.lo + len * 0x1.0p-40 : b.domain.lo;
    const double hi = b.domain.hi_open ? b.domain.hi - len * 0x1.0p-40 : b.domain.hi;
    std::vector<double> xs(kGrid + 1), fs(kGrid + 1);
    for (std::size_t i = 0; i <= kGrid; ++i) {
      xs[i] = lo + (hi - lo) * static_cast<double>(i) / kGrid;
      fs[i] = fn(xs[i]);
    }
    double best = 0.0;
    for (std::size_t stride = 1; stride <= kGrid; stride *= 2) {
      const double scale = std::pow(xs[stride] - xs[0], gamma);
      for (std::size_t i = 0; i + stride <= kGrid; ++i) {
        best = std::max(best, std::abs(fs[i + stride] - fs[i]) / scale);
      }
    }
    for (int j = 1; j <= 13; ++j) {
      const double h = (hi - lo) * std::pow(10.0, -j);
      best = std::max(best, quotient(fn, lo, lo + h, gamma));
      best = std::max(best, quotient(fn, hi - h, hi, gamma));
    }
    out.push_back(best);
  }
  return out;
}

Observable make_observable(const PiecewiseMap& map, RealFn fn, double gamma, std::string descriptor) {
  auto seminorms = estimate_seminorms(map, fn, gamma);
  return Observable{std::move(fn), gamma, std::move(seminorms), std::move(descriptor)};
}

Observable shifted(const Observable& f, double c) {
  Observable g = f;
  g.fn = [inner = f.fn, c](double x) { return inner(x) - c; };
  g.descriptor = f.descriptor + " - " + number(c);
  return g;
}

const std::vector<NamedFunction>& coboundary_corpus() {
  static const std::vector<NamedFunction> corpus{
      {"g1", [](double x) { return x * (1.0 - x); }, 1.0},
      {"g2", [](double x) { return x * x; }, 1.0},
      {"g3", [](double x) { return x <= 0.5 ? std::sqrt(x) : 1.0 - x; }, 0.5},
  };
  return corpus;
}

const NamedFunction& corpus_function(std::string_view name) {
  for (const auto& g : coboundary_corpus()) {
    if (g.name == name) return g;
  }
  throw DomainError("unknown corpus function '" + std::string(name) + "'");
}

Observable log_derivative(const PiecewiseMap& map, double shift) {
  const double gamma = map.alpha().value_or(1.0);
  RealFn fn = [map, shift](double x) { return std::log(derivative(map, x)) - shift; };
  std::string desc = "log-derivative";
  if (shift != 0.0) desc += " - " + number(shift);
  return make_observable(map, std::move(fn), gamma, std::move(desc));
}

Observable coboundary_of(const PiecewiseMap& map, const NamedFunction& g) {
  RealFn fn = [map, g = g.fn](double x) { return g(x) - g(evaluate(map, x)); };
  return make_observable(map, std::move(fn), g.holder_exponent, "coboundary-of:" + g.name);
}

Observable affine(const PiecewiseMap& map, double slope, double intercept) {
  RealFn fn = [slope, intercept](double x) { return slope * x + intercept; };
  return make_observable(map, std::move(fn), 1.0,
                         "affine:" + number(slope) + "," + number(intercept));
}

Observable indicator(const PiecewiseMap& map, const Interval& set) {
  RealFn fn = [set](double x) { return set.contains(x) ? 1.0 : 0.0; };
  return make_observable(map, std::move(fn), 1.0, "indicator:" + set.to_string());
}

Observable constant(const PiecewiseMap& map, double value) {
  RealFn fn = [value](double) { return value; };
  return make_observable(map, std::move(fn), 1.0, "constant:" + number(value));
}

}  // namespace livsic
