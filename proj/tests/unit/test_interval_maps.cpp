#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "livsic/errors.hpp"
#include "livsic/interval_maps.hpp"
#include "livsic/numerics.hpp"

using namespace livsic;

namespace {

// plain bisection, independent of the library's Newton solver
double bisect(const RealFn& f, double y, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("intervals") {
  const Interval y = parse_interval("(0.5,1]");
  CHECK(y.lo == 0.5);
  CHECK(y.hi == 1.0);
  CHECK(y.lo_open);
  CHECK_FALSE(y.hi_open);
  CHECK_FALSE(y.contains(0.5));
  CHECK(y.contains(1.0));
  CHECK(y.to_string() == "(0.5,1]");
  CHECK(intersect(Interval::closed(0, 0.5), y).is_empty());
  CHECK(Interval::closed(0.3, 0.3).length() == 0.0);
  CHECK_THROWS(parse_interval("0.5,1"));
  CHECK_THROWS(parse_interval("(a,1]"));
}

TEST_CASE("lsv map values") {
  const auto t = lsv_map(0.5);
  CHECK(evaluate(t, 0.5) == 1.0);
  CHECK(evaluate(t, 0.0) == 0.0);
  CHECK(derivative(t, 0.0) == 1.0);
  CHECK(evaluate(t, 0.25) == doctest::Approx(0.25 * (1.0 + std::sqrt(0.5))).epsilon(1e-15));
  CHECK(evaluate(t, 0.25) == doctest::Approx(0.4268).epsilon(1e-4));
  CHECK(evaluate(t, 0.7) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(evaluate(t, 0.4) == doctest::Approx(0.7578).epsilon(1e-4));
  CHECK(t.alpha().value() == 0.5);
  CHECK(t.full_branched());
}

TEST_CASE("lsv parameter domain") {
  CHECK_THROWS_AS(lsv_map(0.0), ParameterError);
  CHECK_THROWS_AS(lsv_map(1.0), ParameterError);
  CHECK_THROWS_AS(lsv_map(-0.3), ParameterError);
  CHECK_THROWS_AS(lsv_map(std::nan("")), ParameterError);
}

TEST_CASE("doubling map values") {
  const auto t = doubling_map();
  CHECK(evaluate(t, 1.0 / 3.0) == doctest::Approx(2.0 / 3.0));
  CHECK(evaluate(t, 1.0) == 1.0);
  CHECK(evaluate(t, 0.3) == doctest::Approx(0.6));
  CHECK_THROWS_AS(evaluate(t, 1.5), DomainError);
  CHECK_THROWS_AS(evaluate(t, -0.1), DomainError);
}

TEST_CASE("boundary convention") {
  const auto t = lsv_map(0.5);
  CHECK(t.owner(0.5) == t.symbol_of("L"));
  CHECK(t.owner(std::nextafter(0.5, 1.0)) == t.symbol_of("R"));
  CHECK(t.owner(0.0) == t.symbol_of("L"));
  CHECK(t.owner(1.0) == t.symbol_of("R"));
}

TEST_CASE("inverse branches") {
  const auto t = lsv_map(0.5);
  CHECK(inverse_branch(t, "R", 0.4) == doctest::Approx(0.7).epsilon(1e-15));
  const double x2 = inverse_branch(t, "L", 0.5);
  const double oracle = bisect(t.branch(0).forward, 0.5, 0.0, 0.5);
  CHECK(std::abs(x2 - oracle) < 1e-12);
  CHECK(x2 == doctest::Approx(0.285).epsilon(1e-3));
  CHECK(inverse_branch(doubling_map(), "L", 0.9) == doctest::Approx(0.45));
  CHECK_THROWS_AS(inverse_branch(t, "L", 1.5), RangeError);
  CHECK_THROWS_AS(inverse_branch(t, "Q", 0.5), DomainError);
}

TEST_CASE("orbits") {
  const auto d = doubling_map();
  const Orbit o = orbit(d, 1.0 / 3.0, 3);
  REQUIRE(o.points.size() == 4);
  CHECK(o.points[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(o.points[3] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(o.itinerary == Word{0, 1, 0});

  const Orbit fixed = orbit(d, 0.0, 5);
  for (double x : fixed.points) CHECK(x == 0.0);

  const Orbit l = orbit(lsv_map(0.5), 0.9, 2);
  CHECK(l.points[1] == doctest::Approx(0.8));
  CHECK(l.points[2] == doctest::Approx(0.6));
}

TEST_CASE("round trip of inverse branches") {
  for (double alpha : {0.25, 0.5, 0.9}) {
    const auto t = lsv_map(alpha);
    CounterRng rng(derive_seed("roundtrip", 7));
    for (Symbol s = 0; s < t.size(); ++s) {
      const Interval img = t.branch(s).image;
      double worst = 0.0;
      for (std::uint64_t i = 0; i < 10000; ++i) {
        const double y = img.lo + rng.substream(s).uniform(i) * (img.hi - img.lo);
        worst = std::max(worst, std::abs(evaluate(t, inverse_branch(t, s, y)) - y));
      }
      CHECK(worst <= 1e-10);
    }
  }
}

TEST_CASE("monotone branches") {
  for (const auto& t : {lsv_map(0.5), lsv_map(0.1), doubling_map()}) {
    for (const auto& b : t.branches()) {
      double prev = -1.0;
      for (int i = 1; i <= 1000; ++i) {
        const double x = b.domain.lo + (b.domain.hi - b.domain.lo) * i / 1001.0;
        const double y = b.forward(x);
        CHECK(y > prev);
        prev = y;
      }
    }
  }
}

TEST_CASE("derivative matches finite differences") {
  for (const auto& t : {lsv_map(0.5), lsv_map(0.25), doubling_map()}) {
    double worst = 0.0;
    for (const auto& b : t.branches()) {
      for (int i = 1; i <= 1000; ++i) {
        const double x = b.domain.lo + (b.domain.hi - b.domain.lo) * i / 1001.0;
        const double h = 1e-6 * (b.domain.hi - b.domain.lo);
        const double fd = (b.forward(x + h) - b.forward(x - h)) / (2 * h);
        worst = std::max(worst, std::abs(fd - b.derivative(x)) / std::abs(b.derivative(x)));
      }
    }
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("neutral fixed point") {
  for (double alpha : {0.1, 0.25, 0.5, 0.9}) {
    const auto t = lsv_map(alpha);
    CHECK(derivative(t, 0.0) == 1.0);
    // T'(x) - 1 = (1+alpha)(2x)^alpha decreases to 0
    double prev = INFINITY;
    for (double x : {1e-3, 1e-6, 1e-12, 1e-24, 1e-100}) {
      const double excess = derivative(t, x) - 1.0;
      CHECK(excess == doctest::Approx((1 + alpha) * std::pow(2 * x, alpha)).epsilon(1e-9));
      CHECK(excess >= 0.0);
      CHECK(excess <= prev);
      prev = excess;
    }
    CHECK(std::abs(derivative(t, 1e-100) - 1.0) <= 1e-6);
  }
  CHECK(std::abs(derivative(lsv_map(0.9), 1e-12) - 1.0) <= 1e-6);
}

TEST_CASE("dithered step stays close to the map") {
  const auto t = doubling_map();
  RngStream noise(3);
  double x = 0.1;
  for (int i = 0; i < 1000; ++i) {
    const double y = dithered_step(t, x, noise);
    CHECK(std::abs(y - evaluate(t, x)) <= 0x1.0p-53);
    CHECK(y >= 0.0);
    CHECK(y <= 1.0);
    x = y;
  }
}

TEST_CASE("structural validation of user maps") {
  Branch a{"A", Interval::closed(0, 0.5), Interval::closed(0, 1), [](double x) { return 2 * x; },
           [](double) { return 2.0; }, {}};
  Branch gap{"B", Interval::left_open(0.6, 1.0), Interval::left_open(0, 1),
             [](double x) { return (x - 0.6) / 0.4; }, [](double) { return 2.5; }, {}};
  CHECK_THROWS_AS(PiecewiseMap("gap", {a, gap}), StructuralError);
  Branch dec{"B", Interval::left_open(0.5, 1.0), Interval::left_open(0, 1), [](double x) { return 2 - 2 * x; },
             [](double) { return -2.0; }, {}};
  CHECK_THROWS_AS(PiecewiseMap("dec", {a, dec}), StructuralError);
}
