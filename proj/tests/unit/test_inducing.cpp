#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "livsic/errors.hpp"
#include "livsic/inducing.hpp"
#include "livsic/numerics.hpp"
#include "livsic/transfer.hpp"

using namespace livsic;

namespace {

const Interval kY = Interval::left_open(0.5, 1.0);

double uniform_in(const Interval& i, double u) { return i.lo + (i.hi - i.lo) * u; }

double chain_derivative(const PiecewiseMap& t, double y, std::size_t n) {
  double d = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    d *= derivative(t, y);
    y = evaluate(t, y);
  }
  return d;
}

}  // namespace

TEST_CASE("return times") {
  const auto t = lsv_map(0.5);
  CHECK(return_time(t, kY, 0.9, 100) == 1);
  CHECK(return_time(t, kY, 0.7, 100) == 2);
  CHECK(return_time(doubling_map(), kY, 0.6, 100) == 3);
  CHECK_THROWS_AS(return_time(t, kY, 0.3, 100), DomainError);
  try {
    return_time(t, kY, std::nextafter(0.5, 1.0), 50);
    FAIL("expected ReturnNotResolvedError");
  } catch (const ReturnNotResolvedError& e) {
    CHECK(e.partial_orbit().size() == 51);
  }
}

TEST_CASE("return partition of lsv") {
  const auto t = lsv_map(0.5);
  const InducedSystem sys = induce(t, kY, 10000);
  const Interval b1 = sys.cell(1);
  CHECK(b1.lo == 0.75);
  CHECK(b1.hi == 1.0);
  CHECK(b1.lo_open);
  CHECK_FALSE(b1.hi_open);
  // x2 by bisection on x(1+sqrt(2x)) = 1/2
  double lo = 0.0, hi = 0.5;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * (1 + std::sqrt(2 * mid)) < 0.5 ? lo : hi) = mid;
  }
  CHECK(sys.boundary_points()[2] == doctest::Approx(lo).epsilon(1e-12));
  CHECK(sys.cell(2).lo == doctest::Approx((lo + 1) / 2).epsilon(1e-12));
  CHECK(sys.cell(2).hi == 0.75);
  CHECK(sys.cell(2).lo == doctest::Approx(0.6425).epsilon(1e-4));
  for (int i = 0; i < 100; ++i) CHECK(sys.derivative(1, uniform_in(b1, (i + 0.5) / 100)) == 2.0);
  CHECK(sys.resolved() == 10000);
  CHECK(sys.expansion() == doctest::Approx(2.0));
}

TEST_CASE("return partition of the doubling map") {
  const InducedSystem sys = induce(doubling_map(), kY, 40);
  for (std::size_t n = 1; n <= 20; ++n) {
    CHECK(sys.cell(n).lo == doctest::Approx(0.5 * (1 + std::ldexp(1.0, -static_cast<int>(n)))).epsilon(1e-15));
  }
}

TEST_CASE("unsupported inducing sets") {
  const auto t = lsv_map(0.5);
  CHECK_THROWS_AS(induce(t, Interval::left_open(0.6, 1.0)), StructuralError);
  CHECK_THROWS_AS(induce(t, Interval::closed(0.0, 0.5)), StructuralError);
  CHECK_THROWS_AS(induce(t, kY, 0), PreconditionError);
}

TEST_CASE("return partition exactness") {
  const auto t = lsv_map(0.5);
  const InducedSystem sys = induce(t, kY, 10000);
  CounterRng rng(21);
  for (std::size_t n = 1; n <= 40; ++n) {
    for (std::uint64_t i = 0; i < 100; ++i) {
      const double y = uniform_in(sys.cell(n), rng.substream(n).uniform_open(i));
      CHECK(return_time(t, kY, y, 100000) == n);
      CHECK(sys.cell_of(y) == std::optional<std::size_t>(n));
    }
  }
}

TEST_CASE("cells cover Y and map onto Y") {
  const auto t = lsv_map(0.5);
  const InducedSystem sys = induce(t, kY, 10000);
  double total = sys.tail_length();
  for (std::size_t n = 1; n <= sys.resolved(); ++n) {
    total += sys.cell(n).length();
    if (n > 1) CHECK(sys.cell(n).hi == sys.cell(n - 1).lo);
  }
  CHECK(std::abs(total - 0.5) <= 1e-12);
  CHECK(sys.tail_length() > 0.0);
  CHECK(sys.tail_length() < 1e-6);
  for (std::size_t n = 1; n <= 40; ++n) {
    const Interval b = sys.cell(n);
    CHECK(std::abs(sys.apply(n, b.hi) - 1.0) <= 1e-9);
    CHECK(std::abs(sys.apply(n, std::nextafter(b.lo, 1.0)) - 0.5) <= 1e-9);
  }
}

TEST_CASE("induced expansion") {
  const auto t = lsv_map(0.5);
  const InducedSystem sys = induce(t, kY, 10000);
  CounterRng rng(4);
  for (std::size_t n = 1; n <= 40; ++n) {
    for (std::uint64_t i = 0; i < 100; ++i) {
      const double y = uniform_in(sys.cell(n), rng.substream(n).uniform_open(i));
      const double d = sys.derivative(n, y);
      CHECK(d >= 2.0 - 1e-9);
      CHECK(d == doctest::Approx(chain_derivative(t, y, n)).epsilon(1e-12));
    }
  }
}

TEST_CASE("tail decay") {
  const InducedSystem sys = induce(lsv_map(0.5), kY, 10000);
  for (std::size_t n = 3; n <= sys.resolved(); ++n) CHECK(sys.cell(n).length() < sys.cell(n - 1).length());
}

TEST_CASE("induced inverse branches") {
  const InducedSystem sys = induce(lsv_map(0.5), kY, 10000);
  for (std::size_t n : {1, 2, 5, 17, 40}) {
    for (double z : {0.51, 0.6, 0.75, 0.99, 1.0}) {
      const double y = sys.inverse(n, z);
      CHECK(sys.cell(n).contains_closure(y));
      CHECK(std::abs(sys.apply(n, y) - z) <= 1e-10);
    }
  }
}

TEST_CASE("induced metric") {
  const InducedSystem sys = induce(lsv_map(0.5), kY, 10000);
  CHECK(induced_metric(sys, 0.8, 0.9) == doctest::Approx(0.2));
  CHECK(induced_metric(sys, 0.9, 0.7) == 2.0);
  CHECK(induced_metric(sys, 0.9, 0.9) == 0.0);
}

TEST_CASE("induced observables") {
  const auto t = lsv_map(0.5);
  const InducedSystem sys = induce(t, kY, 10000);
  const auto one = induced_observable(sys, constant(t, 1.0), 10, 20);
  const auto id = induced_observable(sys, make_observable(t, [](double x) { return x; }, 1.0, "x"), 10, 20);
  CHECK(id(0.7) == doctest::Approx(1.1));
  CounterRng rng(8);
  for (std::uint64_t i = 0; i < 200; ++i) {
    const double y = 0.5 + 0.5 * rng.uniform_open(i);
    CHECK(one(y) == static_cast<double>(sys.return_time_of(y)));
  }
  REQUIRE(id.seminorms().size() == 10);
  for (const auto& s : id.seminorms()) CHECK(s.sampled <= s.chain_bound * (1 + 1e-9));
}

TEST_CASE("abramov compatibility") {
  const auto t = lsv_map(0.5);
  const InducedSystem sys = induce(t, kY, 10000);
  for (const auto& g : coboundary_corpus()) {
    const auto fy = induced_observable(sys, coboundary_of(t, g), 5, 10);
    CounterRng rng(derive_seed(g.name, 1));
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
      const double y = 0.5 + 0.5 * rng.uniform_open(i);
      if (!sys.cell_of(y)) continue;
      worst = std::max(worst, std::abs(fy(y) - (g.fn(y) - g.fn(sys.induced(y)))));
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("young tower") {
  const auto t = lsv_map(0.5);
  const InducedSystem sys = induce(t, kY, 10000);
  const YoungTower tower = tower_of(sys);
  CHECK(tower.columns() == sys.resolved());
  CHECK(tower.height(1) == 1);
  CHECK(tower.level(1, 0).lo == sys.cell(1).lo);
  CHECK(tower.level_count() == sys.resolved() * (sys.resolved() + 1) / 2);
  CHECK_THROWS_AS(tower.level(3, 3), DomainError);

  CounterRng rng(9);
  for (std::size_t n = 2; n <= 40; ++n) {
    for (std::size_t k = 0; k < n; ++k) {
      const Interval lvl = tower.level(n, k);
      for (std::uint64_t i = 0; i < 10; ++i) {
        const double x = uniform_in(lvl, rng.substream(n * 100 + k).uniform_open(i));
        const double y = evaluate(t, x);
        if (k + 1 < n) {
          CHECK(tower.level(n, k + 1).contains_closure(y, 1e-12));
        } else {
          CHECK(tower.base().contains_closure(y, 1e-12));
        }
      }
    }
  }
}

TEST_CASE("kac identity for the doubling map") {
  const InducedSystem sys = induce(doubling_map(), kY, 60);
  const YoungTower tower = tower_of(sys);
  CHECK(std::abs(tower.kac_sum() + 0.0 - 1.0) <= 1e-12 + 60 * sys.tail_length());
}

TEST_CASE("kac identity for lsv with the invariant density") {
  const auto t = lsv_map(0.25);
  const InducedSystem sys = induce(t, kY, 10000);
  const UlamOperator op = ulam_matrix(t, 8192);
  const Eigen::VectorXd rho = invariant_density(op);
  const double w = op.bin_width();
  // cumulative invariant measure of [0, x], exact for the piecewise-constant density
  auto cdf = [&](double x) {
    const double pos = x / w;
    const auto i = std::min<Eigen::Index>(static_cast<Eigen::Index>(pos), rho.size() - 1);
    return (rho.head(i).sum() + (pos - static_cast<double>(i)) * rho[i]) * w;
  };
  const YoungTower tower = tower_of(sys, [&](const Interval& i) { return cdf(i.hi) - cdf(i.lo); });
  // the Ulam density carries its own discretization error
  CHECK(std::abs(tower.kac_sum() - 1.0) <= 2e-3);
}
