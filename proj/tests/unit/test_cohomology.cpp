#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "livsic/cohomology.hpp"
#include "livsic/errors.hpp"
#include "livsic/numerics.hpp"
#include "livsic/transfer.hpp"

using namespace livsic;

namespace {

Observable fn(const PiecewiseMap& t, RealFn f, const std::string& name = "f") {
  return make_observable(t, std::move(f), 1.0, name);
}

double spread(const SampledFunction& u, const RealFn& g) {
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u.values[i] - g(u.points[i]);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return hi - lo;
}

}  // namespace

TEST_CASE("birkhoff sums") {
  const auto d = doubling_map();
  CHECK(birkhoff_sum(d, constant(d, 1.0), 0.3, 5) == 5.0);
  CHECK(birkhoff_sum(d, fn(d, [](double x) { return x; }), 1.0 / 3.0, 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(birkhoff_sum(d, constant(d, 1.0), 0.3, 0) == 0.0);
  const auto t = lsv_map(0.5);
  for (const auto& g : coboundary_corpus()) {
    const auto f = coboundary_of(t, g);
    for (double x : {0.1, 0.37, 0.8}) {
      const double tn = orbit(t, x, 17).points.back();
      CHECK(std::abs(birkhoff_sum(t, f, x, 17) - (g.fn(x) - g.fn(tn))) <= 1e-12);
    }
  }
}

TEST_CASE("cocycle additivity") {
  const auto t = lsv_map(0.25);
  const auto f = log_derivative(t);
  CounterRng rng(31);
  for (std::uint64_t i = 0; i < 100; ++i) {
    const double x = rng.uniform_open(3 * i);
    const auto m = static_cast<std::size_t>(rng.bits(3 * i + 1) % 200);
    const auto n = static_cast<std::size_t>(rng.bits(3 * i + 2) % 200);
    const double xm = orbit(t, x, m).points.back();
    CHECK(std::abs(birkhoff_sum(t, f, x, m + n) - (birkhoff_sum(t, f, x, m) + birkhoff_sum(t, f, xm, n))) <= 1e-12);
  }
}

TEST_CASE("obstructions") {
  const auto d = doubling_map();
  const auto g2 = coboundary_of(d, corpus_function("g2"));
  const ObstructionReport cob = livsic_obstructions(d, g2, 10, 1e-10);
  CHECK_FALSE(cob.obstructed());
  CHECK(cob.verdict(d) == "unobstructed up to period 10");
  for (const auto& e : cob.entries) CHECK(std::abs(e.sum) <= 1e-10);

  const ObstructionReport aff = livsic_obstructions(d, affine(d, 1.0, -0.5), 4, 1e-8);
  CHECK(aff.obstructed());
  // the first obstructed orbit in lexicographic order is the fixed point 0: f(0) = -1/2
  CHECK(aff.entries[*aff.first_obstructed].sum == -0.5);
  bool found_one = false;
  for (const auto& e : aff.entries) {
    if (e.orbit.period() == 1 && e.orbit.points[0] == 1.0) {
      CHECK(e.sum == 0.5);
      found_one = true;
    }
  }
  CHECK(found_one);
}

TEST_CASE("centered log-derivative is obstructed at the neutral fixed point") {
  const auto t = lsv_map(0.25);
  InvariantMeanOptions o;
  o.steps = 2000000;
  o.n_bins = 8192;
  const double c = invariant_mean(t, [&](double x) { return std::log(derivative(t, x)); }, o).value;
  const ObstructionReport r = livsic_obstructions(t, log_derivative(t, c), 6, 1e-6);
  REQUIRE(r.obstructed());
  CHECK(r.verdict(t) == "obstructed at fixed point 0");
  CHECK(r.entries.front().sum == -c);
  CHECK(-c < -0.1);
}

TEST_CASE("coboundary soundness over the corpus") {
  for (const auto& t : {lsv_map(0.5), lsv_map(0.25), doubling_map()}) {
    for (const auto& g : coboundary_corpus()) {
      const ObstructionReport r = livsic_obstructions(t, coboundary_of(t, g), 10, 1e-8);
      CHECK_MESSAGE(!r.obstructed(), g.name, " on ", t.describe());
    }
  }
}

TEST_CASE("solve_coboundary recovers known transfer functions") {
  const auto d = doubling_map();
  const auto& g1 = corpus_function("g1");
  const SampledFunction u = solve_coboundary(d, coboundary_of(d, g1), 10000, std::nullopt, 3);
  CHECK(u.size() + u.merged == 10000);
  CHECK(std::is_sorted(u.points.begin(), u.points.end()));
  for (std::size_t i = 0; i < u.size(); ++i) {
    CHECK(std::abs(u.values[i] - (g1.fn(u.points[i]) - g1.fn(u.base_point))) <= 1e-9);
  }
  const SampledFunction z = solve_coboundary(d, constant(d, 0.0), 1000);
  for (double v : z.values) CHECK(v == 0.0);
  CHECK_THROWS_AS(solve_coboundary(d, constant(d, 0.0), 999), PreconditionError);
}

TEST_CASE("gauge invariance") {
  const auto t = lsv_map(0.5);
  const auto f = coboundary_of(t, corpus_function("g3"));
  const SampledFunction a = solve_coboundary(t, f, 5000, 0.3);
  const SampledFunction b = solve_coboundary(t, f, 5000, 0.3 + 1e-3);
  // compare through the known g: both equal g - const
  CHECK(spread(a, corpus_function("g3").fn) <= 1e-10);
  CHECK(spread(b, corpus_function("g3").fn) <= 1e-10);
  // the offsets are fixed by the gauge u(x0) = 0
  const double off_a = a.values[0] - corpus_function("g3").fn(a.points[0]);
  const double off_b = b.values[0] - corpus_function("g3").fn(b.points[0]);
  CHECK(off_a == doctest::Approx(-corpus_function("g3").fn(0.3)).epsilon(1e-10));
  CHECK(off_b == doctest::Approx(-corpus_function("g3").fn(0.3 + 1e-3)).epsilon(1e-10));
}

TEST_CASE("range growth flags non-coboundaries") {
  const auto d = doubling_map();
  const SampledFunction u = solve_coboundary(d, affine(d, 1.0, -0.5), 100000, std::nullopt, 2);
  REQUIRE(u.range_growth.size() == 3);
  CHECK(u.range_growth[0].length == 1000);
  CHECK(u.range_growth[2].length == 100000);
  CHECK(u.range_growth[1].range < u.range_growth[2].range);
  CHECK(u.range_growing);
}

TEST_CASE("obstruction implies solver diagnostics") {
  const auto d = doubling_map();
  const auto t = lsv_map(0.5);
  const std::vector<std::pair<PiecewiseMap, Observable>> cases = {
      {d, affine(d, 1.0, -0.5)}, {t, affine(t, 1.0, -0.4)}, {d, indicator(d, Interval::left_open(0.5, 1.0))}};
  for (const auto& [map, f] : cases) {
    const ObstructionReport r = livsic_obstructions(map, f, 6, 1e-6);
    REQUIRE(r.obstructed());
    bool flagged = false;
    try {
      flagged = solve_coboundary(map, f, 100000, std::nullopt, 5).range_growing;
    } catch (const NotACoboundaryError&) {
      flagged = true;
    }
    CHECK_MESSAGE(flagged, f.descriptor);
  }
}

TEST_CASE("holder estimates of simple functions") {
  SampledFunction u;
  for (int i = 0; i < 2000; ++i) {
    u.points.push_back((i + 0.5) / 2000.0);
    u.values.push_back(3.0);
  }
  const HolderEstimate c = holder_estimate(u, 1.0);
  for (const auto& b : c.bands) CHECK(b.constant == 0.0);
  u.values = u.points;
  const HolderEstimate id = holder_estimate(u, 1.0);
  for (const auto& b : id.bands) {
    if (b.pairs > 0) CHECK(b.constant == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(id.stability_ratio == doctest::Approx(1.0).epsilon(1e-12));
  SampledFunction one;
  one.points = {0.1};
  one.values = {0.0};
  CHECK_THROWS_AS(holder_estimate(one, 1.0), InsufficientDataError);
}

TEST_CASE("holder estimate of a recovered coboundary") {
  const auto t = lsv_map(0.5);
  const auto& g1 = corpus_function("g1");
  const SampledFunction u = solve_coboundary(t, coboundary_of(t, g1), 10000, std::nullopt, 1);
  HolderOptions o;
  o.restriction = Interval::left_open(0.5, 1.0);
  const HolderEstimate h = holder_estimate(u, 1.0, o);
  CHECK(h.stability_ratio <= 2.0);
  // |g1'| = |1 - 2x| <= 1 on (1/2, 1]
  for (const auto& b : h.bands) CHECK(b.constant <= 1.0 + 1e-6);
  for (const auto& b : h.bands) {
    if (b.reliable && b.k >= 4) CHECK(b.constant >= 0.5);
  }
}

TEST_CASE("symbolic metric estimate") {
  const auto d = doubling_map();
  const SampledFunction u = solve_coboundary(d, coboundary_of(d, corpus_function("g1")), 5000, std::nullopt, 2);
  HolderOptions o;
  o.metric = Metric::symbolic;
  o.map = &d;
  const HolderEstimate h = holder_estimate(u, 1.0, o);
  CHECK(std::isfinite(h.max_constant()));
  CHECK(h.metric == Metric::symbolic);
  o.map = nullptr;
  CHECK_THROWS_AS(holder_estimate(u, 1.0, o), PreconditionError);
}

TEST_CASE("lattice test") {
  const auto d = doubling_map();
  const ObstructionReport ind = livsic_obstructions(d, indicator(d, Interval::left_open(0.5, 1.0)), 8, 1e-8);
  const LatticeVerdict v = aperiodicity_test(d, ind, 50, 1e-4);
  CHECK(v.outcome == LatticeOutcome::lattice);
  CHECK(v.lambda.value() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(v.mu == 0.0);
  CHECK(v.summary() == "lattice found (λ=1, μ=0)");
  for (const auto& r : v.residuals) CHECK(std::abs(r.residual - std::round(r.residual)) <= 1e-4);

  const ObstructionReport c = livsic_obstructions(d, constant(d, 0.3), 6, 1e-8);
  const LatticeVerdict dv = aperiodicity_test(d, c, 50, 1e-4);
  CHECK(dv.outcome == LatticeOutcome::degenerate);
  CHECK(dv.mu == doctest::Approx(0.3));
  CHECK(dv.summary() == "degenerate (pure drift)");

  const ObstructionReport h = livsic_obstructions(d, indicator(d, Interval::left_open(0.5, 1.0)), 6, 1e-8);
  ObstructionReport no_fixed = h;
  std::erase_if(no_fixed.entries, [](const Obstruction& e) { return e.orbit.period() == 1; });
  CHECK_THROWS_AS(aperiodicity_test(d, no_fixed, 50, 1e-4), PreconditionError);
}

TEST_CASE("half-integer lattice") {
  const auto d = doubling_map();
  const ObstructionReport r = livsic_obstructions(d, indicator(d, Interval::left_open(0.5, 1.0)), 6, 1e-8);
  ObstructionReport half = r;
  for (auto& e : half.entries) e.sum *= 0.5;
  const LatticeVerdict v = aperiodicity_test(d, half, 50, 1e-4);
  CHECK(v.outcome == LatticeOutcome::lattice);
  CHECK(v.lambda.value() == doctest::Approx(0.5));
}
