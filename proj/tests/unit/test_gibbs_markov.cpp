#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "livsic/errors.hpp"
#include "livsic/gibbs_markov.hpp"

using namespace livsic;

namespace {

const Interval kY = Interval::left_open(0.5, 1.0);

const AxiomReport& find(const std::vector<AxiomReport>& reps, const std::string& name) {
  for (const auto& r : reps) {
    if (r.axiom == name) return r;
  }
  throw std::runtime_error("missing report " + name);
}

double quartile_mean(const std::vector<double>& v, bool last) {
  const std::size_t q = v.size() / 4;
  return last ? std::accumulate(v.end() - q, v.end(), 0.0) / q : std::accumulate(v.begin(), v.begin() + q, 0.0) / q;
}

}  // namespace

TEST_CASE("expansion of the doubling map") {
  const auto els = elements_of(doubling_map());
  const AxiomReport r = check_expansion(els, 100);
  CHECK(r.verdict == Verdict::pass);
  CHECK(r.constant == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.samples == 200);
  CHECK_THROWS_AS(check_expansion(els, 1), PreconditionError);
}

TEST_CASE("raw lsv is not uniformly expanding") {
  const auto t = lsv_map(0.5);
  const AxiomReport r = check_expansion(elements_of(t), 100);
  REQUIRE(r.verdict == Verdict::fail);
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->element == "L");
  // re-evaluate the witness pair independently
  const double x = r.witness->points[0], y = r.witness->points[1];
  REQUIRE(x != y);
  const double ratio = std::abs(evaluate(t, x) - evaluate(t, y)) / std::abs(x - y);
  CHECK(ratio <= 1.0 + kExpansionMargin);
}

TEST_CASE("induced lsv is uniformly expanding") {
  const InducedSystem sys = induce(lsv_map(0.5), kY, 10000);
  const auto els = elements_of(sys, 40);
  REQUIRE(els.size() == 40);
  const AxiomReport r = check_expansion(els, 100);
  CHECK(r.verdict == Verdict::pass);
  CHECK(r.constant >= 2.0 - 1e-9);
  CHECK(r.per_element.size() == 40);
}

TEST_CASE("distortion") {
  const AxiomReport d = check_distortion(elements_of(doubling_map()), 100);
  CHECK(d.verdict == Verdict::pass);
  CHECK(d.constant == 0.0);

  const auto t = lsv_map(0.5);
  const std::vector<Branch> left{t.branch(0)};
  const AxiomReport l = check_distortion(left, 1000);
  CHECK(std::isfinite(l.constant));
  CHECK(l.constant > 0.0);
}

TEST_CASE("distortion of the induced lsv cells is bounded") {
  const InducedSystem sys = induce(lsv_map(0.5), kY, 10000);
  const AxiomReport r = check_distortion(elements_of(sys, 400), 50);
  CHECK(std::isfinite(r.constant));
  CHECK(r.constant < 4.0);
  CHECK(r.per_element.front() == 0.0);  // B_1 is affine
  // the maxima saturate: the last two blocks of a hundred cells agree on average
  const auto& v = r.per_element;
  const double third = std::accumulate(v.end() - 200, v.end() - 100, 0.0) / 100;
  const double fourth = std::accumulate(v.end() - 100, v.end(), 0.0) / 100;
  CHECK(std::abs(fourth - third) <= 0.05 * third);
}

TEST_CASE("trend failures carry a sound witness") {
  const InducedSystem sys = induce(lsv_map(0.5), kY, 10000);
  const auto els = elements_of(sys, 40);
  const AxiomReport r = check_distortion(els, 100);
  if (r.verdict == Verdict::fail) {
    REQUIRE(r.witness.has_value());
    const double first = quartile_mean(r.per_element, false);
    CHECK(quartile_mean(r.per_element, true) > 2.0 * first);
    const double x = r.witness->points[0], y = r.witness->points[1];
    const std::size_t n = sys.cell_of(x).value();
    CHECK(sys.cell_of(y).value() == n);
    const double q = std::abs(1.0 - sys.derivative(n, y) / sys.derivative(n, x)) / std::abs(sys.apply(n, x) - sys.apply(n, y));
    CHECK(q == doctest::Approx(r.witness->value).epsilon(1e-9));
    CHECK(q > 2.0 * first);
  }
}

TEST_CASE("big images and preimages") {
  const AxiomReport d = check_bip(elements_of(doubling_map()));
  CHECK(d.verdict == Verdict::pass);
  CHECK(d.witness_set.size() == 1);

  const InducedSystem sys = induce(lsv_map(0.5), kY, 10000);
  const AxiomReport s = check_bip(elements_of(sys, 40));
  CHECK(s.verdict == Verdict::pass);
  CHECK(s.witness_set.size() == 1);

  // second element's image misses every element
  Branch a{"A", Interval::closed(0, 0.5), Interval::closed(0, 1), [](double x) { return 2 * x; },
           [](double) { return 2.0; }, {}};
  Branch b{"B", Interval::left_open(0.5, 1.0), Interval::left_open(0.2, 0.4),
           [](double x) { return 0.2 + 0.4 * (x - 0.5); }, [](double) { return 0.4; }, {}};
  const std::vector<Branch> bad{a, b};
  const AxiomReport f = check_bip(bad);
  CHECK(f.verdict == Verdict::fail);
  REQUIRE(f.witness.has_value());
  CHECK(f.witness->element == "B");
}

TEST_CASE("tower axioms of induced lsv") {
  const InducedSystem sys = induce(lsv_map(0.5), kY, 10000);
  const auto reps = check_tower_axioms(tower_of(sys), 40, 100);
  CHECK(find(reps, "tower-level-map").verdict == Verdict::pass);
  const auto& exp = find(reps, "tower-expansion");
  CHECK(exp.verdict == Verdict::pass);
  CHECK(exp.constant >= 2.0 - 1e-9);
  const auto& c = find(reps, "tower-backward-contraction");
  CHECK(c.verdict == Verdict::pass);
  CHECK(c.constant <= 1.0);
  const auto& d = find(reps, "tower-distortion");
  CHECK(std::isfinite(d.constant));
  CHECK(d.verdict != Verdict::fail);
}

TEST_CASE("tower axioms of induced doubling") {
  const InducedSystem sys = induce(doubling_map(), kY, 40);
  const auto reps = check_tower_axioms(tower_of(sys), 20, 50);
  const auto& exp = find(reps, "tower-expansion");
  CHECK(exp.verdict == Verdict::pass);
  for (std::size_t n = 1; n <= exp.per_element.size(); ++n) {
    CHECK(exp.per_element[n - 1] == doctest::Approx(std::ldexp(1.0, static_cast<int>(n))).epsilon(1e-9));
  }
  CHECK(find(reps, "tower-distortion").constant == 0.0);
}

TEST_CASE("iterate distortion") {
  const AxiomReport d = check_iterate_distortion(elements_of(doubling_map()), 4, 100);
  CHECK(d.verdict == Verdict::pass);
  CHECK(d.constant == doctest::Approx(1.0).epsilon(1e-9));

  const InducedSystem sys = induce(lsv_map(0.5), kY, 10000);
  const AxiomReport r = check_iterate_distortion(sys, 4, 100);
  CHECK(r.verdict == Verdict::pass);
  CHECK(std::isfinite(r.constant));
  CHECK(r.constant >= 1.0);
  CHECK(r.per_element.size() == 4);
  CHECK_THROWS_AS(check_iterate_distortion(sys, 7, 10), PreconditionError);
}

TEST_CASE("report determinism") {
  const InducedSystem sys = induce(lsv_map(0.5), kY, 10000);
  const auto els = elements_of(sys, 20);
  const AxiomReport a = check_distortion(els, 50, 99);
  const AxiomReport b = check_distortion(els, 50, 99);
  CHECK(a.per_element == b.per_element);
  CHECK(a.constant == b.constant);
  const AxiomReport c = check_iterate_distortion(sys, 3, 50, 4, 5);
  const AxiomReport e = check_iterate_distortion(sys, 3, 50, 4, 5);
  CHECK(c.constant == e.constant);
}

TEST_CASE("monotone refinement") {
  const auto t = lsv_map(0.5);
  const auto raw = elements_of(t);
  CHECK(check_expansion(raw, 10).verdict == Verdict::fail);
  CHECK(check_expansion(raw, 1000).verdict == Verdict::fail);
  const InducedSystem sys = induce(t, kY, 10000);
  const auto els = elements_of(sys, 20);
  const AxiomReport small = check_distortion(els, 20);
  const AxiomReport large = check_distortion(els, 200);
  for (std::size_t i = 0; i < els.size(); ++i) CHECK(large.per_element[i] >= small.per_element[i]);
  const AxiomReport e_small = check_expansion(els, 20);
  const AxiomReport e_large = check_expansion(els, 200);
  for (std::size_t i = 0; i < els.size(); ++i) CHECK(e_large.per_element[i] <= e_small.per_element[i]);
}
