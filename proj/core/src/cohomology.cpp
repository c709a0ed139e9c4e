#include "livsic/cohomology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "livsic/errors.hpp"
#include "livsic/numerics.hpp"

namespace livsic {

namespace {

constexpr double kDuplicateGap = 1e-14;
constexpr double kDuplicateTol = 1e-8;

std::string format_number(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

double birkhoff_sum(const PiecewiseMap& map, const Observable& f, double x, std::size_t n) {
  CompensatedSum s;
  if (n == 0) {
    map.owner(x);
    return 0.0;
  }
  for (std::size_t k = 0; k < n; ++k) {
    s += f(x);
    if (k + 1 < n) x = evaluate(map, x);
  }
  return s.value();
}

std::string ObstructionReport::verdict(const PiecewiseMap& map) const {
  if (!first_obstructed) return "unobstructed up to period " + std::to_string(max_period);
  const PeriodicOrbit& o = entries[*first_obstructed].orbit;
  if (o.period() == 1) return "obstructed at fixed point " + format_number(o.points.front());
  return "obstructed at orbit " + word_string(map, o.word);
}

ObstructionReport livsic_obstructions(const PiecewiseMap& map, const Observable& f,
                                      std::size_t max_period, double tol) {
  if (!(tol >= 0.0)) throw PreconditionError("obstruction tolerance must be nonnegative");
  PeriodicSearch search = periodic_points(map, max_period);
  ObstructionReport rep;
  rep.max_period = max_period;
  rep.tol = tol;
  rep.rejected = std::move(search.rejected);
  rep.entries.resize(search.orbits.size());
  parallel_for(search.orbits.size(), [&](std::size_t i) {
    CompensatedSum s;
    for (const double p : search.orbits[i].points) s += f(p);
    rep.entries[i] = Obstruction{std::move(search.orbits[i]), s.value()};
  });
  for (std::size_t i = 0; i < rep.entries.size(); ++i) {
    if (std::abs(rep.entries[i].sum) > tol) {
      rep.first_obstructed = i;
      break;
    }
  }
  return rep;
}

SampledFunction solve_coboundary(const PiecewiseMap& map, const Observable& f, std::size_t orbit_length,
                                 std::optional<double> x0, std::uint64_t seed) {
  if (orbit_length < 1000) throw PreconditionError("solve_coboundary needs orbit_length >= 1000");
  double x = x0 ? *x0 : CounterRng(derive_seed("solve-start", seed)).uniform_open(0);
  map.owner(x);

  RngStream noise(derive_seed("solve-dither", seed));
  std::vector<double> pts(orbit_length), vals(orbit_length);
  SampledFunction u;
  u.base_point = x;
  u.orbit_length = orbit_length;
  u.seed = seed;

  CompensatedSum s;
  double lo = 0.0, hi = 0.0;
  std::size_t next_decade = 1000;
  for (std::size_t k = 0; k < orbit_length; ++k) {
    pts[k] = x;
    vals[k] = -s.value();
    lo = std::min(lo, vals[k]);
    hi = std::max(hi, vals[k]);
    if (k + 1 == next_decade) {
      u.range_growth.push_back({k + 1, hi - lo});
      next_decade *= 10;
    }
    s += f(x);
    x = dithered_step(map, x, noise);
  }
  if (u.range_growth.empty() || u.range_growth.back().length != orbit_length) {
    u.range_growth.push_back({orbit_length, hi - lo});
  }
  if (u.range_growth.size() >= 2) {
    const RangeSample& a = u.range_growth.front();
    const RangeSample& b = u.range_growth.back();
    u.range_growing = b.range >= 2.0 * a.range && b.length >= 10 * a.length;
  }

  std::vector<std::size_t> order(orbit_length);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pts[a] < pts[b] || (pts[a] == pts[b] && a < b);
  });
  u.points.reserve(orbit_length);
  u.values.reserve(orbit_length);
  for (std::size_t i = 0; i < orbit_length;) {
    std::size_t j = i + 1;
    CompensatedSum group;
    group += vals[order[i]];
    while (j < orbit_length && pts[order[j]] - pts[order[j - 1]] <= kDuplicateGap) {
      const double gap = std::abs(vals[order[j]] - vals[order[i]]);
      if (gap > kDuplicateTol) {
        throw NotACoboundaryError("values of u disagree at coincident orbit points", pts[order[j]], gap);
      }
      group += vals[order[j]];
      ++j;
    }
    u.points.push_back(pts[order[i]]);
    u.values.push_back(group.value() / static_cast<double>(j - i));
    u.merged += j - i - 1;
    i = j;
  }
  return u;
}

double HolderEstimate::max_constant() const noexcept {
  double m = 0.0;
  for (const auto& b : bands) m = std::max(m, b.constant);
  return m;
}

HolderEstimate holder_estimate(const SampledFunction& u, double gamma, const HolderOptions& opt) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw PreconditionError("Hölder exponent must lie in (0,1]");
  if (opt.metric == Metric::symbolic && opt.map == nullptr) {
    throw PreconditionError("the symbolic metric needs the map");
  }
  if (opt.metric == Metric::symbolic && !(opt.tau > 0.0 && opt.tau < 1.0)) {
    throw ParameterError("tau must lie in (0,1)");
  }
  std::vector<double> p, v;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!opt.restriction || opt.restriction->contains(u.points[i])) {
      p.push_back(u.points[i]);
      v.push_back(u.values[i]);
    }
  }
  if (p.size() < 2) throw InsufficientDataError("fewer than 2 sample points in the domain");
  const std::size_t n = p.size();

  // symbolic: itinerary prefixes, re-sorted lexicographically so that pairs
  // sharing a prefix are contiguous
  const std::size_t depth = opt.max_band + 1;
  std::vector<Word> itin;
  if (opt.metric == Metric::symbolic) {
    itin.resize(n);
    parallel_for(n, [&](std::size_t i) {
      itin[i] = orbit(*opt.map, p[i], depth - 1).itinerary;
    });
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return itin[a] < itin[b]; });
    std::vector<double> p2(n), v2(n);
    std::vector<Word> i2(n);
    for (std::size_t i = 0; i < n; ++i) {
      p2[i] = p[order[i]];
      v2[i] = v[order[i]];
      i2[i] = std::move(itin[order[i]]);
    }
    p.swap(p2);
    v.swap(v2);
    itin.swap(i2);
  }
  auto lcp = [&](std::size_t a, std::size_t b) {
    const auto m = std::mismatch(itin[a].begin(), itin[a].end(), itin[b].begin(), itin[b].end());
    return static_cast<std::size_t>(m.first - itin[a].begin());
  };
  auto distance = [&](std::size_t a, std::size_t b) {
    if (opt.metric == Metric::euclidean) return std::abs(p[b] - p[a]);
    const std::size_t s = lcp(a, b);
    return s >= depth ? 0.0 : std::pow(opt.tau, static_cast<double>(s));
  };
  // first j > i for which pred(i, j) fails; pred is monotone (true then false)
  auto boundary = [&](std::size_t i, auto pred) {
    std::size_t lo = i + 1, hi = n;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (pred(i, mid)) lo = mid + 1;
      else hi = mid;
    }
    return lo;
  };

  const std::size_t n_bands = opt.metric == Metric::euclidean ? opt.max_band + 1 : depth;
  HolderEstimate est;
  est.gamma = gamma;
  est.metric = opt.metric;
  est.restriction = opt.restriction;
  est.points = n;
  est.stability_band_limit = opt.stability_band_limit;
  est.bands.resize(n_bands);
  const CounterRng rng(derive_seed("holder", opt.seed));

  parallel_for(n_bands, [&](std::size_t k) {
    std::vector<std::size_t> first(n), last(n);
    if (opt.metric == Metric::euclidean) {
      const double near = std::ldexp(1.0, -static_cast<int>(k) - 1);
      const double far = std::ldexp(1.0, -static_cast<int>(k));
      for (std::size_t i = 0; i < n; ++i) {
        first[i] = boundary(i, [&](std::size_t a, std::size_t b) { return p[b] - p[a] <= near; });
        last[i] = std::max(first[i], boundary(i, [&](std::size_t a, std::size_t b) { return p[b] - p[a] <= far; }));
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        first[i] = boundary(i, [&](std::size_t a, std::size_t b) { return lcp(a, b) >= k + 1; });
        last[i] = std::max(first[i], boundary(i, [&](std::size_t a, std::size_t b) { return lcp(a, b) >= k; }));
      }
    }
    std::vector<std::size_t> cum(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) cum[i + 1] = cum[i] + (last[i] - first[i]);
    const std::size_t total = cum[n];

    HolderBand band;
    band.k = k;
    band.pairs = total;
    auto visit = [&](std::size_t i, std::size_t j) {
      const double d = distance(i, j);
      if (d == 0.0) return;
      band.constant = std::max(band.constant, std::abs(v[j] - v[i]) / std::pow(d, gamma));
      ++band.evaluated;
    };
    if (total <= opt.max_pairs_per_band) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = first[i]; j < last[i]; ++j) visit(i, j);
      }
    } else {
      const CounterRng local = rng.substream(k);
      for (std::size_t m = 0; m < opt.max_pairs_per_band; ++m) {
        const auto t = std::min<std::size_t>(total - 1, static_cast<std::size_t>(local.uniform(m) * total));
        const std::size_t i = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), t) - cum.begin()) - 1;
        visit(i, first[i] + (t - cum[i]));
      }
    }
    band.reliable = band.evaluated >= opt.min_pairs;
    est.bands[k] = band;
  }, 1);

  std::optional<double> prev;
  std::size_t compared = 0;
  double ratio = 0.0;
  for (const auto& b : est.bands) {
    if (b.k > opt.stability_band_limit || !b.reliable) continue;
    if (prev) {
      double r = 1.0;
      if (*prev > 0.0 || b.constant > 0.0) {
        r = (*prev == 0.0 || b.constant == 0.0) ? std::numeric_limits<double>::infinity()
                                                : std::max(*prev / b.constant, b.constant / *prev);
      }
      ratio = std::max(ratio, r);
      ++compared;
    }
    prev = b.constant;
  }
  est.stability_ratio = compared == 0 ? std::numeric_limits<double>::quiet_NaN() : ratio;
  return est;
}

std::string to_string(LatticeOutcome o) {
  switch (o) {
    case LatticeOutcome::lattice:
      return "lattice found";
    case LatticeOutcome::no_lattice:
      return "no lattice";
    case LatticeOutcome::degenerate:
      return "degenerate";
  }
  return "no lattice";
}

std::string LatticeVerdict::summary() const {
  switch (outcome) {
    case LatticeOutcome::lattice:
      return "lattice found (λ=" + format_number(*lambda) + ", μ=" + format_number(mu) + ")";
    case LatticeOutcome::no_lattice:
      return "no lattice (aperiodic at tolerance)";
    case LatticeOutcome::degenerate:
      return "degenerate (pure drift)";
  }
  return {};
}

LatticeVerdict aperiodicity_test(const PiecewiseMap& map, const ObstructionReport& obs, std::size_t k_max,
                                 double tol) {
  if (obs.entries.size() < 2) throw PreconditionError("aperiodicity test needs at least two periodic orbits");
  if (k_max == 0 || k_max > 1000) throw PreconditionError("k_max must lie in 1..1000");
  if (!(tol > 0.0)) throw PreconditionError("tolerance must be positive");
  const auto anchor = std::find_if(obs.entries.begin(), obs.entries.end(),
                                   [](const Obstruction& o) { return o.orbit.period() == 1; });
  if (anchor == obs.entries.end()) throw PreconditionError("aperiodicity test needs a fixed point to anchor μ");

  LatticeVerdict out;
  out.tol = tol;
  out.mu = anchor->sum;
  for (auto it = obs.entries.begin(); it != obs.entries.end(); ++it) {
    if (it == anchor) continue;
    const double n = static_cast<double>(it->orbit.period());
    out.residuals.push_back({word_string(map, it->orbit.word), it->orbit.period(), it->sum, it->sum - n * out.mu});
  }

  std::optional<double> smallest;
  for (const auto& r : out.residuals) {
    const double a = std::abs(r.residual);
    if (a > tol && (!smallest || a < *smallest)) smallest = a;
  }
  if (!smallest) {
    out.outcome = LatticeOutcome::degenerate;
    return out;
  }
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double lambda = *smallest / static_cast<double>(k);
    out.candidates.push_back(lambda);
    const bool fits = std::all_of(out.residuals.begin(), out.residuals.end(), [&](const LatticeResidual& r) {
      return std::abs(r.residual - lambda * std::round(r.residual / lambda)) <= tol;
    });
    if (fits) {
      out.outcome = LatticeOutcome::lattice;
      out.lambda = lambda;
      return out;
    }
  }
  out.outcome = LatticeOutcome::no_lattice;
  return out;
}

}  // namespace livsic
