#include "livsic/transfer.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "livsic/errors.hpp"
#include "livsic/numerics.hpp"

namespace livsic {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double invert(const Branch& b, double y) { return b.inverse ? b.inverse(y) : solve_increasing(b, y); }

double sampled_inf_derivative(const Branch& b) {
  constexpr int kSamples = 1024;
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kSamples; ++i) m = std::min(m, b.derivative(b.domain.lo + (b.domain.hi - b.domain.lo) * i / kSamples));
  return m;
}

// Pointwise transfer operator on a uniform grid of the common image Y:
// (L h)(y) = sum_b h(v_b y) v_b'(y) + h(inf Y) * tail, with the preimages
// produced by `emit(y, sink)` calling sink(element, x, weight).
struct GridSystem {
  Interval image;
  std::vector<Interval> elements;
  double tail_weight = 0.0;  // mass of the unresolved cells, carried by h(inf Y)
  std::function<void(double, const std::function<void(std::size_t, double, double)>&)> emit;
};

struct TestFunction {
  std::vector<double> offset;  // value at the left end of each element
  std::vector<double> slope;
  double l1 = 0.0;
};

TestFunction random_test_function(const GridSystem& sys, const CounterRng& rng) {
  const std::size_t m = sys.elements.size();
  TestFunction t;
  t.offset.resize(m);
  t.slope.resize(m);
  double sup = 0.0, lip = 0.0;
  for (std::size_t e = 0; e < m; ++e) {
    const double len = sys.elements[e].length();
    double a = rng.uniform(2 * e);
    double s = (2.0 * rng.uniform(2 * e + 1) - 1.0) * 4.0;
    if (a + s * len < 0.0) s = -a / len;  // keep h >= 0
    t.offset[e] = a;
    t.slope[e] = s;
    sup = std::max({sup, a, a + s * len});
    lip = std::max(lip, std::abs(s));
  }
  const double norm = sup + lip;
  for (std::size_t e = 0; e < m; ++e) {
    t.offset[e] /= norm;
    t.slope[e] /= norm;
    const double len = sys.elements[e].length();
    t.l1 += len * (t.offset[e] + 0.5 * t.slope[e] * len);
  }
  return t;
}

double l_norm(const Eigen::VectorXd& g, double spacing) {
  double lip = 0.0;
  for (Eigen::Index i = 0; i + 1 < g.size(); ++i) lip = std::max(lip, std::abs(g[i + 1] - g[i]));
  return g.cwiseAbs().maxCoeff() + lip / spacing;
}

DoeblinFortetEstimate estimate(const GridSystem& sys, const DoeblinFortetOptions& opt) {
  if (opt.p_max < 2) throw PreconditionError("doeblin_fortet_estimate needs p_max >= 2");
  if (opt.n_bins < 16 || opt.test_functions == 0) throw PreconditionError("grid or test-function count too small");
  const std::size_t grid = opt.n_bins;
  const double y0 = sys.image.lo;
  const double spacing = sys.image.length() / static_cast<double>(grid - 1);
  const std::size_t n_tests = opt.test_functions;

  std::vector<TestFunction> tests;
  const CounterRng rng(derive_seed("doeblin-fortet", opt.seed));
  for (std::size_t t = 0; t < n_tests; ++t) tests.push_back(random_test_function(sys, rng.substream(t)));

  std::vector<std::vector<Eigen::Triplet<double>>> rows(grid);
  Eigen::MatrixXd first(grid, n_tests);
  parallel_for(grid, [&](std::size_t i) {
    const double y = std::min(sys.image.hi, y0 + spacing * static_cast<double>(i));
    auto& row = rows[i];
    std::ptrdiff_t run_col = -1;
    double run_lo = 0.0, run_hi = 0.0;
    std::vector<double> acc(n_tests, 0.0);
    auto flush = [&] {
      if (run_col < 0) return;
      row.emplace_back(static_cast<int>(i), static_cast<int>(run_col), run_lo);
      if (run_hi != 0.0) row.emplace_back(static_cast<int>(i), static_cast<int>(run_col + 1), run_hi);
    };
    sys.emit(y, [&](std::size_t e, double x, double w) {
      for (std::size_t t = 0; t < n_tests; ++t) {
        acc[t] += w * (tests[t].offset[e] + tests[t].slope[e] * (x - sys.elements[e].lo));
      }
      const double pos = std::clamp((x - y0) / spacing, 0.0, static_cast<double>(grid - 1));
      auto j = static_cast<std::ptrdiff_t>(std::floor(pos));
      if (j >= static_cast<std::ptrdiff_t>(grid - 1)) j = static_cast<std::ptrdiff_t>(grid - 2);
      const double theta = pos - static_cast<double>(j);
      if (j != run_col) {
        flush();
        run_col = j;
        run_lo = run_hi = 0.0;
      }
      run_lo += w * (1.0 - theta);
      run_hi += w * theta;
    });
    if (sys.tail_weight > 0.0) {
      flush();
      run_col = 0;
      run_lo = sys.tail_weight;
      run_hi = 0.0;
      for (std::size_t t = 0; t < n_tests; ++t) acc[t] += sys.tail_weight * tests[t].offset.back();
    }
    flush();
    for (std::size_t t = 0; t < n_tests; ++t) first(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = acc[t];
  }, 16);

  std::vector<Eigen::Triplet<double>> triplets;
  for (auto& r : rows) triplets.insert(triplets.end(), r.begin(), r.end());
  Eigen::SparseMatrix<double, Eigen::RowMajor> L(static_cast<Eigen::Index>(grid), static_cast<Eigen::Index>(grid));
  L.setFromTriplets(triplets.begin(), triplets.end());

  const std::size_t P = 4 * opt.p_max;
  std::vector<std::vector<double>> norms(n_tests, std::vector<double>(P + 1));
  parallel_for(n_tests, [&](std::size_t t) {
    Eigen::VectorXd g = first.col(static_cast<Eigen::Index>(t));
    norms[t][1] = l_norm(g, spacing);
    for (std::size_t p = 2; p <= P; ++p) {
      g = L * g;
      norms[t][p] = l_norm(g, spacing);
    }
  }, 1);

  DoeblinFortetEstimate out;
  out.grid_points = grid;
  out.elements = sys.elements.size();
  out.tail_length = sys.tail_weight * sys.image.length();
  for (std::size_t t = 0; t < n_tests; ++t) out.M0 = std::max(out.M0, norms[t][P] / tests[t].l1);

  std::vector<double> ps, logs;
  for (std::size_t p = 1; p <= opt.p_max; ++p) {
    double r = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n_tests; ++t) r = std::max(r, norms[t][p] - out.M0 * tests[t].l1);
    if (r > 0.0) {
      out.r.push_back(r);
      ps.push_back(static_cast<double>(p));
      logs.push_back(std::log(r));
    } else {
      out.r.push_back(kNaN);
    }
  }
  if (ps.size() < 2) {
    out.eta = kNaN;
    out.M = out.M0;
    out.note = "fewer than two positive r_p; decay rate not identifiable";
    return out;
  }
  const double mp = std::accumulate(ps.begin(), ps.end(), 0.0) / ps.size();
  const double ml = std::accumulate(logs.begin(), logs.end(), 0.0) / logs.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    sxy += (ps[i] - mp) * (logs[i] - ml);
    sxx += (ps[i] - mp) * (ps[i] - mp);
  }
  out.eta = std::exp(sxy / sxx);
  out.M = out.M0;
  for (std::size_t i = 0; i < ps.size(); ++i) out.M = std::max(out.M, std::exp(logs[i]) / std::pow(out.eta, ps[i]));
  out.passed = out.eta < 1.0 - 1e-3;
  out.note = "grid-level estimate on " + std::to_string(grid) + " points";
  return out;
}

}  // namespace

Eigen::VectorXd UlamOperator::column_sums() const {
  return Eigen::RowVectorXd::Ones(matrix.rows()) * matrix;
}

UlamOperator ulam_matrix(const PiecewiseMap& map, std::size_t n_bins) {
  if (n_bins < 2) throw PreconditionError("ulam_matrix needs at least 2 bins");
  const double nb = static_cast<double>(n_bins);
  auto edge = [nb](std::size_t t) { return static_cast<double>(t) / nb; };

  // preimages of every bin edge through every branch, clamped to its image
  std::vector<std::vector<double>> pre(map.size(), std::vector<double>(n_bins + 1));
  for (std::size_t s = 0; s < map.size(); ++s) {
    const Branch& b = map.branch(static_cast<Symbol>(s));
    parallel_for(n_bins + 1, [&](std::size_t t) {
      pre[s][t] = invert(b, std::clamp(edge(t), b.image.lo, b.image.hi));
    });
  }

  std::vector<std::vector<Eigen::Triplet<double>>> rows(n_bins);
  parallel_for(n_bins, [&](std::size_t i) {
    for (std::size_t s = 0; s < map.size(); ++s) {
      const double a = pre[s][i], c = pre[s][i + 1];
      if (!(c > a)) continue;
      const auto j0 = std::min(n_bins - 1, static_cast<std::size_t>(a * nb));
      for (std::size_t j = j0; j < n_bins && edge(j) < c; ++j) {
        const double overlap = std::min(c, edge(j + 1)) - std::max(a, edge(j));
        if (overlap > 0.0) rows[i].emplace_back(static_cast<int>(i), static_cast<int>(j), overlap * nb);
      }
    }
  });
  std::vector<Eigen::Triplet<double>> triplets;
  for (auto& r : rows) triplets.insert(triplets.end(), r.begin(), r.end());

  UlamOperator op;
  op.n_bins = n_bins;
  op.map_descriptor = map.describe();
  op.matrix.resize(static_cast<Eigen::Index>(n_bins), static_cast<Eigen::Index>(n_bins));
  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  op.matrix.makeCompressed();
  return op;
}

Eigen::VectorXd invariant_density(const UlamOperator& op, double tol, std::size_t max_iterations) {
  const double w = op.bin_width();
  Eigen::VectorXd v = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(op.n_bins));
  for (std::size_t it = 0; it < max_iterations; ++it) {
    Eigen::VectorXd next = op.matrix * v;
    next /= next.sum() * w;
    const double diff = (next - v).cwiseAbs().sum() * w;
    v.swap(next);
    if (diff <= tol) return v;
  }
  throw NumericError("invariant density did not converge in " + std::to_string(max_iterations) + " iterations");
}

Eigen::VectorXd bin_averages(const RealFn& fn, std::size_t n_bins) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(n_bins));
  const double nb = static_cast<double>(n_bins);
  parallel_for(n_bins, [&](std::size_t i) {
    const double a = static_cast<double>(i) / nb, b = static_cast<double>(i + 1) / nb;
    out[static_cast<Eigen::Index>(i)] = boost::math::quadrature::gauss<double, 8>::integrate(fn, a, b) * nb;
  });
  return out;
}

double density_integral(const Eigen::VectorXd& density, const RealFn& fn) {
  const Eigen::VectorXd avg = bin_averages(fn, static_cast<std::size_t>(density.size()));
  return density.dot(avg) / static_cast<double>(density.size());
}

InvariantMean invariant_mean(const PiecewiseMap& map, const RealFn& f, const InvariantMeanOptions& opt) {
  if (opt.steps == 0) throw PreconditionError("invariant_mean needs a positive step count");
  InvariantMean out;
  out.steps = opt.steps;
  out.burn_in = opt.burn_in;
  out.n_bins = opt.n_bins;
  out.tolerance = opt.tolerance;

  RngStream noise(derive_seed("invariant-mean-dither", opt.seed));
  double x = CounterRng(derive_seed("invariant-mean-start", opt.seed)).uniform_open(0);
  for (std::size_t k = 0; k < opt.burn_in; ++k) x = dithered_step(map, x, noise);
  CompensatedSum s;
  for (std::size_t k = 0; k < opt.steps; ++k) {
    s += f(x);
    x = dithered_step(map, x, noise);
  }
  out.birkhoff = s.value() / static_cast<double>(opt.steps);

  const UlamOperator op = ulam_matrix(map, opt.n_bins);
  out.ulam = density_integral(invariant_density(op), f);
  if (!(std::abs(out.birkhoff - out.ulam) <= opt.tolerance)) {
    throw NumericError("invariant mean disagrees: orbit average " + std::to_string(out.birkhoff) +
                       ", Ulam quadrature " + std::to_string(out.ulam));
  }
  out.value = out.ulam;
  return out;
}

DoeblinFortetEstimate doeblin_fortet_estimate(const PiecewiseMap& map, const DoeblinFortetOptions& opt) {
  if (!map.full_branched()) throw PreconditionError("doeblin_fortet_estimate needs a full-branch map");
  for (const Branch& b : map.branches()) {
    if (!(sampled_inf_derivative(b) > 1.0 + 1e-9)) {
      throw PreconditionError("map " + map.describe() + " is not uniformly expanding on branch " + b.label +
                              "; estimate the induced system instead");
    }
  }
  GridSystem sys;
  sys.image = Interval::closed(0.0, 1.0);
  for (const Branch& b : map.branches()) sys.elements.push_back(b.domain);
  sys.emit = [&map](double y, const std::function<void(std::size_t, double, double)>& sink) {
    for (std::size_t s = 0; s < map.size(); ++s) {
      const Branch& b = map.branch(static_cast<Symbol>(s));
      const double x = invert(b, y);
      sink(s, x, 1.0 / b.derivative(x));
    }
  };
  return estimate(sys, opt);
}

DoeblinFortetEstimate doeblin_fortet_estimate(const InducedSystem& system, const DoeblinFortetOptions& opt) {
  if (!(system.expansion() > 1.0 + 1e-9)) throw PreconditionError("induced system is not uniformly expanding");
  const Interval y = system.base();
  std::size_t cut = system.resolved();
  for (std::size_t n = 1; n <= system.resolved(); ++n) {
    if (system.cell(n).lo - y.lo <= opt.tail_tolerance) {
      cut = n;
      break;
    }
  }
  GridSystem sys;
  sys.image = y.closure();
  for (std::size_t n = 1; n <= cut; ++n) sys.elements.push_back(system.cell(n));
  const Interval tail{y.lo, system.cell(cut).lo, y.lo_open, false};
  sys.elements.push_back(tail);
  sys.tail_weight = tail.length() / y.length();

  const PiecewiseMap& map = system.base_map();
  const Branch ret = map.branch(system.return_branch());
  const Branch exc = map.branch(system.excursion_branch());
  sys.emit = [ret, exc, cut](double yv, const std::function<void(std::size_t, double, double)>& sink) {
    double z = yv, scale = 1.0;
    for (std::size_t n = 1; n <= cut; ++n) {
      const double x = invert(ret, z);
      sink(n - 1, x, scale / ret.derivative(x));
      if (n == cut) break;
      z = invert(exc, z);
      scale /= exc.derivative(z);
    }
  };
  return estimate(sys, opt);
}

VarianceEstimate green_kubo_variance(const PiecewiseMap& map, const Observable& f, const VarianceParams& prm) {
  VarianceEstimate out;
  if (prm.mode == VarianceMode::ulam) {
    out.method = "green-kubo-ulam";
    const UlamOperator op = ulam_matrix(map, prm.n_bins);
    const Eigen::VectorXd rho = invariant_density(op, prm.density_tol);
    const double w = op.bin_width();
    Eigen::VectorXd fb = bin_averages(f.fn, prm.n_bins);
    out.centering = rho.dot(fb) * w;
    fb.array() -= out.centering;

    Eigen::VectorXd v = fb.cwiseProduct(rho);
    const double c0 = v.dot(fb) * w;
    out.correlations.push_back(c0);
    CompensatedSum partial;
    partial += c0;
    out.partial_sums.push_back(partial.value());
    std::size_t small_run = 0;
    bool plateau = false;
    for (std::size_t n = 1; n <= prm.max_lag; ++n) {
      v = op.matrix * v;
      const double c = v.dot(fb) * w;
      out.correlations.push_back(c);
      partial += 2.0 * c;
      out.partial_sums.push_back(partial.value());
      small_run = std::abs(c) < prm.plateau_tol ? small_run + 1 : 0;
      if (small_run >= prm.plateau_run) {
        out.truncation = n;
        plateau = true;
        break;
      }
    }
    if (!plateau) out.truncation = prm.max_lag;
    out.sigma2 = partial.value();
    const bool slow_mixing = map.alpha() && *map.alpha() >= 0.5;
    if (slow_mixing || !plateau) out.flags.emplace_back("truncation-unreliable");
    if (slow_mixing) out.sigma2 = kNaN;
    out.ci_low = out.ci_high = kNaN;
    return out;
  }

  out.method = "batch-means-mc";
  if (prm.streams == 0 || prm.batch_length == 0) throw PreconditionError("monte-carlo variance needs streams and batches");
  const std::size_t per_stream = prm.steps / prm.streams / prm.batch_length;
  if (per_stream == 0) throw PreconditionError("too few steps for one batch per stream");
  const std::size_t batches = per_stream * prm.streams;
  std::vector<double> means(batches);
  const CounterRng streams(derive_seed("variance-mc", prm.seed));
  parallel_for(prm.streams, [&](std::size_t s) {
    const CounterRng local = streams.substream(s);
    RngStream noise(local.bits(1));
    double x = local.uniform_open(0);
    for (std::size_t k = 0; k < prm.burn_in; ++k) x = dithered_step(map, x, noise);
    for (std::size_t b = 0; b < per_stream; ++b) {
      CompensatedSum sum;
      for (std::size_t k = 0; k < prm.batch_length; ++k) {
        sum += f(x);
        x = dithered_step(map, x, noise);
      }
      means[s * per_stream + b] = sum.value() / static_cast<double>(prm.batch_length);
    }
  }, 1);

  const double L = static_cast<double>(prm.batch_length);
  auto batch_variance = [&](const auto& pick) {
    CompensatedSum m;
    for (std::size_t i = 0; i < batches; ++i) m += pick(i);
    const double mean = m.value() / static_cast<double>(batches);
    CompensatedSum ss;
    for (std::size_t i = 0; i < batches; ++i) {
      const double d = pick(i) - mean;
      ss += d * d;
    }
    return std::pair{mean, L * ss.value() / static_cast<double>(batches - 1)};
  };
  const auto [mean, var] = batch_variance([&](std::size_t i) { return means[i]; });
  out.centering = mean;
  out.sigma2 = var;
  out.batches = batches;
  out.batch_length = prm.batch_length;
  out.steps = batches * prm.batch_length;

  if (prm.bootstrap > 0 && batches > 1) {
    std::vector<double> boot(prm.bootstrap);
    const CounterRng rng(derive_seed("variance-bootstrap", prm.seed));
    parallel_for(prm.bootstrap, [&](std::size_t r) {
      const CounterRng local = rng.substream(r);
      boot[r] = batch_variance([&](std::size_t i) {
        const auto idx = std::min(batches - 1, static_cast<std::size_t>(local.uniform(i) * static_cast<double>(batches)));
        return means[idx];
      }).second;
    }, 8);
    std::sort(boot.begin(), boot.end());
    const auto lo = static_cast<std::size_t>(std::floor(0.025 * static_cast<double>(prm.bootstrap)));
    const auto hi = std::min(prm.bootstrap - 1, static_cast<std::size_t>(std::ceil(0.975 * static_cast<double>(prm.bootstrap))) - 1);
    out.ci_low = boot[lo];
    out.ci_high = boot[hi];
  } else {
    out.ci_low = out.ci_high = kNaN;
  }
  return out;
}

}  // namespace livsic
