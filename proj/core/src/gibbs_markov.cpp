#include "livsic/gibbs_markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "livsic/errors.hpp"
#include "livsic/numerics.hpp"

namespace livsic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kContainTol = 1e-12;

// closure endpoints first, then interior draws keyed by (element, index), so
// a larger sample set always contains a smaller one
std::vector<double> sample_points(const Interval& dom, const CounterRng& rng, std::size_t samples) {
  std::vector<double> pts{dom.lo, dom.hi};
  for (std::size_t j = 2; j < samples; ++j) pts.push_back(dom.lo + (dom.hi - dom.lo) * rng.uniform_open(j));
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double random_point(const Interval& i, const CounterRng& rng, std::uint64_t counter) {
  return i.lo + (i.hi - i.lo) * rng.uniform_open(counter);
}

double invert(const Branch& b, double y) { return b.inverse ? b.inverse(y) : solve_increasing(b, y); }

bool contained(const Interval& inner, const Interval& outer) {
  return inner.lo >= outer.lo - kContainTol && inner.hi <= outer.hi + kContainTol;
}

struct Extremum {
  double value = 0.0;
  double x = 0.0;
  double y = 0.0;
};

Witness pair_witness(const Extremum& e, const std::string& element, std::string detail) {
  return Witness{{e.x, e.y}, element, e.value, std::move(detail)};
}

// last-quartile mean <= 2 x first-quartile mean; trivially true below 4 entries
bool no_upward_trend(const std::vector<double>& v) {
  if (v.size() < 4) return true;
  const std::size_t q = v.size() / 4;
  const double first = std::accumulate(v.begin(), v.begin() + q, 0.0) / q;
  const double last = std::accumulate(v.end() - q, v.end(), 0.0) / q;
  return last <= 2.0 * first;
}

std::size_t argmax_last_quarter(const std::vector<double>& v) {
  const std::size_t q = v.size() / 4;
  return static_cast<std::size_t>(std::max_element(v.end() - q, v.end()) - v.begin());
}

// pair (x, x+h) or (x-h, x) inside the closure with the smallest chord ratio,
// shrinking h until the ratio drops to the threshold
std::optional<Extremum> expansion_witness(const Branch& b, double x, double threshold) {
  const double lo = b.domain.lo, hi = b.domain.hi;
  std::optional<Extremum> best;
  for (int j = 1; j <= 1074; ++j) {
    const double h = std::ldexp(hi - lo, -j);
    if (h == 0.0) break;
    double a = x, c = x + h;
    if (c > hi) {
      a = x - h;
      c = x;
    }
    if (a < lo || !(c > a)) continue;
    const double ratio = (b.forward(c) - b.forward(a)) / (c - a);
    if (!best || ratio < best->value) best = Extremum{ratio, a, c};
    if (ratio <= threshold) return Extremum{ratio, a, c};
  }
  return std::nullopt;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

std::vector<Branch> elements_of(const PiecewiseMap& map) {
  return {map.branches().begin(), map.branches().end()};
}

std::vector<Branch> elements_of(const InducedSystem& system, std::size_t n_cells) {
  return system.cells(n_cells);
}

AxiomReport check_expansion(std::span<const Branch> elements, std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw PreconditionError("check_expansion needs at least 2 samples per element");
  if (elements.empty()) throw PreconditionError("check_expansion: no elements");
  const CounterRng rng(seed);
  std::vector<Extremum> worst(elements.size());
  parallel_for(elements.size(), [&](std::size_t e) {
    const Branch& b = elements[e];
    const auto pts = sample_points(b.domain, rng.substream(e), samples);
    Extremum m{kInf, 0.0, 0.0};
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double d = b.derivative(pts[i]);
      if (d < m.value) m = {d, pts[i], pts[i]};
      if (i + 1 < pts.size()) {
        const double r = (b.forward(pts[i + 1]) - b.forward(pts[i])) / (pts[i + 1] - pts[i]);
        if (r < m.value) m = {r, pts[i], pts[i + 1]};
      }
    }
    worst[e] = m;
  }, 1);

  AxiomReport rep;
  rep.axiom = "expansion";
  rep.samples = samples * elements.size();
  std::size_t arg = 0;
  for (std::size_t e = 0; e < worst.size(); ++e) {
    rep.per_element.push_back(worst[e].value);
    if (worst[e].value < worst[arg].value) arg = e;
  }
  rep.constant = worst[arg].value;
  const double threshold = 1.0 + kExpansionMargin;
  if (rep.constant > threshold) {
    rep.verdict = Verdict::pass;
    rep.note = "no pair with ratio <= 1 + 1e-9 found at this sample size";
    rep.witness = pair_witness(worst[arg], elements[arg].label, "least expanding sample");
    return rep;
  }
  if (auto w = expansion_witness(elements[arg], worst[arg].x, threshold)) {
    rep.verdict = Verdict::fail;
    rep.witness = pair_witness(*w, elements[arg].label, "chord ratio |Fx-Fy|/|x-y| <= 1 + 1e-9");
    rep.note = "expansion constant not bounded away from 1";
  } else {
    rep.verdict = Verdict::inconclusive;
    rep.witness = pair_witness(worst[arg], elements[arg].label, "derivative sample only");
    rep.note = "sampled derivative <= 1 + 1e-9 but no violating pair is representable";
  }
  return rep;
}

AxiomReport check_distortion(std::span<const Branch> elements, std::size_t samples, std::uint64_t seed) {
  if (samples < 1) throw PreconditionError("check_distortion needs at least one sample pair");
  if (elements.empty()) throw PreconditionError("check_distortion: no elements");
  const CounterRng rng(seed);
  std::vector<Extremum> worst(elements.size());
  parallel_for(elements.size(), [&](std::size_t e) {
    const Branch& b = elements[e];
    const CounterRng local = rng.substream(e);
    Extremum m{0.0, b.domain.lo, b.domain.hi};
    for (std::size_t j = 0; j < samples; ++j) {
      const double x = random_point(b.domain, local, 2 * j);
      const double y = random_point(b.domain, local, 2 * j + 1);
      const double dist = std::abs(b.forward(x) - b.forward(y));
      if (dist == 0.0) continue;
      const double q = std::abs(1.0 - b.derivative(y) / b.derivative(x)) / dist;
      if (!(q <= m.value)) m = {q, x, y};
    }
    worst[e] = m;
  }, 1);

  AxiomReport rep;
  rep.axiom = "distortion";
  rep.samples = samples * elements.size();
  std::size_t arg = 0;
  for (std::size_t e = 0; e < worst.size(); ++e) {
    rep.per_element.push_back(worst[e].value);
    if (!(worst[e].value <= worst[arg].value)) arg = e;
  }
  rep.constant = worst[arg].value;
  if (!std::isfinite(rep.constant)) {
    rep.verdict = Verdict::fail;
    rep.witness = pair_witness(worst[arg], elements[arg].label, "unbounded distortion quotient");
    return rep;
  }
  if (!no_upward_trend(rep.per_element)) {
    const std::size_t e = argmax_last_quarter(rep.per_element);
    rep.verdict = Verdict::fail;
    rep.witness = pair_witness(worst[e], elements[e].label,
                               "last-quartile mean exceeds twice the first-quartile mean");
    rep.note = "distortion constants grow with the element index";
    return rep;
  }
  rep.verdict = Verdict::pass;
  rep.witness = pair_witness(worst[arg], elements[arg].label, "largest distortion quotient");
  rep.note = "bounded at this sample size, no upward trend across elements";
  return rep;
}

AxiomReport check_bip(std::span<const Branch> elements) {
  const std::size_t m = elements.size();
  if (m == 0) throw PreconditionError("check_bip: no elements");
  // inside[a][b]: element b lies inside the image of a
  std::vector<std::vector<bool>> inside(m, std::vector<bool>(m));
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) inside[a][b] = contained(elements[b].domain, elements[a].image);
  }
  AxiomReport rep;
  rep.axiom = "big-images-and-preimages";
  rep.samples = m * m;

  // each requirement is a set of admissible witnesses; all must be hit
  std::vector<std::vector<bool>> needs;
  std::vector<std::string> needs_desc;
  for (std::size_t a = 0; a < m; ++a) {
    std::vector<bool> image(m), preimage(m);
    for (std::size_t w = 0; w < m; ++w) {
      image[w] = inside[a][w];
      preimage[w] = inside[w][a];
    }
    needs.push_back(std::move(image));
    needs_desc.push_back("image of " + elements[a].label + " contains no element");
    needs.push_back(std::move(preimage));
    needs_desc.push_back(elements[a].label + " lies in no element's image");
  }
  for (std::size_t r = 0; r < needs.size(); ++r) {
    if (std::none_of(needs[r].begin(), needs[r].end(), [](bool b) { return b; })) {
      rep.verdict = Verdict::fail;
      rep.witness = Witness{{}, elements[r / 2].label, 0.0, needs_desc[r]};
      rep.note = "no finite witness set exists";
      return rep;
    }
  }

  std::vector<bool> hit(needs.size(), false);
  std::size_t remaining = needs.size();
  while (remaining > 0) {
    std::size_t best = 0, best_count = 0;
    for (std::size_t w = 0; w < m; ++w) {
      std::size_t count = 0;
      for (std::size_t r = 0; r < needs.size(); ++r) count += !hit[r] && needs[r][w];
      if (count > best_count) {
        best = w;
        best_count = count;
      }
    }
    rep.witness_set.push_back(elements[best].label);
    for (std::size_t r = 0; r < needs.size(); ++r) {
      if (!hit[r] && needs[r][best]) {
        hit[r] = true;
        --remaining;
      }
    }
  }
  rep.verdict = Verdict::pass;
  rep.constant = static_cast<double>(rep.witness_set.size());
  rep.note = rep.witness_set.size() == 1 ? "singleton witness" : "greedy witness set";
  return rep;
}

std::vector<AxiomReport> check_tower_axioms(const YoungTower& tower, std::size_t n_columns,
                                            std::size_t samples, std::uint64_t seed) {
  if (samples < 1) throw PreconditionError("check_tower_axioms needs at least one sample");
  const std::size_t cols = std::min(n_columns, tower.columns());
  if (cols == 0) throw PreconditionError("check_tower_axioms: tower has no resolved columns");
  const CounterRng rng(derive_seed("tower", seed));
  const Interval base = tower.base();

  auto jacobian = [&](std::size_t n, double x) {
    double d = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      d *= tower.step_derivative(n, k, x);
      x = tower.advance(n, k, x, 1);
    }
    return d;
  };

  struct Column {
    std::size_t level_violations = 0;
    Extremum level_witness;
    Extremum expansion{kInf, 0, 0};
    Extremum contraction{0.0, 0, 0};
    Extremum distortion{0.0, 0, 0};
  };
  std::vector<Column> out(cols);
  parallel_for(cols, [&](std::size_t i) {
    const std::size_t n = i + 1;
    Column c;
    for (std::size_t k = 0; k < n; ++k) {
      const Interval lvl = tower.level(n, k);
      const Interval next = k + 1 < n ? tower.level(n, k + 1) : base;
      const CounterRng local = rng.substream(n * (n - 1) / 2 + k);
      for (std::size_t j = 0; j < samples; ++j) {
        const double x = random_point(lvl, local, 3 * j);
        const double y = random_point(lvl, local, 3 * j + 1);
        const double tx = tower.advance(n, k, x, 1);
        if (!next.contains_closure(tx, 1e-9)) {
          if (c.level_violations++ == 0) c.level_witness = {tx, x, tx};
        }
        const double fx = tower.advance(n, k, x, n - k);
        const double fy = tower.advance(n, k, y, n - k);
        const double back = std::abs(x - y) / std::abs(fx - fy);
        if (!(back <= c.contraction.value)) c.contraction = {back, x, y};
        if (k == 0) {
          const double ratio = std::abs(fx - fy) / std::abs(x - y);
          if (ratio < c.expansion.value) c.expansion = {ratio, x, y};
          const double jx = jacobian(n, x);
          if (jx < c.expansion.value) c.expansion = {jx, x, x};
        }
        if (k + 1 == n) {
          // one step from the top level back to the base
          const double ty = tower.advance(n, k, y, 1);
          const double dist = std::abs(1.0 - tower.step_derivative(n, k, y) / tower.step_derivative(n, k, x)) /
                              std::abs(tx - ty);
          if (!(dist <= c.distortion.value)) c.distortion = {dist, x, y};
        }
      }
    }
    out[i] = c;
  }, 1);

  auto label = [](std::size_t i) { return "column " + std::to_string(i + 1); };
  std::vector<AxiomReport> reports;

  AxiomReport levels;
  levels.axiom = "tower-level-map";
  levels.samples = samples * tower.level_count();
  for (std::size_t i = 0; i < cols; ++i) {
    levels.per_element.push_back(static_cast<double>(out[i].level_violations));
    levels.constant += static_cast<double>(out[i].level_violations);
    if (out[i].level_violations > 0 && !levels.witness) {
      levels.witness = Witness{{out[i].level_witness.x}, label(i), out[i].level_witness.value,
                               "image left the next level"};
    }
  }
  levels.verdict = levels.witness ? Verdict::fail : Verdict::pass;
  levels.note = "T maps each level into the next and the top level into the base";
  reports.push_back(std::move(levels));

  AxiomReport expansion;
  expansion.axiom = "tower-expansion";
  expansion.samples = samples * cols;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < cols; ++i) {
    expansion.per_element.push_back(out[i].expansion.value);
    if (out[i].expansion.value < out[arg].expansion.value) arg = i;
  }
  expansion.constant = out[arg].expansion.value;
  expansion.verdict = expansion.constant > 1.0 + kExpansionMargin ? Verdict::pass : Verdict::fail;
  expansion.witness = pair_witness(out[arg].expansion, label(arg), "least expansion at the return time");
  reports.push_back(std::move(expansion));

  AxiomReport contraction;
  contraction.axiom = "tower-backward-contraction";
  contraction.samples = samples * tower.level_count();
  arg = 0;
  for (std::size_t i = 0; i < cols; ++i) {
    contraction.per_element.push_back(out[i].contraction.value);
    if (!(out[i].contraction.value <= out[arg].contraction.value)) arg = i;
  }
  contraction.constant = out[arg].contraction.value;
  contraction.verdict = std::isfinite(contraction.constant) ? Verdict::pass : Verdict::fail;
  contraction.witness = pair_witness(out[arg].contraction, label(arg), "largest |x-y| / |T^{R-k}x - T^{R-k}y|");
  reports.push_back(std::move(contraction));

  AxiomReport distortion;
  distortion.axiom = "tower-distortion";
  distortion.samples = samples * cols;
  arg = 0;
  for (std::size_t i = 0; i < cols; ++i) {
    distortion.per_element.push_back(out[i].distortion.value);
    if (!(out[i].distortion.value <= out[arg].distortion.value)) arg = i;
  }
  distortion.constant = out[arg].distortion.value;
  if (!std::isfinite(distortion.constant)) {
    distortion.verdict = Verdict::fail;
  } else if (!no_upward_trend(distortion.per_element)) {
    distortion.verdict = Verdict::fail;
    arg = argmax_last_quarter(distortion.per_element);
    distortion.note = "distortion constants grow with the column";
  } else {
    distortion.verdict = Verdict::pass;
  }
  distortion.witness = pair_witness(out[arg].distortion, label(arg), "largest |1 - T'(y)/T'(x)| / |Tx - Ty| on the top level");
  reports.push_back(std::move(distortion));
  return reports;
}

AxiomReport check_iterate_distortion(std::span<const Branch> elements, std::size_t k_max,
                                     std::size_t samples, std::size_t symbol_limit, std::uint64_t seed) {
  if (k_max == 0 || k_max > 6) throw PreconditionError("check_iterate_distortion: k_max must be in 1..6");
  if (elements.empty() || samples == 0) throw PreconditionError("check_iterate_distortion: nothing to sample");
  const Interval image = elements.front().image.closure();
  for (const Branch& b : elements) {
    if (std::abs(b.image.lo - image.lo) > kContainTol || std::abs(b.image.hi - image.hi) > kContainTol) {
      throw PreconditionError("check_iterate_distortion needs elements with a common full image");
    }
  }
  const std::size_t symbols = std::max<std::size_t>(1, std::min(symbol_limit, elements.size()));
  const CounterRng rng(derive_seed("iterate-distortion", seed));

  struct Draw {
    double bound = 1.0;
    Extremum witness{1.0, 0, 0};
    std::size_t skipped = 0;
  };
  std::vector<Draw> per_k(k_max);
  parallel_for(k_max, [&](std::size_t i) {
    const std::size_t k = i + 1;
    const CounterRng local = rng.substream(k);
    Draw d;
    std::vector<std::size_t> word(k);
    for (std::size_t j = 0; j < samples; ++j) {
      const std::uint64_t base = j * (k + 2);
      for (std::size_t s = 0; s < k; ++s) {
        word[s] = std::min(symbols - 1, static_cast<std::size_t>(local.uniform(base + s) * symbols));
      }
      double z1 = random_point(image, local, base + k);
      double z2 = random_point(image, local, base + k + 1);
      if (z1 > z2) std::swap(z1, z2);
      auto pull = [&](double y) {
        for (std::size_t s = k; s-- > 0;) y = invert(elements[word[s]], y);
        return y;
      };
      const double cyl = pull(image.hi) - pull(image.lo);
      const double part = pull(z2) - pull(z1);
      if (!(cyl > 0.0) || !(part > 0.0) || z2 == z1) {
        ++d.skipped;
        continue;
      }
      const double r = (part / cyl) / ((z2 - z1) / image.length());
      const double b = std::max(r, 1.0 / r);
      if (!(b <= d.bound)) {
        d.bound = b;
        d.witness = {b, z1, z2};
      }
    }
    per_k[i] = d;
  }, 1);

  AxiomReport rep;
  rep.axiom = "iterate-distortion";
  rep.samples = samples * k_max;
  std::size_t arg = 0, skipped = 0;
  for (std::size_t i = 0; i < k_max; ++i) {
    rep.per_element.push_back(per_k[i].bound);
    skipped += per_k[i].skipped;
    if (!(per_k[i].bound <= per_k[arg].bound)) arg = i;
  }
  rep.constant = per_k[arg].bound;
  rep.verdict = std::isfinite(rep.constant) ? Verdict::pass : Verdict::fail;
  rep.witness = pair_witness(per_k[arg].witness, "k=" + std::to_string(arg + 1), "Z endpoints of the worst ratio");
  rep.note = "per_element lists the bound for cylinder length k = 1..k_max";
  if (skipped > 0) rep.note += "; " + std::to_string(skipped) + " draws had unrepresentable cylinders";
  return rep;
}

AxiomReport check_iterate_distortion(const InducedSystem& system, std::size_t k_max, std::size_t samples,
                                     std::size_t symbol_limit, std::uint64_t seed) {
  const auto cells = system.cells(symbol_limit);
  return check_iterate_distortion(cells, k_max, samples, symbol_limit, seed);
}

}  // namespace livsic
