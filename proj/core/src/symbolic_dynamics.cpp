#include "livsic/symbolic_dynamics.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "livsic/errors.hpp"
#include "livsic/numerics.hpp"

namespace livsic {

namespace {

constexpr std::size_t kMaxPeriod = 20;
constexpr std::size_t kContractionBudget = 100000;
constexpr double kResidualTol = 1e-10;
constexpr double kMarkovTol = 1e-12;

bool contained_in_image(const Interval& domain, const Interval& image) {
  return domain.lo >= image.lo - kMarkovTol && domain.hi <= image.hi + kMarkovTol;
}

bool adjacent(const PiecewiseMap& map, Symbol a, Symbol b) {
  return contained_in_image(map.branch(b).domain, map.branch(a).image);
}

// Composed inverse chain for the cycle `word` applied to x: fills
// chain[k] = inv_{w_k}( chain[k+1] ), chain[n] = x, and returns chain[0].
double inverse_chain(const PiecewiseMap& map, const Word& word, double x,
                     std::vector<double>& chain) {
  const std::size_t n = word.size();
  chain.resize(n + 1);
  chain[n] = x;
  for (std::size_t k = n; k-- > 0;) {
    const Interval& img = map.branch(word[k]).image;
    const double y = std::clamp(chain[k + 1], img.lo, img.hi);
    chain[k] = inverse_branch(map, word[k], y);
  }
  return chain[0];
}

double cycle_residual(const PiecewiseMap& map, const Word& word, const std::vector<double>& pts) {
  const std::size_t n = word.size();
  double res = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double image = map.branch(word[k]).forward(pts[k]);
    res = std::max(res, std::abs(image - pts[(k + 1) % n]));
  }
  return res;
}

std::optional<PeriodicOrbit> neutral_fixed_point(const PiecewiseMap& map, const Word& word) {
  if (word.size() != 1) return std::nullopt;
  const Branch& b = map.branch(word[0]);
  for (const double p : {b.domain.lo, b.domain.hi}) {
    if (!b.domain.contains(p)) continue;
    if (b.forward(p) == p && b.derivative(p) == 1.0) {
      return PeriodicOrbit{word, {p}, 0.0, {"neutral"}};
    }
  }
  return std::nullopt;
}

struct Located {
  std::optional<PeriodicOrbit> orbit;
  std::string diagnostic;
};

Located locate_cycle(const PiecewiseMap& map, const Word& word) {
  if (auto neutral = neutral_fixed_point(map, word)) return {std::move(neutral), {}};

  const Interval cyl = cylinder(map, word);
  if (cyl.is_empty()) return {std::nullopt, "word " + word_string(map, word) + " has an empty cylinder"};

  std::vector<double> chain;
  double x = 0.5 * (cyl.lo + cyl.hi);
  bool converged = false;
  for (std::size_t it = 0; it < kContractionBudget; ++it) {
    const double next = inverse_chain(map, word, x, chain);
    const double step = std::abs(next - x);
    x = next;
    if (step <= 2.0 * DBL_EPSILON * std::abs(x) || step < 1e-300) {
      converged = true;
      break;
    }
  }

  // Newton polish on T^n(x) - x along the fixed itinerary
  const std::size_t n = word.size();
  auto defect = [&](double z, double* slope) {
    double prod = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      const Branch& b = map.branch(word[k]);
      prod *= b.derivative(z);
      z = b.forward(z);
    }
    if (slope) *slope = prod - 1.0;
    return z;
  };
  const Interval& d0 = map.branch(word[0]).domain;
  for (int polish = 0; polish < 3; ++polish) {
    double slope = 0.0;
    const double f = defect(x, &slope) - x;
    if (f == 0.0 || slope == 0.0) break;
    const double candidate = x - f / slope;
    if (!d0.contains_closure(candidate)) break;
    if (std::abs(defect(candidate, nullptr) - candidate) >= std::abs(f)) break;
    x = candidate;
  }

  inverse_chain(map, word, x, chain);
  PeriodicOrbit orbit;
  orbit.word = word;
  orbit.points.assign(chain.begin(), chain.begin() + static_cast<std::ptrdiff_t>(n));
  orbit.residual = cycle_residual(map, word, orbit.points);
  if (!converged) {
    orbit.flags.emplace_back("neutral-degenerate");
    return {std::move(orbit), {}};
  }
  if (!(orbit.residual <= kResidualTol)) {
    return {std::nullopt, "word " + word_string(map, word) + " rejected: residual " +
                              std::to_string(orbit.residual)};
  }
  return {std::move(orbit), {}};
}

}  // namespace

bool MarkovPartition::admissible(const Word& word, bool cyclic) const {
  for (Symbol s : word) {
    if (s >= size()) return false;
  }
  for (std::size_t i = 0; i + 1 < word.size(); ++i) {
    if (!adjacency[word[i]][word[i + 1]]) return false;
  }
  if (cyclic && !word.empty() && !adjacency[word.back()][word.front()]) return false;
  return true;
}

MarkovPartition markov_partition(const PiecewiseMap& map, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw ParameterError("symbolic metric base tau must lie in (0,1)");
  }
  const std::size_t k = map.size();
  std::vector<std::vector<bool>> adj(k, std::vector<bool>(k, false));
  for (std::size_t a = 0; a < k; ++a) {
    bool any = false;
    for (std::size_t b = 0; b < k; ++b) {
      adj[a][b] = adjacent(map, static_cast<Symbol>(a), static_cast<Symbol>(b));
      any = any || adj[a][b];
    }
    if (!any) throw StructuralError("branch '" + map.branch(static_cast<Symbol>(a)).label + "' is a dead state");
  }
  return MarkovPartition{map, std::move(adj), tau};
}

std::optional<std::size_t> separation_time(const PiecewiseMap& map, double x, double y,
                                           std::size_t cap) {
  map.owner(x);
  map.owner(y);
  if (x == y) return std::nullopt;
  for (std::size_t n = 0; n < cap; ++n) {
    if (map.owner(x) != map.owner(y)) return n;
    x = evaluate(map, x);
    y = evaluate(map, y);
  }
  return std::nullopt;
}

double symbolic_metric(const MarkovPartition& partition, double x, double y, std::size_t cap) {
  const auto s = separation_time(partition.map, x, y, cap);
  if (!s) return 0.0;
  return std::pow(partition.tau, static_cast<double>(*s));
}

Interval cylinder(const PiecewiseMap& map, const Word& word) {
  if (word.empty()) throw CombinatorialError("cylinder of the empty word");
  for (Symbol s : word) {
    if (s >= map.size()) throw CombinatorialError("symbol out of range in cylinder word");
  }
  Interval j = map.branch(word.back()).domain;
  for (std::size_t i = word.size() - 1; i-- > 0;) {
    if (!adjacent(map, word[i], word[i + 1])) {
      throw CombinatorialError("inadmissible transition " + word_string(map, {word[i], word[i + 1]}));
    }
    const Branch& b = map.branch(word[i]);
    const Interval k = intersect(j, b.image);
    if (k.is_empty()) return Interval::empty();
    Interval pre{inverse_branch(map, word[i], k.lo), inverse_branch(map, word[i], k.hi), k.lo_open,
                 k.hi_open};
    j = intersect(pre, b.domain);
    if (j.is_empty()) return Interval::empty();
  }
  return j;
}

bool PeriodicOrbit::has_flag(const std::string& f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

std::vector<Word> lyndon_words(std::size_t alphabet, std::size_t max_len) {
  std::vector<Word> out;
  if (alphabet == 0 || max_len == 0) return out;
  // Duval's generation in lexicographic order
  std::vector<int> w{-1};
  while (!w.empty()) {
    ++w.back();
    out.emplace_back(w.begin(), w.end());
    const std::size_t m = w.size();
    while (w.size() < max_len) w.push_back(w[w.size() - m]);
    while (!w.empty() && w.back() == static_cast<int>(alphabet) - 1) w.pop_back();
  }
  return out;
}

PeriodicSearch periodic_points(const PiecewiseMap& map, std::size_t max_period) {
  if (max_period > kMaxPeriod) {
    throw PreconditionError("max_period " + std::to_string(max_period) + " exceeds " +
                            std::to_string(kMaxPeriod));
  }
  const MarkovPartition partition = markov_partition(map);
  std::vector<Word> words;
  for (auto& w : lyndon_words(map.size(), max_period)) {
    if (partition.admissible(w, true)) words.push_back(std::move(w));
  }

  std::vector<Located> located(words.size());
  parallel_for(words.size(), [&](std::size_t i) { located[i] = locate_cycle(map, words[i]); }, 16);

  PeriodicSearch result;
  for (auto& l : located) {
    if (l.orbit) {
      result.orbits.push_back(std::move(*l.orbit));
    } else {
      result.rejected.push_back(std::move(l.diagnostic));
    }
  }
  return result;
}

std::string word_string(const PiecewiseMap& map, const Word& word) {
  bool single = true;
  for (const auto& b : map.branches()) single = single && b.label.size() == 1;
  std::string s;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (!single && i > 0) s += '.';
    s += map.branch(word[i]).label;
  }
  return s;
}

}  // namespace livsic
