#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "livsic/interval.hpp"
#include "livsic/interval_maps.hpp"
#include "livsic/observable.hpp"
#include "livsic/symbolic_dynamics.hpp"

namespace livsic {

/// S_n f(x) = sum_{k<n} f(T^k x) along the exact orbit, compensated summation.
double birkhoff_sum(const PiecewiseMap& map, const Observable& f, double x, std::size_t n);

struct Obstruction {
  PeriodicOrbit orbit;
  double sum = 0.0;  ///< S_n f over the cycle
};

struct ObstructionReport {
  std::vector<Obstruction> entries;  ///< lexicographic by word
  std::vector<std::string> rejected;
  std::size_t max_period = 0;
  double tol = 0.0;
  std::optional<std::size_t> first_obstructed;  ///< index into entries

  bool obstructed() const noexcept { return first_obstructed.has_value(); }
  /// "obstructed at fixed point 0", "obstructed at orbit LR" or
  /// "unobstructed up to period P".
  std::string verdict(const PiecewiseMap& map) const;
};

ObstructionReport livsic_obstructions(const PiecewiseMap& map, const Observable& f,
                                      std::size_t max_period, double tol);

struct RangeSample {
  std::size_t length = 0;
  double range = 0.0;
};

/// u sampled along one orbit, gauge u(x0) = 0, sorted by abscissa.
struct SampledFunction {
  std::vector<double> points;
  std::vector<double> values;
  double base_point = 0.0;
  std::size_t orbit_length = 0;
  std::uint64_t seed = 0;
  std::size_t merged = 0;                 ///< duplicate abscissae merged
  std::vector<RangeSample> range_growth;  ///< max u - min u over prefixes of length 10^3, 10^4, ...
  bool range_growing = false;

  std::size_t size() const noexcept { return points.size(); }
};

/// u(T^k x0) = -S_k f(x0) along a dithered pseudo-orbit (see dithered_step).
/// x0 defaults to a uniform draw from `seed`. Throws PreconditionError when
/// orbit_length < 1000 and NotACoboundaryError when two abscissae within
/// 1e-14 carry values more than 1e-8 apart.
SampledFunction solve_coboundary(const PiecewiseMap& map, const Observable& f, std::size_t orbit_length,
                                 std::optional<double> x0 = std::nullopt, std::uint64_t seed = 1);

enum class Metric { euclidean, symbolic };

struct HolderOptions {
  Metric metric = Metric::euclidean;
  std::optional<Interval> restriction;
  const PiecewiseMap* map = nullptr;  ///< required for the symbolic metric
  double tau = 0.5;
  std::size_t max_pairs_per_band = 1000000;
  std::size_t min_pairs = 10;
  std::size_t stability_band_limit = 12;
  std::size_t max_band = 48;
  std::uint64_t seed = 1;
};

/// Band k collects pairs at distance in (2^{-k-1}, 2^{-k}] (Euclidean) or
/// with separation time k (symbolic).
struct HolderBand {
  std::size_t k = 0;
  std::size_t pairs = 0;       ///< pairs present in the band
  std::size_t evaluated = 0;   ///< pairs evaluated after subsampling
  double constant = 0.0;
  bool reliable = false;
};

struct HolderEstimate {
  double gamma = 1.0;
  Metric metric = Metric::euclidean;
  std::optional<Interval> restriction;
  std::size_t points = 0;
  std::vector<HolderBand> bands;
  /// max over consecutive reliable bands with k <= stability_band_limit of
  /// max(a/b, b/a); NaN with fewer than two such bands.
  double stability_ratio = 0.0;
  std::size_t stability_band_limit = 12;

  double max_constant() const noexcept;
};

HolderEstimate holder_estimate(const SampledFunction& u, double gamma, const HolderOptions& options = {});

enum class LatticeOutcome { lattice, no_lattice, degenerate };

std::string to_string(LatticeOutcome o);

struct LatticeResidual {
  std::string word;
  std::size_t period = 0;
  double sum = 0.0;
  double residual = 0.0;  ///< S - n mu
};

struct LatticeVerdict {
  LatticeOutcome outcome = LatticeOutcome::no_lattice;
  double mu = 0.0;
  std::optional<double> lambda;
  std::vector<double> candidates;  ///< lambda values examined, in order
  std::vector<LatticeResidual> residuals;
  double tol = 0.0;

  /// "lattice found (λ=1, μ=0)", "no lattice (aperiodic at tolerance)" or
  /// "degenerate (pure drift)".
  std::string summary() const;
};

/// Tests whether every S_q - n_q mu lies within tol of lambda Z, anchoring
/// mu at the first fixed point and trying lambda = |r*| / k, k = 1..k_max,
/// with r* the smallest residual above tol.
LatticeVerdict aperiodicity_test(const PiecewiseMap& map, const ObstructionReport& obstructions,
                                 std::size_t k_max, double tol);

}  // namespace livsic
