#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "livsic/inducing.hpp"
#include "livsic/interval_maps.hpp"

namespace livsic {

enum class Verdict { pass, fail, inconclusive };

std::string to_string(Verdict v);

/// Concrete evidence for a verdict: the offending points (a pair, a single
/// point for derivative evidence, or empty for combinatorial failures), the
/// element they live in and the measured value of the checked quantity.
struct Witness {
  std::vector<double> points;
  std::string element;
  double value = 0.0;
  std::string detail;
};

/// Result of a sampled axiom check. "pass" means no violation was found at
/// the stated sample size, not a proof.
struct AxiomReport {
  std::string axiom;
  Verdict verdict = Verdict::inconclusive;
  double constant = 0.0;
  std::size_t samples = 0;
  std::optional<Witness> witness;
  std::vector<double> per_element;   ///< measured constant per element, in element order
  std::vector<std::string> witness_set;  ///< BIP witness labels
  std::string note;
};

constexpr double kExpansionMargin = 1e-9;

/// Elements of a map: its branches.
std::vector<Branch> elements_of(const PiecewiseMap& map);
/// Elements of an induced system: B_1..B_n_cells.
std::vector<Branch> elements_of(const InducedSystem& system, std::size_t n_cells);

/// Uniform expansion: lambda = min over sampled same-element pairs of
/// |Fx - Fy| / |x - y| and over sampled derivatives. Pass iff lambda > 1 + 1e-9.
/// Each element gets `samples` points (its closure endpoints included).
AxiomReport check_expansion(std::span<const Branch> elements, std::size_t samples,
                            std::uint64_t seed = 1);

/// Bounded distortion with the Lebesgue jacobian: per element the max of
/// |1 - F'(y)/F'(x)| / |Fx - Fy| over `samples` random pairs. Pass iff every
/// maximum is finite and, with four or more elements, the mean of the last
/// quarter is at most twice the mean of the first quarter.
AxiomReport check_distortion(std::span<const Branch> elements, std::size_t samples,
                             std::uint64_t seed = 1);

/// Big images and preimages: a finite set W with, for every element a, some
/// w in W inside F(a) and some w in W with a inside F(w).
AxiomReport check_bip(std::span<const Branch> elements);

/// Tower properties: level mapping, expansion at the return time, backward
/// contraction d(x,y) <= C d(T^{R-k}x, T^{R-k}y) on every level, and
/// distortion of the step from the top level to the base. Columns 1..min(n_columns, columns()).
std::vector<AxiomReport> check_tower_axioms(const YoungTower& tower, std::size_t n_columns,
                                            std::size_t samples, std::uint64_t seed = 1);

/// Bounded distortion of iterates: for random words a_0..a_{k-1} over the
/// first `symbol_limit` elements (k <= k_max <= 6) and random Z inside the
/// common image, the ratio of m([a_0..a_{k-1}] ∩ T^{-k}Z) / m[a_0..a_{k-1}]
/// to m(Z) / m(image). B = max(r, 1/r). Requires full-image elements with
/// inverses.
AxiomReport check_iterate_distortion(std::span<const Branch> elements, std::size_t k_max,
                                     std::size_t samples, std::size_t symbol_limit = 4,
                                     std::uint64_t seed = 1);
AxiomReport check_iterate_distortion(const InducedSystem& system, std::size_t k_max,
                                     std::size_t samples, std::size_t symbol_limit = 4,
                                     std::uint64_t seed = 1);

}  // namespace livsic
